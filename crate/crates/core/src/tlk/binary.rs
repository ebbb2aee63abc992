//! TLK V3.0 binary layout, all integers little-endian.
//!
//! ```text
//! header (20 bytes)
//!   0  "TLK "
//!   4  "V3.0"
//!   8  language_id            u32
//!  12  string_count           u32
//!  16  string_entries_offset  u32   start of the string heap
//! entry record (40 bytes, string_count of them, starting at byte 20)
//!   0  flags                  u32
//!   4  sound_resref           [u8; 16]  NUL padded
//!  20  volume_variance        u32
//!  24  pitch_variance         u32
//!  28  offset_to_string       u32   relative to string_entries_offset
//!  32  string_size            u32
//!  36  sound_length           f32
//! ```

use super::codepage::{decode, encode};
use super::{CodepageConfig, StrRef, TalkTable, TlkEntry, TlkError, FLAG_TEXT_PRESENT, RESREF_LEN};

pub const MAGIC: &[u8; 4] = b"TLK ";
pub const VERSION: &[u8; 4] = b"V3.0";
pub const HEADER_SIZE: usize = 20;
pub const ENTRY_SIZE: usize = 40;

struct Reader<'a> {
    data: &'a [u8],
}

impl<'a> Reader<'a> {
    /// Bounds-checked slice `start..start + len`.
    fn slice(&self, start: u64, len: u64, what: impl FnOnce() -> String) -> Result<&'a [u8], TlkError> {
        let end = start.saturating_add(len);
        if end > self.data.len() as u64 {
            return Err(TlkError::Truncated {
                what: what(),
                start,
                end,
                len: self.data.len(),
            });
        }
        Ok(&self.data[start as usize..end as usize])
    }
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn lossy_tag(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

pub fn parse_tlk(bytes: &[u8], cp: &CodepageConfig) -> Result<TalkTable, TlkError> {
    let reader = Reader { data: bytes };
    let header = reader.slice(0, HEADER_SIZE as u64, || "header".into())?;
    if &header[0..4] != MAGIC {
        return Err(TlkError::BadMagic {
            found: lossy_tag(&header[0..4]),
        });
    }
    if &header[4..8] != VERSION {
        return Err(TlkError::BadVersion {
            found: lossy_tag(&header[4..8]),
        });
    }
    let language_id = u32_at(header, 8);
    let count = u32_at(header, 12);
    let strings_offset = u32_at(header, 16) as u64;
    let encoding = cp.encoding_for(language_id)?;

    let records = reader.slice(
        HEADER_SIZE as u64,
        count as u64 * ENTRY_SIZE as u64,
        || format!("{count} entry records"),
    )?;
    if strings_offset > bytes.len() as u64 {
        return Err(TlkError::Truncated {
            what: "string entries offset".into(),
            start: strings_offset,
            end: strings_offset,
            len: bytes.len(),
        });
    }

    let mut entries = Vec::with_capacity(count as usize);
    for (i, rec) in records.chunks_exact(ENTRY_SIZE).enumerate() {
        let str_ref = i as StrRef;
        let flags = u32_at(rec, 0);
        let resref_raw = &rec[4..4 + RESREF_LEN];
        let resref_len = resref_raw.iter().position(|&b| b == 0).unwrap_or(RESREF_LEN);
        let record_offset = (HEADER_SIZE + i * ENTRY_SIZE) as u64;
        let sound_resref = decode(encoding, &resref_raw[..resref_len]).ok_or(TlkError::DecodeError {
            str_ref,
            offset: record_offset + 4,
            encoding: encoding.name(),
        })?;
        let volume_variance = u32_at(rec, 20);
        let pitch_variance = u32_at(rec, 24);
        let text_offset = u32_at(rec, 28) as u64;
        let text_size = u32_at(rec, 32) as u64;
        let sound_length = f32::from_le_bytes(rec[36..40].try_into().unwrap());

        let text = if flags & FLAG_TEXT_PRESENT != 0 {
            let start = strings_offset + text_offset;
            let raw = reader.slice(start, text_size, || format!("text of StrRef {str_ref}"))?;
            decode(encoding, raw).ok_or(TlkError::DecodeError {
                str_ref,
                offset: start,
                encoding: encoding.name(),
            })?
        } else {
            String::new()
        };

        entries.push(TlkEntry {
            flags,
            text,
            sound_resref,
            volume_variance,
            pitch_variance,
            sound_length,
        });
    }

    Ok(TalkTable {
        language_id,
        entries,
    })
}

/// Serializes in canonical layout: string data concatenated in StrRef order
/// right after the entry records. Entries without text get size 0 at the
/// current heap position.
pub fn write_tlk(table: &TalkTable, cp: &CodepageConfig) -> Result<Vec<u8>, TlkError> {
    let encoding = cp.encoding_for(table.language_id)?;
    let count = u32::try_from(table.entries.len()).map_err(|_| TlkError::TooManyEntries(table.entries.len()))?;
    let strings_offset = HEADER_SIZE as u64 + count as u64 * ENTRY_SIZE as u64;
    let strings_offset =
        u32::try_from(strings_offset).map_err(|_| TlkError::TooManyEntries(table.entries.len()))?;

    let mut records = Vec::with_capacity(table.entries.len() * ENTRY_SIZE);
    let mut heap: Vec<u8> = Vec::new();
    for (i, entry) in table.entries.iter().enumerate() {
        let str_ref = i as StrRef;
        let resref = encode(encoding, &entry.sound_resref).ok_or(TlkError::EncodeError {
            str_ref,
            encoding: encoding.name(),
        })?;
        if resref.len() > RESREF_LEN {
            return Err(TlkError::ResrefTooLong {
                str_ref,
                resref: entry.sound_resref.clone(),
            });
        }
        let text = if entry.has_text() {
            encode(encoding, &entry.text).ok_or(TlkError::EncodeError {
                str_ref,
                encoding: encoding.name(),
            })?
        } else {
            Vec::new()
        };
        let offset = u32::try_from(heap.len()).map_err(|_| TlkError::TooManyEntries(table.entries.len()))?;

        records.extend_from_slice(&entry.flags.to_le_bytes());
        let mut padded = [0u8; RESREF_LEN];
        padded[..resref.len()].copy_from_slice(&resref);
        records.extend_from_slice(&padded);
        records.extend_from_slice(&entry.volume_variance.to_le_bytes());
        records.extend_from_slice(&entry.pitch_variance.to_le_bytes());
        records.extend_from_slice(&offset.to_le_bytes());
        records.extend_from_slice(&(text.len() as u32).to_le_bytes());
        records.extend_from_slice(&entry.sound_length.to_le_bytes());
        heap.extend_from_slice(&text);
    }

    let mut out = Vec::with_capacity(HEADER_SIZE + records.len() + heap.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(VERSION);
    out.extend_from_slice(&table.language_id.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&strings_offset.to_le_bytes());
    out.extend_from_slice(&records);
    out.extend_from_slice(&heap);
    Ok(out)
}
