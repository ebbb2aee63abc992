//! Aurora-engine talk tables (`dialog.tlk`).
//!
//! A talk table maps a string reference (StrRef) to one localized entry. The
//! StrRef is not stored in the file: it is the position of the entry record.
//! Two encodings are supported, the V3.0 binary layout and an XML rendering
//! of the same table (see [`xml`]).

mod binary;
mod codepage;
pub mod xml;

use thiserror::Error;

pub use binary::{parse_tlk, write_tlk, ENTRY_SIZE, HEADER_SIZE, MAGIC, VERSION};
pub use codepage::CodepageConfig;
pub use xml::{parse_tlk_xml, render_tlk_xml, XmlWarning};

/// Positional index into a talk table.
pub type StrRef = u32;

/// Entry carries text.
pub const FLAG_TEXT_PRESENT: u32 = 0x1;
/// Entry carries a sound resref.
pub const FLAG_SOUND_PRESENT: u32 = 0x2;
/// Entry carries a sound length.
pub const FLAG_SOUND_LENGTH_PRESENT: u32 = 0x4;

/// Maximum length of a sound resref in bytes.
pub const RESREF_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TlkEntry {
    pub flags: u32,
    /// Empty whenever [`FLAG_TEXT_PRESENT`] is unset.
    pub text: String,
    pub sound_resref: String,
    pub volume_variance: u32,
    pub pitch_variance: u32,
    /// Seconds.
    pub sound_length: f32,
}

impl TlkEntry {
    /// An entry holding only text.
    pub fn text(text: impl Into<String>) -> Self {
        Self {
            flags: FLAG_TEXT_PRESENT,
            text: text.into(),
            ..Self::default()
        }
    }

    pub fn has_text(&self) -> bool {
        self.flags & FLAG_TEXT_PRESENT != 0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TalkTable {
    pub language_id: u32,
    /// Index `i` holds StrRef `i`.
    pub entries: Vec<TlkEntry>,
}

impl TalkTable {
    pub fn new(language_id: u32) -> Self {
        Self {
            language_id,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, str_ref: StrRef) -> Option<&TlkEntry> {
        self.entries.get(str_ref as usize)
    }

    /// `(StrRef, entry)` pairs in StrRef order.
    pub fn iter(&self) -> impl Iterator<Item = (StrRef, &TlkEntry)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (i as StrRef, e))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TlkError {
    #[error("not a TLK file: expected magic \"TLK \", found {found:?}")]
    BadMagic { found: String },
    #[error("unsupported TLK version {found:?} (only V3.0 is supported)")]
    BadVersion { found: String },
    #[error("truncated file: {what} needs bytes {start}..{end} but the file is {len} bytes long")]
    Truncated {
        what: String,
        start: u64,
        end: u64,
        len: usize,
    },
    #[error("StrRef {str_ref} at offset {offset}: bytes are not valid {encoding}")]
    DecodeError {
        str_ref: StrRef,
        offset: u64,
        encoding: &'static str,
    },
    #[error("StrRef {str_ref}: text is not representable in {encoding}")]
    EncodeError {
        str_ref: StrRef,
        encoding: &'static str,
    },
    #[error("StrRef {str_ref}: sound resref {resref:?} is longer than {RESREF_LEN} bytes")]
    ResrefTooLong { str_ref: StrRef, resref: String },
    #[error("table has {0} entries, more than a TLK header can declare")]
    TooManyEntries(usize),
    #[error("unknown character encoding {0:?}")]
    UnknownEncoding(String),
    #[error("malformed talk-table XML: {0}")]
    MalformedDocument(String),
    #[error("duplicate string id {0}")]
    DuplicateId(StrRef),
}
