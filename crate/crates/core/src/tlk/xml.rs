//! XML rendering of a talk table.
//!
//! ```xml
//! <?xml version="1.0" encoding="UTF-8"?>
//! <tlk language="0">
//!   <string id="0" flags="1">Hello there.</string>
//!   <string id="1" flags="7" sound="n_greet01" volumevariance="5" pitchvariance="7" soundlength="2.5">Greetings.</string>
//! </tlk>
//! ```
//!
//! Only `id` is required on a `string` element. Without `flags`, an element
//! is taken as text-present, plus the sound bits implied by whichever sound
//! attributes it carries. Unknown attributes are ignored. Ids need not be
//! contiguous: missing ids become empty, text-absent entries and are reported
//! as [`XmlWarning::MissingId`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{
    StrRef, TalkTable, TlkEntry, TlkError, FLAG_SOUND_LENGTH_PRESENT, FLAG_SOUND_PRESENT,
    FLAG_TEXT_PRESENT,
};

/// Largest id accepted; keeps gap filling bounded.
pub const MAX_ID: StrRef = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlWarning {
    /// No `string` element carried this id; an empty entry was inserted.
    MissingId(StrRef),
}

impl std::fmt::Display for XmlWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            XmlWarning::MissingId(id) => write!(f, "no string with id {id}; filled with an empty entry"),
        }
    }
}

fn malformed(msg: impl Into<String>) -> TlkError {
    TlkError::MalformedDocument(msg.into())
}

fn attr_map(e: &BytesStart<'_>) -> Result<BTreeMap<String, String>, TlkError> {
    let mut out = BTreeMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| malformed(err.to_string()))?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|err| malformed(err.to_string()))?
            .into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(attrs: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, TlkError> {
    match attrs.get(key) {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| malformed(format!("attribute {key}={v:?} is not a valid number"))),
    }
}

fn parse_flags(v: &str) -> Option<u32> {
    let v = v.trim();
    match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16).ok(),
        None => v.parse().ok(),
    }
}

fn entry_from_attrs(attrs: &BTreeMap<String, String>, text: String) -> Result<(StrRef, TlkEntry), TlkError> {
    let id: StrRef = parse_num(attrs, "id")?.ok_or_else(|| malformed("string element without id"))?;
    if id > MAX_ID {
        return Err(malformed(format!("string id {id} exceeds the supported maximum {MAX_ID}")));
    }
    let sound_resref = attrs.get("sound").cloned().unwrap_or_default();
    let sound_length: Option<f32> = parse_num(attrs, "soundlength")?;
    let flags = match attrs.get("flags") {
        Some(v) => parse_flags(v).ok_or_else(|| malformed(format!("flags={v:?} is not a number")))?,
        None => {
            let mut f = FLAG_TEXT_PRESENT;
            if attrs.contains_key("sound") {
                f |= FLAG_SOUND_PRESENT;
            }
            if sound_length.is_some() {
                f |= FLAG_SOUND_LENGTH_PRESENT;
            }
            f
        }
    };
    let text = if flags & FLAG_TEXT_PRESENT != 0 { text } else { String::new() };
    Ok((
        id,
        TlkEntry {
            flags,
            text,
            sound_resref,
            volume_variance: parse_num(attrs, "volumevariance")?.unwrap_or(0),
            pitch_variance: parse_num(attrs, "pitchvariance")?.unwrap_or(0),
            sound_length: sound_length.unwrap_or(0.0),
        },
    ))
}

pub fn parse_tlk_xml(text: &str) -> Result<(TalkTable, Vec<XmlWarning>), TlkError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(false);

    let mut language_id = None;
    let mut by_id: BTreeMap<StrRef, TlkEntry> = BTreeMap::new();
    // attributes and accumulated text of the open <string>
    let mut open: Option<(BTreeMap<String, String>, String)> = None;
    let mut root_closed = false;

    let insert = |by_id: &mut BTreeMap<StrRef, TlkEntry>, (id, entry): (StrRef, TlkEntry)| {
        if by_id.insert(id, entry).is_some() {
            Err(TlkError::DuplicateId(id))
        } else {
            Ok(())
        }
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| malformed(format!("at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Start(e) | Event::Empty(e) if root_closed => {
                return Err(malformed(format!(
                    "element <{}> after the root element",
                    String::from_utf8_lossy(e.name().as_ref())
                )))
            }
            Event::Start(e) => match (e.name().as_ref(), language_id.is_some(), open.is_some()) {
                (b"tlk", false, _) => {
                    language_id = Some(parse_num(&attr_map(&e)?, "language")?.unwrap_or(0));
                }
                (b"string", true, false) => open = Some((attr_map(&e)?, String::new())),
                (name, _, _) => {
                    return Err(malformed(format!(
                        "unexpected element <{}>",
                        String::from_utf8_lossy(name)
                    )))
                }
            },
            Event::Empty(e) => match (e.name().as_ref(), language_id.is_some(), open.is_some()) {
                (b"tlk", false, _) => {
                    language_id = Some(parse_num(&attr_map(&e)?, "language")?.unwrap_or(0));
                    root_closed = true;
                }
                (b"string", true, false) => {
                    insert(&mut by_id, entry_from_attrs(&attr_map(&e)?, String::new())?)?;
                }
                (name, _, _) => {
                    return Err(malformed(format!(
                        "unexpected element <{}/>",
                        String::from_utf8_lossy(name)
                    )))
                }
            },
            Event::End(e) => match e.name().as_ref() {
                b"string" => {
                    let (attrs, body) = open.take().ok_or_else(|| malformed("unbalanced </string>"))?;
                    insert(&mut by_id, entry_from_attrs(&attrs, body)?)?;
                }
                b"tlk" if open.is_none() => root_closed = true,
                name => {
                    return Err(malformed(format!(
                        "unexpected </{}>",
                        String::from_utf8_lossy(name)
                    )))
                }
            },
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| malformed(e.to_string()))?;
                match open.as_mut() {
                    Some((_, body)) => body.push_str(&s),
                    None if s.trim().is_empty() => {}
                    None => return Err(malformed(format!("stray text {:?}", s.trim()))),
                }
            }
            Event::CData(c) => match open.as_mut() {
                Some((_, body)) => body.push_str(&String::from_utf8_lossy(&c.into_inner())),
                None => return Err(malformed("stray CDATA section")),
            },
        }
    }

    let language_id = language_id.ok_or_else(|| malformed("missing <tlk> root element"))?;
    if open.is_some() || !root_closed {
        return Err(malformed("document ends inside an element"));
    }

    let len = by_id.keys().next_back().map_or(0, |&max| max as usize + 1);
    let mut entries = Vec::with_capacity(len);
    let mut warnings = Vec::new();
    let mut present = by_id.into_iter().peekable();
    for id in 0..len as StrRef {
        match present.next_if(|(k, _)| *k == id) {
            Some((_, entry)) => entries.push(entry),
            None => {
                warnings.push(XmlWarning::MissingId(id));
                entries.push(TlkEntry::default());
            }
        }
    }
    Ok((TalkTable { language_id, entries }, warnings))
}

fn escape_into(out: &mut String, s: &str, attribute: bool) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            '\n' | '\t' if attribute => {
                let _ = write!(out, "&#{};", c as u32);
            }
            c if c.is_control() && c != '\n' && c != '\t' => {
                let _ = write!(out, "&#{};", c as u32);
            }
            c => out.push(c),
        }
    }
}

/// Renders `table` so that [`parse_tlk_xml`] reproduces it exactly.
pub fn render_tlk_xml(table: &TalkTable) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<tlk language=\"{}\">", table.language_id);
    for (id, e) in table.iter() {
        let _ = write!(out, "  <string id=\"{id}\" flags=\"{}\"", e.flags);
        if !e.sound_resref.is_empty() {
            out.push_str(" sound=\"");
            escape_into(&mut out, &e.sound_resref, true);
            out.push('"');
        }
        if e.volume_variance != 0 {
            let _ = write!(out, " volumevariance=\"{}\"", e.volume_variance);
        }
        if e.pitch_variance != 0 {
            let _ = write!(out, " pitchvariance=\"{}\"", e.pitch_variance);
        }
        if e.sound_length.to_bits() != 0 {
            let _ = write!(out, " soundlength=\"{}\"", e.sound_length);
        }
        if e.text.is_empty() {
            out.push_str("/>\n");
        } else {
            out.push('>');
            escape_into(&mut out, &e.text, false);
            out.push_str("</string>\n");
        }
    }
    out.push_str("</tlk>\n");
    out
}
