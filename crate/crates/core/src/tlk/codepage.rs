use std::collections::BTreeMap;

use encoding_rs::Encoding;
use serde::{Deserialize, Serialize};

use super::TlkError;

/// Maps a talk table's language id to the single-byte encoding of its text.
///
/// Entry text is decoded to UTF-8 on read and encoded back on write. Ids
/// without a mapping use `default`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodepageConfig {
    pub default: String,
    /// Keys are written as strings (`"2" = "windows-1252"`) so the map
    /// fits TOML as well as JSON.
    #[serde(default, with = "id_keys")]
    pub languages: BTreeMap<u32, String>,
}

mod id_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<u32, String>, s: S) -> Result<S::Ok, S::Error> {
        let as_strings: BTreeMap<String, &String> = map.iter().map(|(k, v)| (k.to_string(), v)).collect();
        as_strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, String>, D::Error> {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.parse::<u32>()
                    .map(|id| (id, v))
                    .map_err(|_| D::Error::custom(format!("language id {k:?} is not a non-negative integer")))
            })
            .collect()
    }
}

impl Default for CodepageConfig {
    /// English, French, German, Italian and Spanish (ids 0..=4), all Windows-1252.
    fn default() -> Self {
        let languages = (0..=4).map(|id| (id, "windows-1252".to_string())).collect();
        Self {
            default: "windows-1252".to_string(),
            languages,
        }
    }
}

impl CodepageConfig {
    /// Every language decoded with one encoding.
    pub fn uniform(label: &str) -> Result<Self, TlkError> {
        lookup(label)?;
        Ok(Self {
            default: label.to_string(),
            languages: BTreeMap::new(),
        })
    }

    pub fn with_language(mut self, language_id: u32, label: &str) -> Result<Self, TlkError> {
        lookup(label)?;
        self.languages.insert(language_id, label.to_string());
        Ok(self)
    }

    pub fn encoding_for(&self, language_id: u32) -> Result<&'static Encoding, TlkError> {
        let label = self
            .languages
            .get(&language_id)
            .unwrap_or(&self.default);
        lookup(label)
    }

    /// Checks every configured label resolves.
    pub fn validate(&self) -> Result<(), TlkError> {
        lookup(&self.default)?;
        for label in self.languages.values() {
            lookup(label)?;
        }
        Ok(())
    }
}

fn lookup(label: &str) -> Result<&'static Encoding, TlkError> {
    Encoding::for_label(label.as_bytes()).ok_or_else(|| TlkError::UnknownEncoding(label.to_string()))
}

pub(crate) fn decode(encoding: &'static Encoding, bytes: &[u8]) -> Option<String> {
    if encoding == encoding_rs::UTF_8 {
        return std::str::from_utf8(bytes).ok().map(str::to_string);
    }
    encoding
        .decode_without_bom_handling_and_without_replacement(bytes)
        .map(|s| s.into_owned())
}

pub(crate) fn encode(encoding: &'static Encoding, text: &str) -> Option<Vec<u8>> {
    if encoding == encoding_rs::UTF_8 {
        return Some(text.as_bytes().to_vec());
    }
    let (bytes, _, had_errors) = encoding.encode(text);
    if had_errors {
        None
    } else {
        Some(bytes.into_owned())
    }
}
