//! From per-language talk tables to a labeled, aligned, balanced and split
//! sentence corpus.
//!
//! Stages, in order: [`detect_label`] and [`strip_tags_and_markup`] per
//! entry, [`filter_developer_comments`] on non-pivot languages, [`align`]
//! across languages by `(game, StrRef)`, [`balance`] the line set,
//! [`assign_splits`] per line, and finally [`sentence_tokenize`] each
//! language's text. Balancing and splitting act on whole lines, so every
//! language ends up with the same StrRefs in the same split.

mod align;
mod build;
mod filter;
mod label;
pub mod rng;
mod sample;
mod tokenize;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tlk::StrRef;

pub use align::align;
pub use build::{build_corpus, dialog_lines, GameTables};
pub use filter::filter_developer_comments;
pub use label::{detect_label, strip_tags_and_markup, Patterns};
pub use sample::{assign_splits, balance, split_counts, Balanced};
pub use tokenize::{abbreviations, sentence_tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Persuade,
    NonPersuade,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Persuade, Label::NonPersuade];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Persuade => "persuade",
            Label::NonPersuade => "non_persuade",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|sp| sp.as_str() == s)
            .ok_or_else(|| format!("unknown split {s:?} (expected train, validation or test)"))
    }
}

/// A dialogue line's identity: StrRefs are only unique within one game.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineKey {
    pub game_id: String,
    pub str_ref: StrRef,
}

impl LineKey {
    pub fn new(game_id: impl Into<String>, str_ref: StrRef) -> Self {
        Self {
            game_id: game_id.into(),
            str_ref,
        }
    }
}

impl fmt::Display for LineKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.game_id, self.str_ref)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogLine {
    pub str_ref: StrRef,
    pub game_id: String,
    pub language: String,
    pub raw_text: String,
    pub clean_text: String,
    pub label: Label,
    pub matched_tags: Vec<String>,
}

impl DialogLine {
    pub fn key(&self) -> LineKey {
        LineKey::new(self.game_id.clone(), self.str_ref)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedLine {
    pub str_ref: StrRef,
    pub game_id: String,
    pub label: Label,
    /// Clean text per configured language.
    pub texts: std::collections::BTreeMap<String, String>,
}

impl AlignedLine {
    pub fn key(&self) -> LineKey {
        LineKey::new(self.game_id.clone(), self.str_ref)
    }
}

/// One sentence of one line in one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub str_ref: StrRef,
    pub game_id: String,
    pub language: String,
    pub sentence_index: u32,
    pub text: String,
    pub label: Label,
    pub split: Split,
}

impl SentenceRecord {
    pub fn key(&self) -> LineKey {
        LineKey::new(self.game_id.clone(), self.str_ref)
    }
}

fn default_languages() -> Vec<String> {
    ["en", "es", "de", "fr", "it"].map(String::from).to_vec()
}

fn default_pivot() -> String {
    "en".into()
}

fn default_tag_patterns() -> Vec<String> {
    vec![r"(?i)\[\s*persua(?:de|sion)\b[^\[\]]*\]".into()]
}

fn default_denylist() -> Vec<String> {
    vec![r"(?i)do\s+not\s+translate".into(), r"(?i)placeholder".into()]
}

fn default_persuade_fraction() -> f64 {
    0.20
}

fn default_split_fractions() -> [f64; 3] {
    [0.70, 0.15, 0.15]
}

fn default_seed() -> u64 {
    42
}

/// Corpus construction settings. All fields have defaults; unknown keys are
/// rejected when deserializing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_languages")]
    pub languages: Vec<String>,
    /// Language whose tags decide every line's label.
    #[serde(default = "default_pivot")]
    pub pivot_language: String,
    /// Regexes matching a whole bracketed persuasion tag, brackets included.
    #[serde(default = "default_tag_patterns")]
    pub tag_patterns: Vec<String>,
    /// Regexes identifying developer comments in non-pivot languages.
    #[serde(default = "default_denylist")]
    pub comment_denylist: Vec<String>,
    #[serde(default = "default_persuade_fraction")]
    pub persuade_fraction: f64,
    /// Train, validation, test.
    #[serde(default = "default_split_fractions")]
    pub split_fractions: [f64; 3],
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            languages: default_languages(),
            pivot_language: default_pivot(),
            tag_patterns: default_tag_patterns(),
            comment_denylist: default_denylist(),
            persuade_fraction: default_persuade_fraction(),
            split_fractions: default_split_fractions(),
            seed: default_seed(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::InvalidConfig(msg));
        if self.languages.is_empty() {
            return bad("languages must not be empty".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &self.languages {
            if l.is_empty() || !l.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return bad(format!("language code {l:?} must be non-empty ASCII letters, digits, '-' or '_'"));
            }
            if !seen.insert(l) {
                return bad(format!("language {l:?} listed twice"));
            }
        }
        if !self.languages.contains(&self.pivot_language) {
            return bad(format!(
                "pivot language {:?} is not among the configured languages",
                self.pivot_language
            ));
        }
        let f = self.persuade_fraction;
        if !(f > 0.0 && f < 1.0) {
            return bad(format!("persuade_fraction {f} must lie strictly between 0 and 1"));
        }
        for (name, v) in ["train", "validation", "test"].iter().zip(self.split_fractions) {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} fraction {v} must lie strictly between 0 and 1"));
            }
        }
        let sum: f64 = self.split_fractions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return bad(format!("split fractions sum to {sum}, not 1"));
        }
        Patterns::compile(&self.tag_patterns, &self.comment_denylist)?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid pattern {pattern:?}: {source}")]
    InvalidPattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
    #[error("StrRef {str_ref} appears twice for game {game_id:?}, language {language:?}")]
    DuplicateStrRef {
        game_id: String,
        language: String,
        str_ref: StrRef,
    },
    #[error("game {game_id:?} has no talk table for language {language:?}")]
    MissingLanguage { game_id: String, language: String },
    #[error("game {0:?} is listed more than once")]
    DuplicateGame(String),
    #[error("no {0} lines to balance")]
    EmptyClass(Label),
    #[error("nothing to split: the line set is empty")]
    EmptyInput,
}
