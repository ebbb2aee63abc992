//! On-disk corpus format and corpus statistics.
//!
//! A corpus directory holds `manifest.json` plus one JSON-lines file per
//! language and split, named `<language>.<split>.jsonl`. Each line is one
//! sentence record with keys in this order:
//!
//! ```json
//! {"str_ref":12,"game_id":"kotor1","sentence_index":0,"text":"Trust me.","label":"persuade"}
//! ```
//!
//! Records are sorted by `(game_id, str_ref, sentence_index)`; files are
//! UTF-8 with LF line endings.

mod io;
mod stats;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::{Label, LineKey, PipelineConfig, SentenceRecord, Split};

pub use io::{corpus_file_name, export_corpus, import_corpus, MANIFEST_FILE};
pub use stats::{compute_stats, render_stats, CorpusStats};

pub const FORMAT_VERSION: &str = "persuasion-corpus/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelCounts {
    pub persuade: u64,
    pub non_persuade: u64,
}

impl LabelCounts {
    pub fn add(&mut self, label: Label, n: u64) {
        match label {
            Label::Persuade => self.persuade += n,
            Label::NonPersuade => self.non_persuade += n,
        }
    }

    pub fn total(&self) -> u64 {
        self.persuade + self.non_persuade
    }

    pub fn merged(self, other: LabelCounts) -> LabelCounts {
        LabelCounts {
            persuade: self.persuade + other.persuade,
            non_persuade: self.non_persuade + other.non_persuade,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitCounts {
    pub train: LabelCounts,
    pub validation: LabelCounts,
    pub test: LabelCounts,
}

impl SplitCounts {
    pub fn get(&self, split: Split) -> &LabelCounts {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    pub fn get_mut(&mut self, split: Split) -> &mut LabelCounts {
        match split {
            Split::Train => &mut self.train,
            Split::Validation => &mut self.validation,
            Split::Test => &mut self.test,
        }
    }

    pub fn total(&self) -> LabelCounts {
        self.train.merged(self.validation).merged(self.test)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSource {
    pub id: String,
    /// Talk-table entry count per language.
    pub entries: BTreeMap<String, u64>,
    /// Input path per language, as given in the run configuration.
    #[serde(default)]
    pub sources: BTreeMap<String, String>,
}

/// Line counts after each pipeline stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageCounts {
    /// Lines with non-empty clean text, per language.
    pub extracted: BTreeMap<String, u64>,
    pub dropped_comments: BTreeMap<String, u64>,
    pub aligned: LabelCounts,
    pub balanced: LabelCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub format_version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub games: Vec<GameSource>,
    pub stages: StageCounts,
    /// Dialogue lines per split and label; identical for every language.
    pub line_counts: SplitCounts,
    /// Sentences per language, split and label.
    pub sentence_counts: BTreeMap<String, SplitCounts>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl DatasetManifest {
    pub fn new(
        config: PipelineConfig,
        games: Vec<GameSource>,
        stages: StageCounts,
        warnings: Vec<String>,
        records: &[SentenceRecord],
    ) -> Self {
        let (line_counts, sentence_counts) = count_records(records, &config.languages);
        Self {
            format_version: FORMAT_VERSION.to_string(),
            seed: config.seed,
            config,
            games,
            stages,
            line_counts,
            sentence_counts,
            warnings,
        }
    }

    /// Checks the manifest's count sections against `records`.
    pub fn verify_counts(&self, records: &[SentenceRecord]) -> Result<(), String> {
        let languages: Vec<String> = self.sentence_counts.keys().cloned().collect();
        let (lines, sentences) = count_records(records, &languages);
        if lines != self.line_counts {
            return Err(format!(
                "line counts: manifest says {:?}, records give {:?}",
                self.line_counts, lines
            ));
        }
        for (language, counted) in &sentences {
            let Some(declared) = self.sentence_counts.get(language) else {
                return Err(format!("records for language {language:?} missing from the manifest"));
            };
            for split in Split::ALL {
                if declared.get(split) != counted.get(split) {
                    return Err(format!(
                        "{language}.{split}: manifest says {:?}, records give {:?}",
                        declared.get(split),
                        counted.get(split)
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Line counts (distinct keys of the first language) and per-language
/// sentence counts. Every language in `languages` gets an entry.
fn count_records(records: &[SentenceRecord], languages: &[String]) -> (SplitCounts, BTreeMap<String, SplitCounts>) {
    let mut sentences: BTreeMap<String, SplitCounts> =
        languages.iter().map(|l| (l.clone(), SplitCounts::default())).collect();
    let mut lines_by_language: BTreeMap<&str, BTreeSet<(LineKey, Label, Split)>> = BTreeMap::new();
    for r in records {
        sentences
            .entry(r.language.clone())
            .or_default()
            .get_mut(r.split)
            .add(r.label, 1);
        lines_by_language
            .entry(&r.language)
            .or_default()
            .insert((r.key(), r.label, r.split));
    }
    let mut lines = SplitCounts::default();
    if let Some(first) = lines_by_language.values().next() {
        for (_, label, split) in first {
            lines.get_mut(*split).add(*label, 1);
        }
    }
    (lines, sentences)
}

/// Canonical record order: language, game, StrRef, sentence index.
pub fn sort_records(records: &mut [SentenceRecord]) {
    records.sort_by(|a, b| {
        (&a.language, &a.game_id, a.str_ref, a.sentence_index).cmp(&(&b.language, &b.game_id, b.str_ref, b.sentence_index))
    });
}

/// Checks the per-record and cross-record corpus invariants: non-empty text,
/// one label and one split per line, the same line set in every language
/// with the same split.
pub fn validate_records(records: &[SentenceRecord]) -> Result<(), DatasetError> {
    let invalid = |msg: String| Err(DatasetError::Validation(msg));
    if records.is_empty() {
        return invalid("corpus has no records".into());
    }
    let mut line_info: BTreeMap<LineKey, (Label, Split)> = BTreeMap::new();
    let mut per_language: BTreeMap<&str, BTreeSet<LineKey>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for r in records {
        if r.text.trim().is_empty() {
            return invalid(format!("{} {}: empty sentence text", r.language, r.key()));
        }
        if !seen.insert((&r.language, r.key(), r.sentence_index)) {
            return invalid(format!(
                "{} {} sentence {}: duplicate record",
                r.language,
                r.key(),
                r.sentence_index
            ));
        }
        let info = line_info.entry(r.key()).or_insert((r.label, r.split));
        if *info != (r.label, r.split) {
            return invalid(format!(
                "line {} has inconsistent label/split: {:?} vs {:?}",
                r.key(),
                info,
                (r.label, r.split)
            ));
        }
        per_language.entry(&r.language).or_default().insert(r.key());
    }
    let mut sets = per_language.iter();
    if let Some((first_lang, first)) = sets.next() {
        for (lang, set) in sets {
            if set != first {
                return invalid(format!("languages {first_lang} and {lang} cover different lines"));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid corpus: {0}")]
    Validation(String),
    #[error("{file}:{line}: {message}")]
    Schema {
        file: String,
        line: usize,
        message: String,
    },
    #[error("count mismatch: {0}")]
    CountMismatch(String),
}

impl DatasetError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
