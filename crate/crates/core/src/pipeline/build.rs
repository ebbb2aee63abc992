use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;

use super::{
    align, assign_splits, balance, detect_label, filter_developer_comments, sentence_tokenize,
    strip_tags_and_markup, DialogLine, Label, Patterns, PipelineConfig, PipelineError, SentenceRecord,
};
use crate::dataset::{sort_records, DatasetManifest, GameSource, LabelCounts, StageCounts};
use crate::tlk::TalkTable;

/// One game's talk tables, keyed by language code.
#[derive(Debug, Clone, Default)]
pub struct GameTables {
    pub game_id: String,
    pub tables: BTreeMap<String, TalkTable>,
    /// Where each table came from, recorded in the manifest.
    pub sources: BTreeMap<String, String>,
}

/// Labels and cleans every text-bearing entry of `table`.
pub fn dialog_lines(game_id: &str, language: &str, table: &TalkTable, tag_patterns: &[Regex]) -> Vec<DialogLine> {
    table
        .iter()
        .filter(|(_, e)| e.has_text())
        .map(|(str_ref, e)| {
            let (label, matched_tags) = detect_label(&e.text, tag_patterns);
            DialogLine {
                str_ref,
                game_id: game_id.to_string(),
                language: language.to_string(),
                raw_text: e.text.clone(),
                clean_text: strip_tags_and_markup(&e.text),
                label,
                matched_tags,
            }
        })
        .collect()
}

fn label_counts<'a>(labels: impl Iterator<Item = &'a Label>) -> LabelCounts {
    let mut c = LabelCounts::default();
    for l in labels {
        c.add(*l, 1);
    }
    c
}

/// Runs the whole pipeline. Output records are in canonical order
/// (language, game, StrRef, sentence index).
pub fn build_corpus(
    games: &[GameTables],
    config: &PipelineConfig,
) -> Result<(Vec<SentenceRecord>, DatasetManifest), PipelineError> {
    config.validate()?;
    let patterns = Patterns::from_config(config)?;

    let mut seen = BTreeSet::new();
    for g in games {
        if !seen.insert(&g.game_id) {
            return Err(PipelineError::DuplicateGame(g.game_id.clone()));
        }
        for language in &config.languages {
            if !g.tables.contains_key(language) {
                return Err(PipelineError::MissingLanguage {
                    game_id: g.game_id.clone(),
                    language: language.clone(),
                });
            }
        }
    }

    let mut stages = StageCounts::default();
    let mut per_language: BTreeMap<String, Vec<DialogLine>> = BTreeMap::new();
    for language in &config.languages {
        let mut lines = Vec::new();
        for g in games {
            lines.extend(dialog_lines(&g.game_id, language, &g.tables[language], &patterns.tags));
        }
        let extracted = lines.iter().filter(|l| !l.clean_text.is_empty()).count() as u64;
        stages.extracted.insert(language.clone(), extracted);
        if *language != config.pivot_language {
            let (kept, dropped) = filter_developer_comments(lines, &patterns.denylist);
            stages.dropped_comments.insert(language.clone(), dropped.len() as u64);
            lines = kept;
        } else {
            stages.dropped_comments.insert(language.clone(), 0);
        }
        per_language.insert(language.clone(), lines);
    }

    let aligned = align(&per_language, config)?;
    stages.aligned = label_counts(aligned.iter().map(|l| &l.label));

    let balanced = balance(aligned, config.persuade_fraction, config.seed)?;
    stages.balanced = label_counts(balanced.lines.iter().map(|l| &l.label));
    let splits = assign_splits(&balanced.lines, config.split_fractions, config.seed)?;

    let mut records = Vec::new();
    for line in &balanced.lines {
        let split = splits[&line.key()];
        for (language, text) in &line.texts {
            for (i, sentence) in sentence_tokenize(text, language).into_iter().enumerate() {
                records.push(SentenceRecord {
                    str_ref: line.str_ref,
                    game_id: line.game_id.clone(),
                    language: language.clone(),
                    sentence_index: i as u32,
                    text: sentence,
                    label: line.label,
                    split,
                });
            }
        }
    }
    sort_records(&mut records);

    let sources = games
        .iter()
        .map(|g| GameSource {
            id: g.game_id.clone(),
            entries: g.tables.iter().map(|(l, t)| (l.clone(), t.len() as u64)).collect(),
            sources: g.sources.clone(),
        })
        .collect();
    let manifest = DatasetManifest::new(config.clone(), sources, stages, balanced.warning.into_iter().collect(), &records);
    Ok((records, manifest))
}
