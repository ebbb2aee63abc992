use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::LabelCounts;
use crate::pipeline::SentenceRecord;

/// Sentence counts per language plus the multilingual total.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub languages: BTreeMap<String, LabelCounts>,
    pub total: LabelCounts,
}

pub fn compute_stats(records: &[SentenceRecord]) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for r in records {
        stats.languages.entry(r.language.clone()).or_default().add(r.label, 1);
        stats.total.add(r.label, 1);
    }
    stats
}

/// Table with one row per language and a final multilingual total row.
/// `order` puts listed languages first; others follow alphabetically.
pub fn render_stats(stats: &CorpusStats, order: &[String]) -> String {
    let mut rows: Vec<(&str, LabelCounts)> = order
        .iter()
        .filter_map(|l| stats.languages.get(l).map(|c| (l.as_str(), *c)))
        .collect();
    for (l, c) in &stats.languages {
        if !order.contains(l) {
            rows.push((l, *c));
        }
    }
    rows.push(("Multilingual (total)", stats.total));

    let width = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0).max("Language".len());
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>10}  {:>12}", "Language", "Persuade", "Non-persuade");
    for (l, c) in rows {
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>12}", l, c.persuade, c.non_persuade);
    }
    out
}
