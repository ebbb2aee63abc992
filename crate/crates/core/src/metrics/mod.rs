//! Binary classification metrics with persuade as the positive class.
//!
//! A ratio whose denominator is zero is reported as 0.0 and its cell name is
//! added to [`MetricsReport::zero_division`]; renderers mark such cells with
//! `*`.

mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::Label;

pub use render::{render_report, render_reports};

pub const REPORT_SCHEMA_VERSION: &str = "persuasion-metrics/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{predictions} predictions for {golds} gold labels")]
    LengthMismatch { predictions: usize, golds: usize },
    #[error("no predictions to score")]
    EmptyInput,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
}

pub fn confusion(predictions: &[Label], golds: &[Label]) -> Result<ConfusionMatrix, MetricsError> {
    if predictions.len() != golds.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    if predictions.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut m = ConfusionMatrix::default();
    for (p, g) in predictions.iter().zip(golds) {
        match (p, g) {
            (Label::Persuade, Label::Persuade) => m.tp += 1,
            (Label::Persuade, Label::NonPersuade) => m.fp += 1,
            (Label::NonPersuade, Label::Persuade) => m.fn_ += 1,
            (Label::NonPersuade, Label::NonPersuade) => m.tn += 1,
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// The metric suite of one evaluation run. `config` and `assumptions` carry
/// whatever the producer wants to stamp on the report (hyperparameters,
/// non-default settings); they are not interpreted here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub schema_version: String,
    #[serde(default)]
    pub model: String,
    #[serde(default)]
    pub language: String,
    #[serde(default)]
    pub split: String,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub persuade: ClassMetrics,
    pub no_persuade: ClassMetrics,
    pub confusion: ConfusionMatrix,
    /// Cells computed as 0/0, e.g. `"persuade.precision"`.
    #[serde(default)]
    pub zero_division: Vec<String>,
    #[serde(default)]
    pub config: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub assumptions: Vec<String>,
}

struct Ratios<'a> {
    flags: &'a mut Vec<String>,
}

impl Ratios<'_> {
    fn ratio(&mut self, num: f64, den: f64, cell: &str) -> f64 {
        if den == 0.0 {
            self.flags.push(cell.to_string());
            0.0
        } else {
            num / den
        }
    }

    fn class(&mut self, hit: u64, predicted: u64, actual: u64, name: &str) -> ClassMetrics {
        let precision = self.ratio(hit as f64, predicted as f64, &format!("{name}.precision"));
        let recall = self.ratio(hit as f64, actual as f64, &format!("{name}.recall"));
        let f1 = self.ratio(2.0 * precision * recall, precision + recall, &format!("{name}.f1"));
        ClassMetrics {
            precision,
            recall,
            f1,
            support: actual,
        }
    }
}

pub fn metrics(m: &ConfusionMatrix) -> Result<MetricsReport, MetricsError> {
    let total = m.total();
    if total == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let mut flags = Vec::new();
    let mut r = Ratios { flags: &mut flags };
    let persuade = r.class(m.tp, m.tp + m.fp, m.tp + m.fn_, "persuade");
    let no_persuade = r.class(m.tn, m.tn + m.fn_, m.tn + m.fp, "no_persuade");
    let total_f = total as f64;
    let accuracy = (m.tp + m.tn) as f64 / total_f;
    let macro_f1 = (persuade.f1 + no_persuade.f1) / 2.0;
    let weighted_f1 =
        (persuade.f1 * persuade.support as f64 + no_persuade.f1 * no_persuade.support as f64) / total_f;
    Ok(MetricsReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        model: String::new(),
        language: String::new(),
        split: String::new(),
        accuracy,
        macro_f1,
        weighted_f1,
        persuade,
        no_persuade,
        confusion: *m,
        zero_division: flags,
        config: BTreeMap::new(),
        assumptions: Vec::new(),
    })
}

impl MetricsReport {
    pub fn is_flagged(&self, cell: &str) -> bool {
        self.zero_division.iter().any(|c| c == cell)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
