use std::fmt::Write as _;

use super::MetricsReport;

const LABEL_WIDTH: usize = 20;
const MIN_COLUMN: usize = 8;

enum Row {
    Cell(&'static str, &'static str),
    Heading(&'static str),
}

// accuracy and averages first, then one block per class
const ROWS: &[Row] = &[
    Row::Cell("Accuracy", "accuracy"),
    Row::Cell("Macro avg. (F1)", "macro_f1"),
    Row::Cell("Weighted avg. (F1)", "weighted_f1"),
    Row::Heading("persuade"),
    Row::Cell("  Precision", "persuade.precision"),
    Row::Cell("  Recall", "persuade.recall"),
    Row::Cell("  F1-score", "persuade.f1"),
    Row::Heading("no_persuade"),
    Row::Cell("  Precision", "no_persuade.precision"),
    Row::Cell("  Recall", "no_persuade.recall"),
    Row::Cell("  F1-score", "no_persuade.f1"),
];

fn cell_value(r: &MetricsReport, cell: &str) -> f64 {
    match cell {
        "accuracy" => r.accuracy,
        "macro_f1" => r.macro_f1,
        "weighted_f1" => r.weighted_f1,
        "persuade.precision" => r.persuade.precision,
        "persuade.recall" => r.persuade.recall,
        "persuade.f1" => r.persuade.f1,
        "no_persuade.precision" => r.no_persuade.precision,
        "no_persuade.recall" => r.no_persuade.recall,
        "no_persuade.f1" => r.no_persuade.f1,
        _ => unreachable!("unknown cell {cell}"),
    }
}

/// Side-by-side table, one column per `(header, report)`. Values have two
/// decimals; zero-division cells carry a trailing `*`.
pub fn render_reports(columns: &[(&str, &MetricsReport)]) -> String {
    let widths: Vec<usize> = columns
        .iter()
        .map(|(h, _)| h.chars().count().max(MIN_COLUMN))
        .collect();
    let mut out = String::new();
    let _ = write!(out, "{:<LABEL_WIDTH$}", "");
    for ((header, _), w) in columns.iter().zip(&widths) {
        let _ = write!(out, "  {header:>w$} ");
    }
    out.truncate(out.trim_end().len());
    out.push('\n');

    for row in ROWS {
        match row {
            Row::Heading(name) => {
                out.push_str(name);
            }
            Row::Cell(label, cell) => {
                let _ = write!(out, "{label:<LABEL_WIDTH$}");
                for ((_, report), w) in columns.iter().zip(&widths) {
                    let mark = if report.is_flagged(cell) { '*' } else { ' ' };
                    let _ = write!(out, "  {:>w$}{mark}", format!("{:.2}", cell_value(report, cell)));
                }
                out.truncate(out.trim_end().len());
            }
        }
        out.push('\n');
    }
    if columns.iter().any(|(_, r)| !r.zero_division.is_empty()) {
        out.push_str("* undefined ratio (0/0), reported as 0.00\n");
    }
    out
}

/// Single-column table headed by the report's language, or model name.
pub fn render_report(report: &MetricsReport) -> String {
    let header = if !report.language.is_empty() {
        report.language.as_str()
    } else if !report.model.is_empty() {
        report.model.as_str()
    } else {
        "score"
    };
    render_reports(&[(header, report)])
}
