use std::sync::OnceLock;

use regex::Regex;

use super::{Label, PipelineError};

/// Compiled tag patterns and developer-comment denylist.
#[derive(Debug, Clone)]
pub struct Patterns {
    pub tags: Vec<Regex>,
    pub denylist: Vec<Regex>,
}

fn compile_all(patterns: &[String]) -> Result<Vec<Regex>, PipelineError> {
    patterns
        .iter()
        .map(|p| {
            Regex::new(p).map_err(|source| PipelineError::InvalidPattern {
                pattern: p.clone(),
                source,
            })
        })
        .collect()
}

impl Patterns {
    pub fn compile(tags: &[String], denylist: &[String]) -> Result<Self, PipelineError> {
        Ok(Self {
            tags: compile_all(tags)?,
            denylist: compile_all(denylist)?,
        })
    }

    pub fn from_config(config: &super::PipelineConfig) -> Result<Self, PipelineError> {
        Self::compile(&config.tag_patterns, &config.comment_denylist)
    }
}

/// Canonical tag name: first `/`-separated component of the bracket body,
/// with any persuasion variant folded to `Persuade`.
fn normalize_tag(matched: &str) -> String {
    let inner = matched.trim().trim_start_matches('[').trim_end_matches(']');
    let head = inner.split('/').next().unwrap_or("").trim();
    if head.to_lowercase().starts_with("persua") {
        "Persuade".to_string()
    } else {
        head.to_string()
    }
}

/// Labels a raw line by its persuasion tags. Tags are reported normalized and
/// deduplicated, in order of first appearance.
pub fn detect_label(raw_text: &str, tag_patterns: &[Regex]) -> (Label, Vec<String>) {
    let mut hits: Vec<(usize, String)> = tag_patterns
        .iter()
        .flat_map(|re| re.find_iter(raw_text).map(|m| (m.start(), normalize_tag(m.as_str()))))
        .collect();
    hits.sort();
    let mut tags: Vec<String> = Vec::new();
    for (_, t) in hits {
        if !tags.contains(&t) {
            tags.push(t);
        }
    }
    if tags.is_empty() {
        (Label::NonPersuade, tags)
    } else {
        (Label::Persuade, tags)
    }
}

fn bracket_tag() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[[^\[\]]*\]").unwrap())
}

fn markup() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"</?[A-Za-z][A-Za-z0-9_.:-]*(?:\s[^<>]*)?/?>").unwrap())
}

/// Removes bracketed tags (`[Persuade]`, `[Lie]`, ...) and element-like
/// markup (`</string>`, `<StartCheck>`), then collapses whitespace.
pub fn strip_tags_and_markup(raw_text: &str) -> String {
    let no_markup = markup().replace_all(raw_text, " ");
    let no_tags = bracket_tag().replace_all(&no_markup, " ");
    no_tags.split_whitespace().collect::<Vec<_>>().join(" ")
}
