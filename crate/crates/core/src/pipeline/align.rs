use std::collections::{BTreeMap, BTreeSet};

use super::{AlignedLine, DialogLine, LineKey, PipelineConfig, PipelineError};

/// Joins lines across languages on `(game, StrRef)`.
///
/// Only keys present in every configured language survive, and only when no
/// language's clean text is empty. The label comes from the pivot language.
/// Output is sorted by key.
pub fn align(
    per_language: &BTreeMap<String, Vec<DialogLine>>,
    config: &PipelineConfig,
) -> Result<Vec<AlignedLine>, PipelineError> {
    let mut indexed: BTreeMap<&str, BTreeMap<LineKey, &DialogLine>> = BTreeMap::new();
    for language in &config.languages {
        let lines = per_language.get(language).map(Vec::as_slice).unwrap_or(&[]);
        let mut by_key = BTreeMap::new();
        for line in lines {
            if by_key.insert(line.key(), line).is_some() {
                return Err(PipelineError::DuplicateStrRef {
                    game_id: line.game_id.clone(),
                    language: language.clone(),
                    str_ref: line.str_ref,
                });
            }
        }
        indexed.insert(language.as_str(), by_key);
    }

    let pivot = &indexed[config.pivot_language.as_str()];
    let mut common: BTreeSet<&LineKey> = pivot.keys().collect();
    for by_key in indexed.values() {
        common.retain(|k| by_key.contains_key(*k));
    }

    let mut out = Vec::with_capacity(common.len());
    'lines: for key in common {
        let mut texts = BTreeMap::new();
        for language in &config.languages {
            let line = indexed[language.as_str()][key];
            if line.clean_text.is_empty() {
                continue 'lines;
            }
            texts.insert(language.clone(), line.clean_text.clone());
        }
        out.push(AlignedLine {
            str_ref: key.str_ref,
            game_id: key.game_id.clone(),
            label: pivot[key].label,
            texts,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Label;

    fn line(lang: &str, str_ref: u32, text: &str, label: Label) -> DialogLine {
        DialogLine {
            str_ref,
            game_id: "g".into(),
            language: lang.into(),
            raw_text: text.into(),
            clean_text: text.into(),
            label,
            matched_tags: if label == Label::Persuade { vec!["Persuade".into()] } else { vec![] },
        }
    }

    fn config(langs: &[&str]) -> PipelineConfig {
        PipelineConfig {
            languages: langs.iter().map(|s| s.to_string()).collect(),
            pivot_language: langs[0].into(),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn intersection_of_refs() {
        let mut m = BTreeMap::new();
        m.insert("en".into(), (1..=3).map(|r| line("en", r, "x", Label::NonPersuade)).collect());
        m.insert("de".into(), (2..=4).map(|r| line("de", r, "y", Label::NonPersuade)).collect());
        let out = align(&m, &config(&["en", "de"])).unwrap();
        assert_eq!(out.iter().map(|a| a.str_ref).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(out[0].texts.keys().collect::<Vec<_>>(), vec!["de", "en"]);
    }

    #[test]
    fn label_comes_from_pivot() {
        let mut m = BTreeMap::new();
        m.insert("en".into(), vec![line("en", 7, "Trust me.", Label::Persuade)]);
        m.insert("fr".into(), vec![line("fr", 7, "Faites-moi confiance.", Label::NonPersuade)]);
        let out = align(&m, &config(&["en", "fr"])).unwrap();
        assert_eq!(out[0].label, Label::Persuade);
    }

    #[test]
    fn single_language_is_identity() {
        let lines: Vec<_> = (0..5).map(|r| line("en", r, "a", Label::NonPersuade)).collect();
        let mut m = BTreeMap::new();
        m.insert("en".into(), lines.clone());
        let out = align(&m, &config(&["en"])).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().zip(&lines).all(|(a, l)| a.str_ref == l.str_ref && a.texts["en"] == l.clean_text));
    }

    #[test]
    fn empty_text_in_any_language_excludes_line() {
        let mut m = BTreeMap::new();
        m.insert("en".into(), vec![line("en", 1, "a", Label::NonPersuade), line("en", 2, "b", Label::NonPersuade)]);
        m.insert("de".into(), vec![line("de", 1, "", Label::NonPersuade), line("de", 2, "c", Label::NonPersuade)]);
        let out = align(&m, &config(&["en", "de"])).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].str_ref, 2);
    }

    #[test]
    fn duplicate_ref_is_an_error() {
        let mut m = BTreeMap::new();
        m.insert("en".into(), vec![line("en", 1, "a", Label::NonPersuade), line("en", 1, "b", Label::NonPersuade)]);
        assert!(matches!(
            align(&m, &config(&["en"])),
            Err(PipelineError::DuplicateStrRef { str_ref: 1, .. })
        ));
    }

    #[test]
    fn games_are_namespaced() {
        let mut a = line("en", 1, "a", Label::NonPersuade);
        let mut b = line("en", 1, "b", Label::Persuade);
        a.game_id = "kotor1".into();
        b.game_id = "kotor2".into();
        let mut m = BTreeMap::new();
        m.insert("en".into(), vec![b, a]);
        let out = align(&m, &config(&["en"])).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].game_id, "kotor1");
    }
}
