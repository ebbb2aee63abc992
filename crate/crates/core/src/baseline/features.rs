use std::collections::{BTreeMap, BTreeSet};

/// `(column, count)` pairs, sorted by column, no zero counts.
pub type SparseVector = Vec<(usize, f64)>;

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Lowercased alphanumeric runs. Apostrophes inside a word are kept
/// (`didn't`), leading and trailing ones are dropped.
pub fn word_tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || is_apostrophe(c)))
        .map(|t| t.trim_matches(is_apostrophe))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Unigrams followed by space-joined adjacent bigrams.
pub fn ngrams(text: &str) -> Vec<String> {
    let tokens = word_tokens(text);
    let bigrams: Vec<String> = tokens.windows(2).map(|w| format!("{} {}", w[0], w[1])).collect();
    let mut out = tokens;
    out.extend(bigrams);
    out
}

/// Feature string to column index, indices assigned in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVocab {
    features: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl FeatureVocab {
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let set: BTreeSet<String> = texts.into_iter().flat_map(ngrams).collect();
        Self::from_features(set.into_iter().collect()).expect("sorted unique features")
    }

    /// Rebuilds a vocab from its column list; the list must be strictly
    /// increasing.
    pub fn from_features(features: Vec<String>) -> Result<Self, String> {
        if let Some(w) = features.windows(2).find(|w| w[0] >= w[1]) {
            return Err(format!("features not strictly sorted at {:?} / {:?}", w[0], w[1]));
        }
        let index = features.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        Ok(Self { features, index })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn get(&self, feature: &str) -> Option<usize> {
        self.index.get(feature).copied()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }
}

/// Counts of in-vocabulary n-grams of `text`.
pub fn featurize(text: &str, vocab: &FeatureVocab) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for g in ngrams(text) {
        if let Some(i) = vocab.get(&g) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    counts.into_iter().collect()
}
