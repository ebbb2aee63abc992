use std::collections::BTreeMap;

use log::warn;

use super::rng::{StreamRng, BALANCE_STREAM, SPLIT_STREAM};
use super::{AlignedLine, Label, LineKey, PipelineError, Split};

// absorbs representation error in products like 100 * 0.8 / 0.2
const FLOOR_SLACK: f64 = 1e-9;

fn floor_count(x: f64) -> usize {
    (x + FLOOR_SLACK).floor().max(0.0) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct Balanced {
    /// Sorted by key.
    pub lines: Vec<AlignedLine>,
    /// Set when the target fraction needed no subsampling.
    pub warning: Option<String>,
}

/// Keeps every persuade line and `floor(P·(1−f)/f)` non-persuade lines drawn
/// uniformly without replacement, so persuade lines make up about `f` of the
/// result.
pub fn balance(
    mut aligned: Vec<AlignedLine>,
    persuade_fraction: f64,
    seed: u64,
) -> Result<Balanced, PipelineError> {
    aligned.sort_by_key(AlignedLine::key);
    let (persuade, mut other): (Vec<_>, Vec<_>) =
        aligned.into_iter().partition(|l| l.label == Label::Persuade);
    if persuade.is_empty() {
        return Err(PipelineError::EmptyClass(Label::Persuade));
    }
    if other.is_empty() {
        return Err(PipelineError::EmptyClass(Label::NonPersuade));
    }

    let f = persuade_fraction;
    let target = floor_count(persuade.len() as f64 * (1.0 - f) / f);
    let mut warning = None;
    if target >= other.len() {
        let msg = format!(
            "persuade fraction {f} is not below the actual persuade share {}/{}; kept all lines",
            persuade.len(),
            persuade.len() + other.len()
        );
        warn!("{msg}");
        warning = Some(msg);
    } else {
        StreamRng::new(seed, BALANCE_STREAM).shuffle(&mut other);
        other.truncate(target);
    }

    let mut lines = persuade;
    lines.append(&mut other);
    lines.sort_by_key(AlignedLine::key);
    Ok(Balanced { lines, warning })
}

/// Line counts per split for `n` lines: validation and test get
/// `floor(n·f)`, train gets the rest.
pub fn split_counts(n: usize, fractions: [f64; 3]) -> [usize; 3] {
    let validation = floor_count(n as f64 * fractions[1]);
    let test = floor_count(n as f64 * fractions[2]);
    let train = n.saturating_sub(validation + test);
    [train, validation, test]
}

/// Shuffles the keys of `lines` (sorted first) and cuts the permutation into
/// train, validation and test blocks sized by [`split_counts`].
pub fn assign_splits(
    lines: &[AlignedLine],
    fractions: [f64; 3],
    seed: u64,
) -> Result<BTreeMap<LineKey, Split>, PipelineError> {
    if lines.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let mut keys: Vec<LineKey> = lines.iter().map(AlignedLine::key).collect();
    keys.sort();
    keys.dedup();
    StreamRng::new(seed, SPLIT_STREAM).shuffle(&mut keys);

    let [train, validation, _] = split_counts(keys.len(), fractions);
    Ok(keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let split = if i < train {
                Split::Train
            } else if i < train + validation {
                Split::Validation
            } else {
                Split::Test
            };
            (k, split)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(persuade: u32, other: u32) -> Vec<AlignedLine> {
        (0..persuade + other)
            .map(|i| AlignedLine {
                str_ref: i,
                game_id: "g".into(),
                label: if i < persuade { Label::Persuade } else { Label::NonPersuade },
                texts: [("en".to_string(), format!("line {i}"))].into(),
            })
            .collect()
    }

    fn count(ls: &[AlignedLine], label: Label) -> usize {
        ls.iter().filter(|l| l.label == label).count()
    }

    #[test]
    fn subsamples_to_target() {
        let b = balance(lines(100, 1000), 0.2, 42).unwrap();
        assert_eq!(count(&b.lines, Label::Persuade), 100);
        assert_eq!(count(&b.lines, Label::NonPersuade), 400);
        assert!(b.warning.is_none());
        assert!(b.lines.windows(2).all(|w| w[0].key() < w[1].key()));
    }

    #[test]
    fn empty_class() {
        assert!(matches!(balance(lines(0, 10), 0.2, 42), Err(PipelineError::EmptyClass(Label::Persuade))));
        assert!(matches!(balance(lines(3, 0), 0.2, 42), Err(PipelineError::EmptyClass(Label::NonPersuade))));
    }

    #[test]
    fn already_at_target_keeps_all_with_warning() {
        let b = balance(lines(10, 10), 0.5, 42).unwrap();
        assert_eq!(b.lines.len(), 20);
        assert!(b.warning.is_some());
    }

    #[test]
    fn seed_changes_selection_not_counts() {
        let a = balance(lines(50, 500), 0.2, 1).unwrap();
        let b = balance(lines(50, 500), 0.2, 2).unwrap();
        assert_eq!(a.lines.len(), b.lines.len());
        assert_ne!(a.lines, b.lines);
    }

    #[test]
    fn split_sizes() {
        assert_eq!(split_counts(100, [0.7, 0.15, 0.15]), [70, 15, 15]);
        assert_eq!(split_counts(7, [0.7, 0.15, 0.15]), [5, 1, 1]);
        assert_eq!(split_counts(1, [0.7, 0.15, 0.15]), [1, 0, 0]);
        let m = assign_splits(&lines(30, 70), [0.7, 0.15, 0.15], 42).unwrap();
        let n = |s| m.values().filter(|&&v| v == s).count();
        assert_eq!((n(Split::Train), n(Split::Validation), n(Split::Test)), (70, 15, 15));
    }

    #[test]
    fn splits_are_deterministic_and_order_independent() {
        let ls = lines(10, 90);
        let a = assign_splits(&ls, [0.7, 0.15, 0.15], 42).unwrap();
        let mut rev = ls.clone();
        rev.reverse();
        assert_eq!(a, assign_splits(&rev, [0.7, 0.15, 0.15], 42).unwrap());
        assert_ne!(a, assign_splits(&ls, [0.7, 0.15, 0.15], 43).unwrap());
    }

    #[test]
    fn empty_split_input() {
        assert!(matches!(assign_splits(&[], [0.7, 0.15, 0.15], 42), Err(PipelineError::EmptyInput)));
    }
}
