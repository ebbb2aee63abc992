//! Generators and independent checkers shared by the integration tests and
//! the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use persuasion_corpus::baseline::{objective, Example};
use persuasion_corpus::dataset::DatasetManifest;
use persuasion_corpus::pipeline::rng::StreamRng;
use persuasion_corpus::pipeline::{GameTables, Label, PipelineConfig, SentenceRecord, Split};
use persuasion_corpus::tlk::{TalkTable, TlkEntry, FLAG_SOUND_LENGTH_PRESENT, FLAG_SOUND_PRESENT, FLAG_TEXT_PRESENT};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub struct Gen(StreamRng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(StreamRng::new(seed, 99))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.below(n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + self.below(hi_inclusive - lo + 1)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }

    pub fn bytes(&mut self, len: usize) -> Vec<u8> {
        (0..len).map(|_| self.0.next_u64() as u8).collect()
    }
}

// Characters every Windows-1252 table can hold, including the 0x80..0x9F
// specials and Latin-1 letters.
const TEXT_CHARS: &[char] = &[
    'a', 'b', 'e', 'k', 'z', 'A', 'Q', ' ', ' ', '.', '?', '!', ',', '\'', '"', '[', ']', '<', '>', '&', '\n', '\t',
    '\r', '0', '9', 'é', 'ü', 'ß', 'Ñ', '¿', '¡', '«', '»', '€', '…', '“', '”', '‘', '’', '–', '—', 'œ', 'Ž', '™',
    '\u{1}', '\u{7f}',
];

const RESREF_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";

pub fn random_text(g: &mut Gen, max_len: usize) -> String {
    let len = g.range(0, max_len);
    (0..len).map(|_| *g.pick(TEXT_CHARS)).collect()
}

/// A table that `write_tlk` accepts under the default codepages and that
/// `parse_tlk` must reproduce exactly.
pub fn random_table(g: &mut Gen) -> TalkTable {
    let count = if g.chance(0.05) { 0 } else { g.range(1, 40) };
    let entries = (0..count)
        .map(|_| {
            let mut flags = 0;
            if g.chance(0.85) {
                flags |= FLAG_TEXT_PRESENT;
            }
            if g.chance(0.3) {
                flags |= FLAG_SOUND_PRESENT;
            }
            if g.chance(0.3) {
                flags |= FLAG_SOUND_LENGTH_PRESENT;
            }
            if g.chance(0.02) {
                flags |= 0x80;
            }
            let text = if flags & FLAG_TEXT_PRESENT != 0 { random_text(g, 60) } else { String::new() };
            let resref_len = if g.chance(0.5) { 0 } else { g.range(1, 16) };
            let sound_resref = (0..resref_len).map(|_| *g.pick(RESREF_CHARS) as char).collect();
            let lengths = [0.0f32, 0.5, 1.25, 3.75, 100.0, 1e-3];
            TlkEntry {
                flags,
                text,
                sound_resref,
                volume_variance: if g.chance(0.8) { 0 } else { g.range(0, 1 << 20) as u32 },
                pitch_variance: if g.chance(0.8) { 0 } else { g.range(0, 1 << 20) as u32 },
                sound_length: *g.pick(&lengths),
            }
        })
        .collect();
    TalkTable {
        language_id: *g.pick(&[0u32, 1, 2, 3, 4, 128]),
        entries,
    }
}

/// Byte strings biased towards almost-valid talk tables.
pub fn fuzz_input(g: &mut Gen, valid: &[Vec<u8>]) -> Vec<u8> {
    match g.below(4) {
        0 => {
            let len = g.range(0, 200);
            g.bytes(len)
        }
        1 => {
            let mut b = b"TLK V3.0".to_vec();
            let len = g.range(0, 200);
            b.extend(g.bytes(len));
            b
        }
        2 => {
            let mut b = g.pick(valid).clone();
            let flips = g.range(1, 8);
            for _ in 0..flips {
                if b.is_empty() {
                    break;
                }
                let i = g.below(b.len());
                b[i] = g.bytes(1)[0];
            }
            b
        }
        _ => {
            let mut b = g.pick(valid).clone();
            let cut = g.range(0, b.len());
            b.truncate(cut);
            b
        }
    }
}

pub const LANGUAGES: [&str; 5] = ["en", "es", "de", "fr", "it"];

/// Pipeline input with its intended outcome, so checks do not rely on the
/// code under test to know which lines are persuasive.
pub struct PipelineCase {
    pub games: Vec<GameTables>,
    pub config: PipelineConfig,
    /// Label the pivot text was written to carry.
    pub truth: BTreeMap<(String, u32), Label>,
}

const PERSUADE_TAGS: [&str; 6] = ["[Persuade]", "[PERSUADE]", "[Persuade/Lie]", "[Persuasion]", "[ persuade ]", "[Persuade: Easy]"];
const OTHER_TAGS: [&str; 4] = ["[Lie]", "[Intimidate]", "[Success]", "[Force Persuade Failure]"];
const WORDS: [&str; 12] = ["droid", "hangar", "master", "credits", "temple", "ship", "help", "truth", "door", "way", "friend", "Mr."];
const MARKUP: [&str; 4] = ["<CUSTOM0>", "<FullName>", "<StartAction>", "</Start>"];

fn sentence(g: &mut Gen, language: &str) -> String {
    let n = g.range(2, 7);
    let mut words: Vec<String> = (0..n).map(|_| g.pick(&WORDS).to_string()).collect();
    words[0] = format!("{}{}", language.to_uppercase(), words[0]);
    let end = *g.pick(&[".", "?", "!", "..."]);
    format!("{}{end}", words.join(" "))
}

fn line_body(g: &mut Gen, language: &str) -> String {
    let sentences = g.range(1, 3);
    let mut parts: Vec<String> = (0..sentences).map(|_| sentence(g, language)).collect();
    if g.chance(0.2) {
        let i = g.below(parts.len());
        parts[i] = format!("{} {}", g.pick(&MARKUP), parts[i]);
    }
    parts.join(" ")
}

/// Multi-game, five-language input. Every game has enough plain lines that
/// balancing to `persuade_fraction` always subsamples.
pub fn random_pipeline_case(g: &mut Gen) -> PipelineCase {
    let mut config = PipelineConfig {
        languages: LANGUAGES.iter().map(|s| s.to_string()).collect(),
        seed: g.0.next_u64(),
        ..PipelineConfig::default()
    };
    let train = 0.5 + 0.3 * g.unit();
    let val = (1.0 - train) * (0.3 + 0.4 * g.unit());
    config.split_fractions = [train, val, 1.0 - train - val];

    let mut truth = BTreeMap::new();
    let mut games = Vec::new();
    for gi in 0..g.range(1, 3) {
        let game_id = format!("game{gi}");
        let persuade = g.range(3, 15);
        let plain = persuade * 8 + g.range(1, 40);
        let mut labels: Vec<Label> = (0..persuade)
            .map(|_| Label::Persuade)
            .chain((0..plain).map(|_| Label::NonPersuade))
            .collect();
        g.0.shuffle(&mut labels);

        let mut tables: BTreeMap<String, TalkTable> =
            LANGUAGES.iter().map(|l| (l.to_string(), TalkTable::new(0))).collect();
        for label in &labels {
            let str_ref = tables["en"].len() as u32;
            // a few entries carry no text at all
            if g.chance(0.05) {
                for t in tables.values_mut() {
                    t.entries.push(TlkEntry::default());
                }
                continue;
            }
            for language in LANGUAGES {
                let mut text = line_body(g, language);
                if *label == Label::Persuade {
                    let tag = if language == "en" { g.pick(&PERSUADE_TAGS).to_string() } else { format!("[{}]", language.to_uppercase()) };
                    text = format!("{tag} {text}");
                } else if g.chance(0.15) {
                    text = format!("{} {text}", g.pick(&OTHER_TAGS));
                }
                if language != "en" && g.chance(0.03) {
                    text = format!("DO NOT TRANSLATE {text}");
                }
                if language != "en" && g.chance(0.02) {
                    // missing translation
                    tables.get_mut(language).unwrap().entries.push(TlkEntry::default());
                    continue;
                }
                tables.get_mut(language).unwrap().entries.push(TlkEntry::text(text));
            }
            truth.insert((game_id.clone(), str_ref), *label);
        }
        games.push(GameTables {
            game_id,
            tables,
            sources: BTreeMap::new(),
        });
    }
    PipelineCase { games, config, truth }
}

/// Checks corpus invariants from the records alone plus the generator's
/// ground truth. Returns the first violation.
pub fn check_pipeline_invariants(case: &PipelineCase, records: &[SentenceRecord], manifest: &DatasetManifest) -> Result<(), String> {
    let config = &case.config;
    if records.is_empty() {
        return Err("no records".into());
    }
    // keys per (language, split)
    let mut keys: BTreeMap<(&str, Split), BTreeSet<(String, u32)>> = BTreeMap::new();
    let mut split_of: BTreeMap<(&str, (String, u32)), Split> = BTreeMap::new();
    let mut line_label: BTreeMap<(String, u32), Label> = BTreeMap::new();
    for r in records {
        let key = (r.game_id.clone(), r.str_ref);
        keys.entry((r.language.as_str(), r.split)).or_default().insert(key.clone());
        if let Some(prev) = split_of.insert((r.language.as_str(), key.clone()), r.split) {
            if prev != r.split {
                return Err(format!("line {key:?} in {} appears in {prev} and {}", r.language, r.split));
            }
        }
        // label inheritance from the pivot text's intended label
        let truth = case.truth.get(&key).ok_or_else(|| format!("record for unknown line {key:?}"))?;
        if r.label != *truth {
            return Err(format!("{key:?} in {} labelled {} but pivot says {}", r.language, r.label, truth));
        }
        line_label.insert(key, r.label);
        // tag and markup free
        let lower = r.text.to_lowercase();
        if r.text.contains('[') || r.text.contains(']') || lower.contains("persua") {
            return Err(format!("tag left in {:?}", r.text));
        }
        for m in MARKUP {
            if r.text.contains(m) {
                return Err(format!("markup left in {:?}", r.text));
            }
        }
        if r.text.trim().is_empty() || r.text.trim() != r.text {
            return Err(format!("untrimmed or empty sentence {:?}", r.text));
        }
        if r.language != "en" && lower.contains("do not translate") {
            return Err(format!("developer comment survived: {:?}", r.text));
        }
    }
    // cross-language agreement
    for split in Split::ALL {
        let sets: Vec<&BTreeSet<(String, u32)>> = config
            .languages
            .iter()
            .map(|l| keys.get(&(l.as_str(), split)))
            .map(|s| s.unwrap_or_else(|| empty()))
            .collect();
        if sets.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("languages disagree on the {split} split"));
        }
    }
    // disjointness within a language
    for l in &config.languages {
        let mut seen = BTreeSet::new();
        for split in Split::ALL {
            for k in keys.get(&(l.as_str(), split)).unwrap_or_else(|| empty()) {
                if !seen.insert(k) {
                    return Err(format!("{k:?} in more than one split for {l}"));
                }
            }
        }
    }
    // balance bound over lines
    if !manifest.warnings.is_empty() {
        return Err(format!("unexpected warnings {:?}", manifest.warnings));
    }
    let n = line_label.len() as f64;
    let p = line_label.values().filter(|l| **l == Label::Persuade).count() as f64;
    let fraction = p / n;
    if (fraction - config.persuade_fraction).abs() > 1.0 / n {
        return Err(format!("persuade share {fraction} vs target {} with n = {n}", config.persuade_fraction));
    }
    // every intended persuade line whose translations all survive is kept
    if manifest.stages.balanced.persuade != manifest.stages.aligned.persuade {
        return Err("balancing dropped persuade lines".into());
    }
    Ok(())
}

fn empty() -> &'static BTreeSet<(String, u32)> {
    static EMPTY: BTreeSet<(String, u32)> = BTreeSet::new();
    &EMPTY
}

/// Metrics recomputed from raw pairs, persuade positive, 0/0 as 0.
pub struct OracleMetrics {
    pub accuracy: f64,
    pub precision: [f64; 2],
    pub recall: [f64; 2],
    pub f1: [f64; 2],
    pub support: [u64; 2],
    pub macro_f1: f64,
    pub weighted_f1: f64,
}

pub fn oracle_metrics(pairs: &[(Label, Label)]) -> OracleMetrics {
    let classes = [Label::Persuade, Label::NonPersuade];
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let mut precision = [0.0; 2];
    let mut recall = [0.0; 2];
    let mut f1 = [0.0; 2];
    let mut support = [0; 2];
    for (i, c) in classes.iter().enumerate() {
        let predicted = pairs.iter().filter(|(p, _)| p == c).count() as f64;
        let actual = pairs.iter().filter(|(_, g)| g == c).count();
        let hit = pairs.iter().filter(|(p, g)| p == c && g == c).count() as f64;
        precision[i] = div(hit, predicted);
        recall[i] = div(hit, actual as f64);
        f1[i] = div(2.0 * precision[i] * recall[i], precision[i] + recall[i]);
        support[i] = actual as u64;
    }
    let total = pairs.len() as f64;
    let correct = pairs.iter().filter(|(p, g)| p == g).count() as f64;
    OracleMetrics {
        accuracy: correct / total,
        precision,
        recall,
        f1,
        support,
        macro_f1: (f1[0] + f1[1]) / 2.0,
        weighted_f1: (f1[0] * support[0] as f64 + f1[1] * support[1] as f64) / total,
    }
}

pub fn random_pairs(g: &mut Gen) -> Vec<(Label, Label)> {
    let n = g.range(1, 300);
    let bias_p = g.unit();
    let bias_g = g.unit();
    (0..n)
        .map(|_| {
            let pick = |u: f64, b: f64| if u < b { Label::Persuade } else { Label::NonPersuade };
            (pick(g.unit(), bias_p), pick(g.unit(), bias_g))
        })
        .collect()
}

/// Random small logistic problem: weights, bias, examples, l2.
pub fn random_problem(g: &mut Gen) -> (Vec<f64>, f64, Vec<Example>, f64) {
    let dim = g.range(1, 8);
    let weights: Vec<f64> = (0..dim).map(|_| 2.0 * g.unit() - 1.0).collect();
    let bias = 2.0 * g.unit() - 1.0;
    let examples = (0..g.range(1, 12))
        .map(|_| {
            let mut features = Vec::new();
            for i in 0..dim {
                if g.chance(0.6) {
                    features.push((i, g.range(1, 3) as f64));
                }
            }
            Example {
                features,
                target: if g.chance(0.4) { 1.0 } else { 0.0 },
            }
        })
        .collect();
    let l2 = *g.pick(&[0.0, 1e-4, 0.01, 0.5]);
    (weights, bias, examples, l2)
}

/// Largest relative difference, over all coordinates, between the analytic
/// gradient and central differences of the objective, measured as
/// `‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖, 1e-12)`.
pub fn gradient_relative_error(weights: &[f64], bias: f64, examples: &[Example], l2: f64) -> f64 {
    let h = 1e-5;
    let loss = |w: &[f64], b: f64| objective(w, b, examples, l2).0;
    let (_, grad_w, grad_b) = objective(weights, bias, examples, l2);
    let mut analytic = grad_w.clone();
    analytic.push(grad_b);

    let mut numeric = Vec::with_capacity(analytic.len());
    for i in 0..weights.len() {
        let mut plus = weights.to_vec();
        let mut minus = weights.to_vec();
        plus[i] += h;
        minus[i] -= h;
        numeric.push((loss(&plus, bias) - loss(&minus, bias)) / (2.0 * h));
    }
    numeric.push((loss(weights, bias + h) - loss(weights, bias - h)) / (2.0 * h));

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, n)| a - n).collect();
    norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-12)
}
