use log::debug;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::features::{featurize, FeatureVocab, SparseVector};
use crate::metrics::{confusion, metrics, MetricsError, MetricsReport};
use crate::pipeline::{Label, SentenceRecord};

pub const MODEL_FORMAT: &str = "persuasion-baseline/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: u32,
    pub l2: f64,
    /// Recorded for provenance; training itself draws no random numbers.
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 200,
            l2: 1e-4,
            seed: 42,
        }
    }
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("training data has no {0} examples")]
    EmptyClass(Label),
    #[error("{which} loss became non-finite at epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { which: &'static str, epoch: u32 },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("invalid model file: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: SparseVector,
    /// 1.0 for persuade, 0.0 otherwise.
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub vocab: FeatureVocab,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: Hyperparams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub model: BaselineModel,
    /// Training objective before the first update and after each epoch.
    pub losses: Vec<f64>,
    /// Mean validation log-loss after each epoch, when monitored.
    pub validation_losses: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Probability of persuade.
    pub probability: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn score(weights: &[f64], bias: f64, x: &SparseVector) -> f64 {
    bias + x.iter().map(|&(i, c)| weights[i] * c).sum::<f64>()
}

fn mean_log_loss(weights: &[f64], bias: f64, examples: &[Example]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    let sum: f64 = examples
        .iter()
        .map(|ex| {
            let z = score(weights, bias, &ex.features);
            softplus(z) - ex.target * z
        })
        .sum();
    sum / examples.len() as f64
}

/// Regularized objective and its gradient `(loss, ∂w, ∂bias)`.
pub fn objective(weights: &[f64], bias: f64, examples: &[Example], l2: f64) -> (f64, Vec<f64>, f64) {
    let n = examples.len().max(1) as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    let mut data_loss = 0.0;
    for ex in examples {
        let z = score(weights, bias, &ex.features);
        data_loss += softplus(z) - ex.target * z;
        let residual = sigmoid(z) - ex.target;
        for &(i, c) in &ex.features {
            grad_w[i] += residual * c;
        }
        grad_b += residual;
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (data_loss / n + penalty, grad_w, grad_b / n)
}

fn examples(records: &[(&str, Label)], vocab: &FeatureVocab) -> Vec<Example> {
    records
        .iter()
        .map(|(text, label)| Example {
            features: featurize(text, vocab),
            target: if *label == Label::Persuade { 1.0 } else { 0.0 },
        })
        .collect()
}

pub fn train_baseline(train: &[(&str, Label)], hyper: Hyperparams) -> Result<Trained, BaselineError> {
    train_with_validation(train, &[], hyper)
}

/// Trains on `train`; `validation` only feeds the divergence check.
pub fn train_with_validation(
    train: &[(&str, Label)],
    validation: &[(&str, Label)],
    hyper: Hyperparams,
) -> Result<Trained, BaselineError> {
    if !(hyper.learning_rate > 0.0 && hyper.learning_rate.is_finite()) {
        return Err(BaselineError::InvalidHyperparams(format!(
            "learning rate {} must be positive",
            hyper.learning_rate
        )));
    }
    if !(hyper.l2 >= 0.0 && hyper.l2.is_finite()) {
        return Err(BaselineError::InvalidHyperparams(format!("l2 {} must be non-negative", hyper.l2)));
    }
    for label in Label::ALL {
        if !train.iter().any(|(_, l)| *l == label) {
            return Err(BaselineError::EmptyClass(label));
        }
    }

    let vocab = FeatureVocab::build(train.iter().map(|(t, _)| *t));
    let train_ex = examples(train, &vocab);
    let val_ex = examples(validation, &vocab);
    let mut weights = vec![0.0; vocab.len()];
    let mut bias = 0.0;
    let mut losses = Vec::with_capacity(hyper.epochs as usize + 1);
    let mut validation_losses = Vec::new();

    for epoch in 0..hyper.epochs {
        let (loss, grad_w, grad_b) = objective(&weights, bias, &train_ex, hyper.l2);
        if !loss.is_finite() {
            return Err(BaselineError::NonFiniteLoss { which: "training", epoch });
        }
        losses.push(loss);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= hyper.learning_rate * g;
        }
        bias -= hyper.learning_rate * grad_b;
        if !val_ex.is_empty() {
            let v = mean_log_loss(&weights, bias, &val_ex);
            if !v.is_finite() {
                return Err(BaselineError::NonFiniteLoss { which: "validation", epoch });
            }
            validation_losses.push(v);
        }
        debug!("epoch {epoch}: training loss {loss:.6}");
    }
    let (final_loss, _, _) = objective(&weights, bias, &train_ex, hyper.l2);
    if !final_loss.is_finite() || !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(BaselineError::NonFiniteLoss {
            which: "training",
            epoch: hyper.epochs,
        });
    }
    losses.push(final_loss);
    debug!("final training loss {final_loss:.6}");

    Ok(Trained {
        model: BaselineModel {
            vocab,
            weights,
            bias,
            hyperparams: hyper,
        },
        losses,
        validation_losses,
    })
}

pub fn predict(model: &BaselineModel, text: &str) -> Prediction {
    let z = score(&model.weights, model.bias, &featurize(text, &model.vocab));
    let probability = sigmoid(z);
    Prediction {
        label: if probability > 0.5 { Label::Persuade } else { Label::NonPersuade },
        probability,
    }
}

/// Scores `records` and builds a report stamped with the model's settings.
pub fn evaluate(model: &BaselineModel, records: &[SentenceRecord]) -> Result<MetricsReport, BaselineError> {
    let predictions: Vec<Label> = records.iter().map(|r| predict(model, &r.text).label).collect();
    let golds: Vec<Label> = records.iter().map(|r| r.label).collect();
    let mut report = metrics(&confusion(&predictions, &golds)?)?;
    report.model = "baseline-logistic-regression".into();
    let h = &model.hyperparams;
    report.config = [
        ("learning_rate", serde_json::json!(h.learning_rate)),
        ("epochs", serde_json::json!(h.epochs)),
        ("l2", serde_json::json!(h.l2)),
        ("seed", serde_json::json!(h.seed)),
        ("features", serde_json::json!(model.vocab.len())),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    Ok(report)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    hyperparams: Hyperparams,
    bias: f64,
    features: Vec<String>,
    weights: Vec<f64>,
}

impl BaselineModel {
    /// JSON model file. Floats are written in shortest round-trip form, so
    /// reloading restores every weight bit for bit.
    pub fn to_bytes(&self) -> Vec<u8> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            hyperparams: self.hyperparams,
            bias: self.bias,
            features: self.vocab.features().to_vec(),
            weights: self.weights.clone(),
        };
        let mut out = serde_json::to_vec_pretty(&file).expect("model serializes");
        out.push(b'\n');
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BaselineError> {
        let file: ModelFile =
            serde_json::from_slice(bytes).map_err(|e| BaselineError::ModelFormat(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(BaselineError::ModelFormat(format!(
                "format {:?}, expected {MODEL_FORMAT:?}",
                file.format
            )));
        }
        if file.features.len() != file.weights.len() {
            return Err(BaselineError::ModelFormat(format!(
                "{} features but {} weights",
                file.features.len(),
                file.weights.len()
            )));
        }
        let vocab = FeatureVocab::from_features(file.features).map_err(BaselineError::ModelFormat)?;
        Ok(Self {
            vocab,
            weights: file.weights,
            bias: file.bias,
            hyperparams: file.hyperparams,
        })
    }
}
