//! Bag-of-n-grams logistic regression for persuade vs non_persuade.
//!
//! Features are lowercased word unigrams and adjacent bigrams counted per
//! sentence. Training is full-batch gradient descent on the mean logistic
//! loss plus `l2/2 · ‖w‖²` (the bias is not regularized), starting from
//! zero, so a run is a pure function of the data and hyperparameters.

mod features;
mod model;

pub use features::{featurize, ngrams, word_tokens, FeatureVocab, SparseVector};
pub use model::{
    evaluate, objective, predict, train_baseline, train_with_validation, BaselineError, BaselineModel,
    Example, Hyperparams, Prediction, Trained, MODEL_FORMAT,
};
