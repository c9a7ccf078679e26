//! Path-based and distributional baselines: logistic regression over sparse
//! path features (with or without generalization), over word-vector pair
//! features, and the unsupervised SLQS generality measure.

mod classifiers;
mod distributional;
mod logreg;
mod slqs;

pub use classifiers::{DistClassifier, PathClassifier, Tuning, LAMBDA_GRID};
pub use distributional::{distributional_features, pair_vector, DistMethod};
pub use logreg::{
    logistic_gradient, logistic_objective, predict_logreg, train_logreg, LinearModel, LogRegConfig, Regularization,
    TrainedLogReg,
};
pub use slqs::{slqs_fit, slqs_fit_with, slqs_score, tune_threshold, SlqsConfig, SlqsModel, LEXICAL_SPLIT_THRESHOLD};
