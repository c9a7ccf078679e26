use serde::{Deserialize, Serialize};

use super::distributional::{distributional_features, DistMethod};
use super::logreg::{predict_logreg, train_logreg, LinearModel, LogRegConfig, Regularization};
use crate::analysis::evaluate;
use crate::dataset::LabeledInstance;
use crate::embeddings::Embeddings;
use crate::exec::{self, Exec};
use crate::features::{build_feature_space_with, vectorize, FeatureSpace, SparseVector};
use crate::{Error, Result};

/// Regularization strengths tried for each penalty.
pub const LAMBDA_GRID: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// Outcome of the validation search over penalties and strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub regularization: Regularization,
    pub lambda: f64,
    pub validation_f1: f64,
    pub warnings: Vec<String>,
}

/// Train one model per grid point and keep the one with the best
/// validation F1; ties go to the earlier grid point (L1 before L2, weaker
/// before stronger).
fn fit_tuned(
    train_x: &[SparseVector],
    train_y: &[bool],
    val_x: &[SparseVector],
    val_y: &[bool],
    dim: usize,
    base: &LogRegConfig,
    exec: Exec,
) -> Result<(LinearModel, Tuning)> {
    if val_x.is_empty() {
        return Err(Error::arg("validation set is empty"));
    }
    let grid: Vec<(Regularization, f64)> = [Regularization::L1, Regularization::L2]
        .into_iter()
        .flat_map(|r| LAMBDA_GRID.into_iter().map(move |l| (r, l)))
        .collect();
    let fitted = exec::map(exec, &grid, |_, &(regularization, lambda)| {
        let cfg = LogRegConfig { regularization, lambda, ..*base };
        let trained = train_logreg(train_x, train_y, dim, &cfg)?;
        let pred: Vec<bool> = val_x.iter().map(|x| predict_logreg(&trained.model, x) > 0.5).collect();
        let f1 = evaluate(&pred, val_y)?.f1;
        Ok::<_, Error>((trained, f1))
    });
    let mut best: Option<(LinearModel, Tuning)> = None;
    for ((regularization, lambda), res) in grid.into_iter().zip(fitted) {
        let (trained, f1) = res?;
        if best.as_ref().is_none_or(|(_, t)| f1 > t.validation_f1) {
            let tuning = Tuning { regularization, lambda, validation_f1: f1, warnings: trained.warnings };
            best = Some((trained.model, tuning));
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Logistic regression over χ²-selected path features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathClassifier {
    pub space: FeatureSpace,
    pub model: LinearModel,
}

impl PathClassifier {
    /// Select the top `k` features on the training set only, then tune the
    /// penalty on validation.
    pub fn fit(
        exec: Exec,
        train: &[LabeledInstance],
        validation: &[LabeledInstance],
        generalize: bool,
        k: usize,
        base: &LogRegConfig,
    ) -> Result<(Self, Tuning)> {
        let space = build_feature_space_with(exec, train, generalize, k)?;
        let xs: Vec<SparseVector> = train.iter().map(|i| vectorize(i, &space)).collect();
        let ys: Vec<bool> = train.iter().map(|i| i.label).collect();
        let vx: Vec<SparseVector> = validation.iter().map(|i| vectorize(i, &space)).collect();
        let vy: Vec<bool> = validation.iter().map(|i| i.label).collect();
        let (model, tuning) = fit_tuned(&xs, &ys, &vx, &vy, space.len(), base, exec)?;
        Ok((PathClassifier { space, model }, tuning))
    }

    pub fn probability(&self, instance: &LabeledInstance) -> f64 {
        predict_logreg(&self.model, &vectorize(instance, &self.space))
    }

    pub fn predict(&self, instance: &LabeledInstance) -> bool {
        self.probability(instance) > 0.5
    }
}

/// Logistic regression over combined word vectors of the two terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistClassifier {
    pub method: DistMethod,
    pub model: LinearModel,
}

fn dist_rows(set: &[LabeledInstance], emb: &Embeddings, method: DistMethod) -> (Vec<SparseVector>, Vec<bool>, usize) {
    let mut oov = 0;
    let xs = set
        .iter()
        .map(|i| {
            let (v, missing) = distributional_features(&i.x, &i.y, emb, method);
            oov += usize::from(missing);
            SparseVector::from_dense(&v)
        })
        .collect();
    (xs, set.iter().map(|i| i.label).collect(), oov)
}

impl DistClassifier {
    pub fn fit(
        exec: Exec,
        train: &[LabeledInstance],
        validation: &[LabeledInstance],
        embeddings: &Embeddings,
        method: DistMethod,
        base: &LogRegConfig,
    ) -> Result<(Self, Tuning)> {
        let (xs, ys, oov) = dist_rows(train, embeddings, method);
        let (vx, vy, _) = dist_rows(validation, embeddings, method);
        let dim = match method {
            DistMethod::Concat => 2 * embeddings.dim(),
            DistMethod::Diff => embeddings.dim(),
            DistMethod::Dot => 1,
        };
        let (model, mut tuning) = fit_tuned(&xs, &ys, &vx, &vy, dim, base, exec)?;
        if oov > 0 {
            tuning.warnings.push(format!("{oov} training pairs have a term without an embedding"));
        }
        Ok((DistClassifier { method, model }, tuning))
    }

    pub fn probability(&self, x: &str, y: &str, embeddings: &Embeddings) -> f64 {
        let (v, _) = distributional_features(x, y, embeddings, self.method);
        predict_logreg(&self.model, &SparseVector::from_dense(&v))
    }

    pub fn predict(&self, x: &str, y: &str, embeddings: &Embeddings) -> bool {
        self.probability(x, y, embeddings) > 0.5
    }
}
