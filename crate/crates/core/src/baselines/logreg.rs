use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::SparseVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regularization {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    pub regularization: Regularization,
    pub lambda: f64,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig { regularization: Regularization::L2, lambda: 1e-4, epochs: 30, lr: 0.05, seed: 1 }
    }
}

/// Logistic regression weights: one per feature plus a bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub regularization: Regularization,
    pub lambda: f64,
}

impl LinearModel {
    pub fn zeros(dim: usize, regularization: Regularization, lambda: f64) -> Self {
        LinearModel { weights: vec![0.0; dim], bias: 0.0, regularization, lambda }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn score(&self, x: &SparseVector) -> f64 {
        self.bias + x.entries().iter().filter_map(|&(i, v)| self.weights.get(i).map(|w| w * v)).sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct TrainedLogReg {
    pub model: LinearModel,
    pub warnings: Vec<String>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Positive-class probability.
pub fn predict_logreg(model: &LinearModel, x: &SparseVector) -> f64 {
    sigmoid(model.score(x))
}

/// Mean logistic loss plus `λ·R(w)`, where `R` is `½‖w‖²` (L2) or `‖w‖₁`
/// (L1). The bias is not regularized.
pub fn logistic_objective(model: &LinearModel, xs: &[SparseVector], ys: &[bool]) -> f64 {
    let n = xs.len() as f64;
    let data: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let s = model.score(x);
            if y {
                softplus(-s)
            } else {
                softplus(s)
            }
        })
        .sum::<f64>()
        / n;
    let reg = match model.regularization {
        Regularization::L2 => 0.5 * model.weights.iter().map(|w| w * w).sum::<f64>(),
        Regularization::L1 => model.weights.iter().map(|w| w.abs()).sum::<f64>(),
    };
    data + model.lambda * reg
}

/// Gradient of [`logistic_objective`] as `(weights, bias)`.
pub fn logistic_gradient(model: &LinearModel, xs: &[SparseVector], ys: &[bool]) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw: Vec<f64> = match model.regularization {
        Regularization::L2 => model.weights.iter().map(|w| model.lambda * w).collect(),
        Regularization::L1 => model.weights.iter().map(|w| model.lambda * w.signum() * f64::from(*w != 0.0)).collect(),
    };
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let r = (sigmoid(model.score(x)) - f64::from(u8::from(y))) / n;
        gb += r;
        for &(i, v) in x.entries() {
            gw[i] += r * v;
        }
    }
    (gw, gb)
}

/// Fit by seeded stochastic gradient descent, one example per step. After
/// each step L2 applies weight decay and L1 a soft-threshold.
pub fn train_logreg(xs: &[SparseVector], ys: &[bool], dim: usize, config: &LogRegConfig) -> Result<TrainedLogReg> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::arg(format!(
            "need matching non-empty inputs, got {} rows and {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if let Some(bad) = xs.iter().flat_map(|x| x.entries()).find(|(i, _)| *i >= dim) {
        return Err(Error::arg(format!("feature id {} outside dimension {dim}", bad.0)));
    }
    let mut warnings = Vec::new();
    if ys.iter().all(|&y| y) || ys.iter().all(|&y| !y) {
        warnings.push("all training labels belong to one class".to_owned());
    }
    let mut model = LinearModel::zeros(dim, config.regularization, config.lambda);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let step_reg = config.lr * config.lambda;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            let x = &xs[k];
            let r = sigmoid(model.score(x)) - f64::from(u8::from(ys[k]));
            for &(i, v) in x.entries() {
                model.weights[i] -= config.lr * r * v;
            }
            model.bias -= config.lr * r;
            match config.regularization {
                Regularization::L2 => {
                    let decay = (1.0 - step_reg).max(0.0);
                    model.weights.iter_mut().for_each(|w| *w *= decay);
                }
                Regularization::L1 => {
                    for w in model.weights.iter_mut() {
                        *w = w.signum() * (w.abs() - step_reg).max(0.0);
                    }
                }
            }
        }
    }
    Ok(TrainedLogReg { model, warnings })
}
