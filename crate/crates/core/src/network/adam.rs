use serde::{Deserialize, Serialize};

use super::model::{Gradients, NetworkParams};
use crate::{Error, Result};

/// First and second moment estimates for every parameter group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(params: &NetworkParams) -> Self {
        let sizes = params.group_sizes();
        AdamState {
            m: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            v: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update of every parameter.
pub fn adam_step(params: &mut NetworkParams, grads: &Gradients, state: &mut AdamState, lr: f64) -> Result<()> {
    let sizes = params.group_sizes();
    let shapes_match = sizes
        .iter()
        .zip(grads.groups())
        .zip(state.m.iter().zip(&state.v))
        .all(|((&n, g), (m, v))| g.len() == n && m.len() == n && v.len() == n);
    if !shapes_match || state.m.len() != sizes.len() {
        return Err(Error::arg("optimizer state does not match the parameters"));
    }
    state.t += 1;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let c1 = 1.0 - b1.powi(state.t as i32);
    let c2 = 1.0 - b2.powi(state.t as i32);
    for (k, theta) in params.groups_mut().into_iter().enumerate() {
        let g = &grads.groups()[k];
        let m = &mut state.m[k];
        let v = &mut state.v[k];
        for i in 0..theta.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            theta[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
