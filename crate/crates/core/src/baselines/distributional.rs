use serde::{Deserialize, Serialize};

use crate::embeddings::Embeddings;
use crate::{Error, Result};

/// How two word vectors are combined into a pair feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistMethod {
    /// `x ⊕ y`
    Concat,
    /// `y − x`
    Diff,
    /// `x · y`
    Dot,
}

impl std::str::FromStr for DistMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concat" => Ok(DistMethod::Concat),
            "diff" => Ok(DistMethod::Diff),
            "dot" => Ok(DistMethod::Dot),
            _ => Err(Error::arg(format!("unknown distributional method {s:?}"))),
        }
    }
}

/// Combine two vectors of equal length.
pub fn pair_vector(xv: &[f64], yv: &[f64], method: DistMethod) -> Vec<f64> {
    match method {
        DistMethod::Concat => xv.iter().chain(yv).copied().collect(),
        DistMethod::Diff => yv.iter().zip(xv).map(|(b, a)| b - a).collect(),
        DistMethod::Dot => vec![xv.iter().zip(yv).map(|(a, b)| a * b).sum()],
    }
}

/// Pair feature for `(x, y)`. Out-of-vocabulary terms are replaced by the
/// zero vector; the flag reports whether that happened.
pub fn distributional_features(x: &str, y: &str, embeddings: &Embeddings, method: DistMethod) -> (Vec<f64>, bool) {
    let zero = vec![0.0; embeddings.dim()];
    let (xv, x_oov) = embeddings.get(x).map_or((zero.as_slice(), true), |v| (v, false));
    let (yv, y_oov) = embeddings.get(y).map_or((zero.as_slice(), true), |v| (v, false));
    (pair_vector(xv, yv, method), x_oov || y_oov)
}
