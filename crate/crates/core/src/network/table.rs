use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Lookup table of trainable vectors. Row 0 is reserved for unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    dim: usize,
    vocab: BTreeMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    /// Random table over `keys` with entries uniform in `[-scale, scale]`.
    pub fn random<I, S>(keys: I, dim: usize, scale: f64, rng: &mut impl Rng) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = BTreeMap::new();
        for k in keys {
            let next = vocab.len() + 1;
            vocab.entry(k.into()).or_insert(next);
        }
        let data = (0..(vocab.len() + 1) * dim).map(|_| rng.gen_range(-scale..=scale)).collect();
        EmbeddingTable { dim, vocab, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows, including the unknown row.
    pub fn rows(&self) -> usize {
        self.vocab.len() + 1
    }

    pub fn vocab(&self) -> &BTreeMap<String, usize> {
        &self.vocab
    }

    /// Row of `key`, or 0 when unknown.
    pub fn lookup(&self, key: &str) -> usize {
        self.vocab.get(key).copied().unwrap_or(0)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Overwrite the rows of known keys for which `source` has a vector.
    /// Returns how many rows were set.
    pub fn load_rows<'a>(&mut self, source: impl Fn(&str) -> Option<&'a [f64]>) -> usize {
        let mut set = 0;
        let keys: Vec<(String, usize)> = self.vocab.iter().map(|(k, &r)| (k.clone(), r)).collect();
        for (k, r) in keys {
            if let Some(v) = source(&k) {
                if v.len() == self.dim {
                    self.row_mut(r).copy_from_slice(v);
                    set += 1;
                }
            }
        }
        set
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
