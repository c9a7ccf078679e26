//! Hypernymy detection from dependency paths.
//!
//! The pipeline runs corpus ingestion ([`corpus`]) into a pair/path index,
//! distant-supervision dataset construction ([`dataset`]), and then either the
//! LSTM path encoder ([`network`]) or one of the linear and distributional
//! baselines ([`baselines`], [`features`]). [`analysis`] holds evaluation
//! metrics, path indicativeness scores and error breakdowns.
//!
//! Data-parallel loops (per-sentence extraction, per-instance
//! forward/backward, per-feature scoring) run on rayon when the `parallel`
//! feature is enabled and fall back to plain iterators otherwise. Results are
//! identical either way.

pub mod analysis;
pub mod baselines;
pub mod corpus;
pub mod dataset;
pub mod embeddings;
mod error;
pub mod exec;
pub mod features;
pub mod network;
pub mod synth;
mod tsv;

pub use error::{Error, Result};

/// Version tag written into every serialized artifact.
pub const FORMAT_VERSION: u32 = 1;
