use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::model::{is_positive, loss_and_gradients, predict_all, BatchItem, Dims, EncodedPair, Mode, NetworkParams};
use crate::analysis::{evaluate, Metrics};
use crate::corpus::{Direction, PathEdge};
use crate::dataset::{DatasetSplit, LabeledInstance};
use crate::embeddings::Embeddings;
use crate::exec::Exec;
use crate::{Error, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr: f64,
    /// Probability of zeroing each embedding component during training.
    pub dropout: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub mode: Mode,
    pub dims: Dims,
    /// Lemmas in fewer training instances share the unknown row unless
    /// they have a pre-trained vector.
    pub min_lemma_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::path_only()
    }
}

impl TrainConfig {
    pub fn path_only() -> Self {
        TrainConfig {
            lr: 0.001,
            dropout: 0.5,
            batch_size: 10,
            epochs: 20,
            seed: 1,
            mode: Mode::PathOnly,
            dims: Dims::default(),
            min_lemma_count: 2,
        }
    }

    pub fn integrated() -> Self {
        TrainConfig { dropout: 0.3, mode: Mode::Integrated, ..TrainConfig::path_only() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::arg(format!("dropout must be in [0, 1), got {}", self.dropout)));
        }
        if self.batch_size == 0 {
            return Err(Error::arg("batch size must be >= 1"));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::arg(format!("learning rate must be positive, got {}", self.lr)));
        }
        if self.epochs == 0 {
            return Err(Error::arg("epochs must be >= 1"));
        }
        let d = &self.dims;
        if [d.lemma, d.pos, d.dep, d.dir, d.hidden].contains(&0) || (self.mode == Mode::Integrated && d.word == 0) {
            return Err(Error::arg("layer sizes must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
    pub validation: Metrics,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters after the epoch with the best validation F1.
    pub params: NetworkParams,
    pub history: Vec<EpochStats>,
    /// 1-based.
    pub best_epoch: usize,
    /// The configuration actually used, with layer sizes adjusted to the
    /// embeddings.
    pub config: TrainConfig,
}

/// Versioned container for a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config: TrainConfig,
    pub params: NetworkParams,
}

impl Checkpoint {
    pub fn new(config: TrainConfig, params: NetworkParams) -> Self {
        Checkpoint { format_version: FORMAT_VERSION, config, params }
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, self)?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_reader(r)?;
        let found = value.get("format_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if found != FORMAT_VERSION {
            return Err(Error::FormatVersion { found, expected: FORMAT_VERSION });
        }
        let ck: Checkpoint = serde_json::from_value(value)?;
        ck.params.validate()?;
        Ok(ck)
    }
}

struct Vocabularies {
    lemmas: Vec<String>,
    pos: Vec<String>,
    deps: Vec<String>,
    dirs: Vec<String>,
    words: Vec<String>,
}

/// Table keys: everything seen in training (lemmas only when frequent
/// enough), plus lemmas and terms of the other sets that have a pre-trained
/// vector.
fn vocabularies(split: &DatasetSplit, embeddings: Option<&Embeddings>, min_lemma_count: usize) -> Vocabularies {
    let mut lemma_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for inst in &split.train {
        let distinct: BTreeSet<&str> = inst.paths.keys().flat_map(|p| p.edges()).filter_map(|e| e.lemma()).collect();
        for l in distinct {
            *lemma_counts.entry(l).or_default() += 1;
        }
    }
    let mut lemmas = BTreeSet::new();
    let mut pos = BTreeSet::new();
    let mut deps = BTreeSet::new();
    let mut words = BTreeSet::new();
    let known = |s: &str| embeddings.is_some_and(|e| e.get(s).is_some());
    let held_out = split.test.iter().chain(&split.validation).map(|i| (i, false));
    for (inst, is_train) in split.train.iter().map(|i| (i, true)).chain(held_out) {
        for t in [&inst.x, &inst.y] {
            if is_train || known(t) {
                words.insert(t.clone());
            }
        }
        for path in inst.paths.keys() {
            for edge in path.edges() {
                if let PathEdge::Full { lemma, pos: p, dep, .. } = edge {
                    if (is_train && lemma_counts[lemma.as_str()] >= min_lemma_count) || known(lemma) {
                        lemmas.insert(lemma.clone());
                    }
                    if is_train {
                        pos.insert(p.clone());
                        deps.insert(dep.clone());
                    }
                }
            }
        }
    }
    let dirs = [Direction::Up, Direction::Down, Direction::Apex].iter().map(|d| d.symbol().to_string()).collect();
    Vocabularies {
        lemmas: lemmas.into_iter().collect(),
        pos: pos.into_iter().collect(),
        deps: deps.into_iter().collect(),
        dirs,
        words: words.into_iter().collect(),
    }
}

/// Train with the default execution strategy. See [`train_with`].
pub fn train(split: &DatasetSplit, config: &TrainConfig, embeddings: Option<&Embeddings>) -> Result<TrainOutcome> {
    train_with(Exec::default(), split, config, embeddings)
}

/// Train on `split.train`, evaluate on `split.validation` after every epoch
/// and keep the parameters of the best epoch (highest F1, then lowest
/// validation loss, then earliest).
///
/// When embeddings are given, the lemma and term tables take their size and
/// their initial rows from them. Integrated mode requires embeddings.
pub fn train_with(
    exec: Exec,
    split: &DatasetSplit,
    config: &TrainConfig,
    embeddings: Option<&Embeddings>,
) -> Result<TrainOutcome> {
    config.validate()?;
    if split.train.is_empty() || split.validation.is_empty() {
        return Err(Error::arg("train and validation sets must be non-empty"));
    }
    if config.mode == Mode::Integrated && embeddings.is_none() {
        return Err(Error::arg("integrated mode needs pre-trained embeddings"));
    }
    let mut config = config.clone();
    if let Some(e) = embeddings {
        config.dims.lemma = e.dim();
        config.dims.word = e.dim();
    }

    let vocab = vocabularies(split, embeddings, config.min_lemma_count);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = NetworkParams::random(
        config.mode,
        config.dims,
        &vocab.lemmas,
        &vocab.pos,
        &vocab.deps,
        &vocab.dirs,
        &vocab.words,
        &mut rng,
    );
    if let Some(e) = embeddings {
        params.lemma.load_rows(|k| e.get(k));
        if let Some(w) = params.word.as_mut() {
            w.load_rows(|k| e.get(k));
        }
    }

    let encode = |set: &[LabeledInstance], p: &NetworkParams| -> Vec<EncodedPair> {
        set.iter().map(|i| p.encode(&i.x, &i.y, &i.paths)).collect()
    };
    // table rows never change, so encodings stay valid across updates
    let train_pairs = encode(&split.train, &params);
    let val_pairs = encode(&split.validation, &params);
    let val_gold: Vec<bool> = split.validation.iter().map(|i| i.label).collect();

    let mut adam = AdamState::new(&params);
    let mut order: Vec<usize> = (0..train_pairs.len()).collect();
    let n = train_pairs.len() as u64;
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(usize, f64, f64, NetworkParams)> = None;

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<BatchItem> = chunk
                .iter()
                .map(|&i| BatchItem {
                    pair: &train_pairs[i],
                    label: split.train[i].label,
                    key: epoch as u64 * n + i as u64,
                })
                .collect();
            let (loss, grads) = loss_and_gradients(&params, &batch, config.dropout, config.seed, exec)?;
            loss_sum += loss * batch.len() as f64;
            adam_step(&mut params, &grads, &mut adam, config.lr)?;
        }
        if !loss_sum.is_finite() {
            return Err(Error::data(format!("training diverged in epoch {}", epoch + 1)));
        }

        let probs = predict_all(&params, &val_pairs, exec);
        let predictions: Vec<bool> = probs.iter().map(|&c| is_positive(c)).collect();
        let metrics = evaluate(&predictions, &val_gold)?;
        let val_loss =
            probs.iter().zip(&val_gold).map(|(c, &g)| -c[usize::from(g)].max(f64::MIN_POSITIVE).ln()).sum::<f64>()
                / val_gold.len() as f64;
        history.push(EpochStats {
            epoch: epoch + 1,
            train_loss: loss_sum / n as f64,
            validation_loss: val_loss,
            validation: metrics,
        });
        let better = match &best {
            None => true,
            Some((_, f1, l, _)) => metrics.f1 > *f1 || (metrics.f1 == *f1 && val_loss < *l),
        };
        if better {
            best = Some((epoch + 1, metrics.f1, val_loss, params.clone()));
        }
    }
    let (best_epoch, _, _, params) = best.expect("at least one epoch");
    Ok(TrainOutcome { params, history, best_epoch, config })
}
