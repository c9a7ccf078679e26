use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lstm::{LstmGrads, LstmParams, LstmTrace};
use super::table::EmbeddingTable;
use crate::corpus::{DepPath, PathCounts, PathEdge};
use crate::exec::{self, Exec};
use crate::{Error, Result};

/// Whether term embeddings are concatenated around the pooled path vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PathOnly,
    Integrated,
}

/// Layer sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Dims {
    pub lemma: usize,
    pub pos: usize,
    pub dep: usize,
    pub dir: usize,
    pub hidden: usize,
    /// Term embedding size; only used in integrated mode.
    pub word: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Dims { lemma: 50, pos: 4, dep: 5, dir: 1, hidden: 60, word: 50 }
    }
}

impl Dims {
    pub fn edge(&self) -> usize {
        self.lemma + self.pos + self.dep + self.dir
    }
}

/// Names of the parameter groups, in the order of
/// [`NetworkParams::groups_mut`] and [`Gradients::groups`].
pub const GROUP_NAMES: [&str; 9] = ["lemma", "pos", "dep", "dir", "lstm_w", "lstm_u", "lstm_b", "classifier", "word"];

/// All trainable parameters of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub mode: Mode,
    pub lemma: EmbeddingTable,
    pub pos: EmbeddingTable,
    pub dep: EmbeddingTable,
    pub dir: EmbeddingTable,
    pub lstm: LstmParams,
    /// `2 × feature_dim`, row-major; row 1 scores the positive class.
    pub classifier: Vec<f64>,
    pub word: Option<EmbeddingTable>,
}

/// Table rows of one edge: lemma, POS, dependency label, direction.
pub type EdgeRows = [usize; 4];

/// A term pair with its paths resolved to table rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPair {
    pub paths: Vec<(Vec<EdgeRows>, f64)>,
    /// Word-table rows of x and y (integrated mode).
    pub terms: [usize; 2],
}

/// Per-instance dropout masks, `true` = kept.
#[derive(Debug, Clone)]
struct Masks {
    edges: Vec<Vec<[bool; 4]>>,
    terms: [bool; 2],
}

struct Forward {
    traces: Vec<LstmTrace>,
    masks: Masks,
    features: Vec<f64>,
    probs: [f64; 2],
    logits: [f64; 2],
}

impl NetworkParams {
    /// Randomly initialized parameters. Tables are uniform in `[-0.1, 0.1]`.
    #[allow(clippy::too_many_arguments)]
    pub fn random(
        mode: Mode,
        dims: Dims,
        lemmas: &[String],
        pos: &[String],
        deps: &[String],
        dirs: &[String],
        words: &[String],
        rng: &mut impl Rng,
    ) -> Self {
        let lemma = EmbeddingTable::random(lemmas.iter().cloned(), dims.lemma, 0.1, rng);
        let pos = EmbeddingTable::random(pos.iter().cloned(), dims.pos, 0.1, rng);
        let dep = EmbeddingTable::random(deps.iter().cloned(), dims.dep, 0.1, rng);
        let dir = EmbeddingTable::random(dirs.iter().cloned(), dims.dir, 0.1, rng);
        let lstm = LstmParams::random(dims.edge(), dims.hidden, rng);
        let word =
            (mode == Mode::Integrated).then(|| EmbeddingTable::random(words.iter().cloned(), dims.word, 0.1, rng));
        let feat = dims.hidden + if mode == Mode::Integrated { 2 * dims.word } else { 0 };
        let bound = (6.0 / (feat + 2) as f64).sqrt();
        let classifier = (0..2 * feat).map(|_| rng.gen_range(-bound..=bound)).collect();
        NetworkParams { mode, lemma, pos, dep, dir, lstm, classifier, word }
    }

    pub fn hidden(&self) -> usize {
        self.lstm.hidden
    }

    pub fn word_dim(&self) -> usize {
        self.word.as_ref().map_or(0, |w| w.dim())
    }

    /// Length of `v_xy`.
    pub fn feature_dim(&self) -> usize {
        self.hidden() + 2 * self.word_dim()
    }

    /// Check that all shapes agree and every parameter is finite.
    pub fn validate(&self) -> Result<()> {
        let edge = self.lemma.dim() + self.pos.dim() + self.dep.dim() + self.dir.dim();
        let h = self.lstm.hidden;
        let ok = self.lstm.input == edge
            && self.lstm.w.len() == 4 * h * edge
            && self.lstm.u.len() == 4 * h * h
            && self.lstm.b.len() == 4 * h
            && self.classifier.len() == 2 * self.feature_dim()
            && (self.mode == Mode::Integrated) == self.word.is_some();
        if !ok {
            return Err(Error::data("network parameter shapes are inconsistent"));
        }
        let finite = [&self.lemma, &self.pos, &self.dep, &self.dir].iter().all(|t| t.is_finite())
            && self.word.as_ref().is_none_or(|w| w.is_finite())
            && self
                .lstm
                .w
                .iter()
                .chain(&self.lstm.u)
                .chain(&self.lstm.b)
                .chain(&self.classifier)
                .all(|v| v.is_finite());
        if !finite {
            return Err(Error::data("network parameters contain non-finite values"));
        }
        Ok(())
    }

    /// Mutable parameter slices in [`GROUP_NAMES`] order.
    pub fn groups_mut(&mut self) -> [&mut [f64]; 9] {
        [
            self.lemma.data_mut(),
            self.pos.data_mut(),
            self.dep.data_mut(),
            self.dir.data_mut(),
            &mut self.lstm.w,
            &mut self.lstm.u,
            &mut self.lstm.b,
            &mut self.classifier,
            match &mut self.word {
                Some(w) => w.data_mut(),
                None => &mut [],
            },
        ]
    }

    pub fn group_sizes(&self) -> [usize; 9] {
        [
            self.lemma.data().len(),
            self.pos.data().len(),
            self.dep.data().len(),
            self.dir.data().len(),
            self.lstm.w.len(),
            self.lstm.u.len(),
            self.lstm.b.len(),
            self.classifier.len(),
            self.word.as_ref().map_or(0, |w| w.data().len()),
        ]
    }

    pub fn edge_rows(&self, edge: &PathEdge) -> EdgeRows {
        match edge {
            PathEdge::Full { lemma, pos, dep, dir } => {
                [self.lemma.lookup(lemma), self.pos.lookup(pos), self.dep.lookup(dep), self.dir.lookup(dir.symbol())]
            }
            PathEdge::Pos(pos) => [0, self.pos.lookup(pos), 0, 0],
            PathEdge::Wildcard => [0; 4],
        }
    }

    pub fn encode_path(&self, path: &DepPath) -> Vec<EdgeRows> {
        path.edges().iter().map(|e| self.edge_rows(e)).collect()
    }

    pub fn encode(&self, x: &str, y: &str, paths: &PathCounts) -> EncodedPair {
        let terms = match &self.word {
            Some(w) => [w.lookup(x), w.lookup(y)],
            None => [0, 0],
        };
        EncodedPair {
            paths: paths.iter().filter(|(p, _)| !p.is_empty()).map(|(p, &c)| (self.encode_path(p), c as f64)).collect(),
            terms,
        }
    }

    /// Edge vector `[v_l, v_pos, v_dep, v_dir]`; components whose mask is
    /// false are zeroed.
    pub fn embed_edge(&self, rows: EdgeRows, keep: [bool; 4]) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.lstm.input);
        for (k, table) in [&self.lemma, &self.pos, &self.dep, &self.dir].into_iter().enumerate() {
            if keep[k] {
                v.extend_from_slice(table.row(rows[k]));
            } else {
                v.extend(std::iter::repeat_n(0.0, table.dim()));
            }
        }
        v
    }

    /// LSTM encoding `o_p` of one path (no dropout).
    pub fn path_vector(&self, rows: &[EdgeRows]) -> Result<Vec<f64>> {
        if rows.is_empty() {
            return Err(Error::arg("cannot encode an empty path"));
        }
        let xs = rows.iter().map(|r| self.embed_edge(*r, [true; 4])).collect();
        Ok(self.lstm.forward(xs).output().to_vec())
    }

    /// `v_xy`: the pooled path vector, wrapped by the term embeddings in
    /// integrated mode.
    pub fn build_feature(&self, pooled: &[f64], terms: [usize; 2], keep: [bool; 2]) -> Vec<f64> {
        match &self.word {
            None => pooled.to_vec(),
            Some(w) => {
                let mut v = Vec::with_capacity(self.feature_dim());
                let term = |k: usize| -> Vec<f64> {
                    if keep[k] {
                        w.row(terms[k]).to_vec()
                    } else {
                        vec![0.0; w.dim()]
                    }
                };
                v.extend(term(0));
                v.extend_from_slice(pooled);
                v.extend(term(1));
                v
            }
        }
    }

    /// `W · v_xy`.
    pub fn logits(&self, features: &[f64]) -> [f64; 2] {
        let d = features.len();
        debug_assert_eq!(self.classifier.len(), 2 * d);
        let row = |r: usize| self.classifier[r * d..(r + 1) * d].iter().zip(features).map(|(a, b)| a * b).sum();
        [row(0), row(1)]
    }

    fn forward(&self, pair: &EncodedPair, masks: Masks) -> Forward {
        let h = self.hidden();
        let mut pooled = vec![0.0; h];
        let total: f64 = pair.paths.iter().map(|(_, c)| c).sum();
        let mut traces = Vec::with_capacity(pair.paths.len());
        for ((rows, count), keep) in pair.paths.iter().zip(&masks.edges) {
            let xs = rows.iter().zip(keep).map(|(r, k)| self.embed_edge(*r, *k)).collect();
            let trace = self.lstm.forward(xs);
            let w = count / total;
            pooled.iter_mut().zip(trace.output()).for_each(|(p, o)| *p += w * o);
            traces.push(trace);
        }
        let features = self.build_feature(&pooled, pair.terms, masks.terms);
        let logits = self.logits(&features);
        let probs = softmax(logits);
        Forward { traces, masks, features, probs, logits }
    }

    fn no_dropout(pair: &EncodedPair) -> Masks {
        Masks { edges: pair.paths.iter().map(|(r, _)| vec![[true; 4]; r.len()]).collect(), terms: [true; 2] }
    }

    fn sample_masks(pair: &EncodedPair, rate: f64, rng: &mut impl Rng) -> Masks {
        if rate <= 0.0 {
            return Self::no_dropout(pair);
        }
        let mut keep = || rng.gen::<f64>() >= rate;
        let edges = pair
            .paths
            .iter()
            .map(|(rows, _)| rows.iter().map(|_| [keep(), keep(), keep(), keep()]).collect())
            .collect();
        Masks { edges, terms: [keep(), keep()] }
    }

    /// Class distribution `softmax(W · v_xy)` at inference. A pair with no
    /// paths is scored from a zero path vector.
    pub fn predict(&self, pair: &EncodedPair) -> [f64; 2] {
        self.forward(pair, Self::no_dropout(pair)).probs
    }

    /// Loss and gradients of one instance. `scale` multiplies the gradients.
    fn instance_gradients(&self, pair: &EncodedPair, label: bool, masks: Masks, scale: f64) -> (f64, InstanceGrads) {
        let fwd = self.forward(pair, masks);
        let y = usize::from(label);
        let loss = log_sum_exp(fwd.logits) - fwd.logits[y];

        let d = fwd.features.len();
        let mut g = InstanceGrads::new(self);
        let dz = [
            scale * (fwd.probs[0] - f64::from(u8::from(y == 0))),
            scale * (fwd.probs[1] - f64::from(u8::from(y == 1))),
        ];
        let mut dv = vec![0.0; d];
        for (r, dzr) in dz.iter().enumerate() {
            let wr = &self.classifier[r * d..(r + 1) * d];
            for k in 0..d {
                g.classifier[r * d + k] += dzr * fwd.features[k];
                dv[k] += dzr * wr[k];
            }
        }
        let (dpooled, word_parts) = match &self.word {
            None => (dv.as_slice(), None),
            Some(w) => {
                let wd = w.dim();
                let h = self.hidden();
                (&dv[wd..wd + h], Some((&dv[..wd], &dv[wd + h..])))
            }
        };
        if let Some((dx_word, dy_word)) = word_parts {
            for (k, part) in [dx_word, dy_word].into_iter().enumerate() {
                if fwd.masks.terms[k] {
                    add_row(&mut g.tables[4], pair.terms[k], part);
                }
            }
        }
        let total: f64 = pair.paths.iter().map(|(_, c)| c).sum();
        let dims = [self.lemma.dim(), self.pos.dim(), self.dep.dim(), self.dir.dim()];
        for (((rows, count), trace), keep) in pair.paths.iter().zip(&fwd.traces).zip(&fwd.masks.edges) {
            let d_out: Vec<f64> = dpooled.iter().map(|v| v * count / total).collect();
            let dxs = self.lstm.backward(trace, &d_out, &mut g.lstm);
            for ((dx, r), k) in dxs.iter().zip(rows).zip(keep) {
                let mut off = 0;
                for c in 0..4 {
                    if k[c] {
                        add_row(&mut g.tables[c], r[c], &dx[off..off + dims[c]]);
                    }
                    off += dims[c];
                }
            }
        }
        (loss, g)
    }
}

fn add_row(table: &mut BTreeMap<usize, Vec<f64>>, row: usize, grad: &[f64]) {
    let slot = table.entry(row).or_insert_with(|| vec![0.0; grad.len()]);
    slot.iter_mut().zip(grad).for_each(|(a, b)| *a += b);
}

fn log_sum_exp(z: [f64; 2]) -> f64 {
    let m = z[0].max(z[1]);
    m + ((z[0] - m).exp() + (z[1] - m).exp()).ln()
}

/// Numerically stable two-way softmax.
pub fn softmax(z: [f64; 2]) -> [f64; 2] {
    let m = z[0].max(z[1]);
    let e = [(z[0] - m).exp(), (z[1] - m).exp()];
    let s = e[0] + e[1];
    [e[0] / s, e[1] / s]
}

/// Weighted average `Σ f_p·o_p / Σ f_p`. `None` for an empty multiset.
pub fn pool_paths(vectors: &[(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let (first, _) = vectors.first()?;
    let total: f64 = vectors.iter().map(|(_, f)| f).sum();
    // Weights first: f/Σf is unchanged when all counts are scaled by an
    // integer, so scaled multisets pool to bit-identical vectors.
    let mut out = vec![0.0; first.len()];
    for (v, f) in vectors {
        let w = f / total;
        out.iter_mut().zip(v).for_each(|(o, x)| *o += w * x);
    }
    Some(out)
}

/// Positive iff `c[1] > 0.5`.
pub fn is_positive(probs: [f64; 2]) -> bool {
    probs[1] > 0.5
}

/// Gradients of one instance: sparse embedding rows, dense everything else.
struct InstanceGrads {
    /// lemma, pos, dep, dir, word
    tables: [BTreeMap<usize, Vec<f64>>; 5],
    lstm: LstmGrads,
    classifier: Vec<f64>,
}

impl InstanceGrads {
    fn new(p: &NetworkParams) -> Self {
        InstanceGrads {
            tables: Default::default(),
            lstm: LstmGrads::zeros(&p.lstm),
            classifier: vec![0.0; p.classifier.len()],
        }
    }
}

/// Dense gradients shaped like [`NetworkParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub groups: [Vec<f64>; 9],
}

impl Gradients {
    pub fn zeros(p: &NetworkParams) -> Self {
        Gradients { groups: p.group_sizes().map(|n| vec![0.0; n]) }
    }

    pub fn groups(&self) -> &[Vec<f64>; 9] {
        &self.groups
    }

    fn accumulate(&mut self, g: &InstanceGrads, p: &NetworkParams) {
        let table_groups = [0usize, 1, 2, 3, 8];
        let dims = [p.lemma.dim(), p.pos.dim(), p.dep.dim(), p.dir.dim(), p.word_dim()];
        for (t, rows) in g.tables.iter().enumerate() {
            let dst = &mut self.groups[table_groups[t]];
            for (&r, v) in rows {
                dst[r * dims[t]..(r + 1) * dims[t]].iter_mut().zip(v).for_each(|(a, b)| *a += b);
            }
        }
        for (k, src) in [&g.lstm.w, &g.lstm.u, &g.lstm.b, &g.classifier].into_iter().enumerate() {
            self.groups[4 + k].iter_mut().zip(src).for_each(|(a, b)| *a += b);
        }
    }
}

/// Per-instance dropout source: a deterministic stream per `(seed, key)`.
pub fn instance_rng(seed: u64, key: u64) -> ChaCha8Rng {
    // splitmix64 finalizer
    let mut z = seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// A training example.
#[derive(Debug, Clone, Copy)]
pub struct BatchItem<'a> {
    pub pair: &'a EncodedPair,
    pub label: bool,
    /// Stable key of this instance for dropout sampling.
    pub key: u64,
}

/// Mean cross-entropy over the batch and its gradient for every parameter
/// group. `dropout` is the component drop rate; 0 disables it.
pub fn loss_and_gradients(
    params: &NetworkParams,
    batch: &[BatchItem<'_>],
    dropout: f64,
    seed: u64,
    exec: Exec,
) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::arg("batch is empty"));
    }
    let scale = 1.0 / batch.len() as f64;
    let per_instance = exec::map(exec, batch, |_, item| {
        let masks = if dropout > 0.0 {
            NetworkParams::sample_masks(item.pair, dropout, &mut instance_rng(seed, item.key))
        } else {
            NetworkParams::no_dropout(item.pair)
        };
        params.instance_gradients(item.pair, item.label, masks, scale)
    });
    let mut grads = Gradients::zeros(params);
    let mut loss = 0.0;
    for (l, g) in &per_instance {
        loss += l;
        grads.accumulate(g, params);
    }
    Ok((loss * scale, grads))
}

/// Predictions for many pairs.
pub fn predict_all(params: &NetworkParams, pairs: &[EncodedPair], exec: Exec) -> Vec<[f64; 2]> {
    exec::map(exec, pairs, |_, p| params.predict(p))
}
