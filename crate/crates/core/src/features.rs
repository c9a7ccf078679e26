//! Path generalization, χ² feature selection and sparse path features for
//! the linear baselines.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{DepPath, PathEdge};
use crate::dataset::LabeledInstance;
use crate::exec::{self, Exec};
use crate::{tsv, Error, Result};

/// Default feature cap without generalization.
pub const SNOW_TOP_K: usize = 100_000;
/// Default feature cap with generalization.
pub const SNOW_GEN_TOP_K: usize = 1_000_000;

/// Every generalization of `path`: each internal edge is independently kept,
/// replaced by its bare POS tag, or replaced by `*`. The first and last edges
/// are never touched. The original path is included.
pub fn generalize_path(path: &DepPath) -> BTreeSet<DepPath> {
    let edges = path.edges();
    let mut variants: Vec<Vec<PathEdge>> = vec![Vec::with_capacity(edges.len())];
    for (i, e) in edges.iter().enumerate() {
        let choices: Vec<PathEdge> = if i == 0 || i + 1 == edges.len() {
            vec![e.clone()]
        } else {
            let mut c = vec![e.clone(), PathEdge::Wildcard];
            if let Some(pos) = e.pos() {
                c.push(PathEdge::Pos(pos.to_owned()));
            }
            c
        };
        variants = variants
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    variants.into_iter().map(DepPath::new).collect()
}

/// One-degree-of-freedom χ² statistic of the feature-presence × label
/// contingency table. Zero when any marginal is zero.
pub fn chi2_score(presence: &[bool], labels: &[bool]) -> Result<f64> {
    if presence.len() != labels.len() {
        return Err(Error::arg(format!("presence has {} entries but labels has {}", presence.len(), labels.len())));
    }
    if presence.is_empty() {
        return Err(Error::arg("chi2 needs at least one instance"));
    }
    let mut table = [[0u64; 2]; 2];
    for (&f, &l) in presence.iter().zip(labels) {
        table[usize::from(!f)][usize::from(!l)] += 1;
    }
    Ok(chi2_from_table(table))
}

/// `table[feature absent][label negative]`, i.e. `[[a, b], [c, d]]` with `a` =
/// present & positive.
fn chi2_from_table(table: [[u64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = table.map(|r| r.map(|v| v as f64));
    let n = a + b + c + d;
    let denom = (a + b) * (c + d) * (a + c) * (b + d);
    if denom == 0.0 {
        return 0.0;
    }
    let diff = a * d - b * c;
    n * diff * diff / denom
}

/// Selected path features with dense ids `0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "StoredFeatureSpace")]
pub struct FeatureSpace {
    paths: Vec<String>,
    scores: Vec<f64>,
    generalize: bool,
    #[serde(skip)]
    ids: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct StoredFeatureSpace {
    paths: Vec<String>,
    scores: Vec<f64>,
    generalize: bool,
}

impl From<StoredFeatureSpace> for FeatureSpace {
    fn from(s: StoredFeatureSpace) -> Self {
        FeatureSpace::from_parts(s.paths, s.scores, s.generalize)
    }
}

impl FeatureSpace {
    fn from_parts(paths: Vec<String>, scores: Vec<f64>, generalize: bool) -> Self {
        let ids = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        FeatureSpace { paths, scores, generalize, ids }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn generalize(&self) -> bool {
        self.generalize
    }

    pub fn id(&self, path: &str) -> Option<usize> {
        self.ids.get(path).copied()
    }

    pub fn path(&self, id: usize) -> &str {
        &self.paths[id]
    }

    pub fn score(&self, id: usize) -> f64 {
        self.scores[id]
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        tsv::write_header(&mut w, "feature-space")?;
        for (i, (p, s)) in self.paths.iter().zip(&self.scores).enumerate() {
            writeln!(w, "{p}\t{i}\t{s}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R, generalize: bool) -> Result<Self> {
        let mut paths = Vec::new();
        let mut scores = Vec::new();
        for row in tsv::rows(r) {
            let (line, cols) = row?;
            if cols.len() != 3 {
                return Err(Error::parse(line, format!("expected 3 columns, found {}", cols.len())));
            }
            if cols[1].parse::<usize>().ok() != Some(paths.len()) {
                return Err(Error::parse(line, "feature ids must be dense and in order"));
            }
            let s: f64 = cols[2].parse().map_err(|_| Error::parse(line, "bad chi2 score"))?;
            paths.push(cols[0].clone());
            scores.push(s);
        }
        Ok(FeatureSpace::from_parts(paths, scores, generalize))
    }
}

/// The (optionally generalized) feature strings of one path.
fn path_features(path: &DepPath, generalize: bool) -> Vec<String> {
    if generalize {
        generalize_path(path).iter().map(|p| p.to_string()).collect()
    } else {
        vec![path.to_string()]
    }
}

/// Score every observed path by χ² on presence and keep the top `k`; ties
/// are broken by path string.
pub fn build_feature_space(instances: &[LabeledInstance], generalize: bool, k: usize) -> Result<FeatureSpace> {
    build_feature_space_with(Exec::default(), instances, generalize, k)
}

pub fn build_feature_space_with(
    exec: Exec,
    instances: &[LabeledInstance],
    generalize: bool,
    k: usize,
) -> Result<FeatureSpace> {
    if k == 0 {
        return Err(Error::arg("top-k must be >= 1"));
    }
    let per_instance: Vec<BTreeSet<String>> =
        exec::map(exec, instances, |_, inst| inst.paths.keys().flat_map(|p| path_features(p, generalize)).collect());
    // presence counts split by label: [positive, negative]
    let mut presence: BTreeMap<&str, [u64; 2]> = BTreeMap::new();
    for (inst, feats) in instances.iter().zip(&per_instance) {
        for f in feats {
            presence.entry(f.as_str()).or_default()[usize::from(!inst.label)] += 1;
        }
    }
    if presence.is_empty() {
        return Err(Error::data("no paths to build a feature space from"));
    }
    let n_pos = instances.iter().filter(|i| i.label).count() as u64;
    let n_neg = instances.len() as u64 - n_pos;
    let entries: Vec<(&str, [u64; 2])> = presence.into_iter().collect();
    let scores =
        exec::map(exec, &entries, |_, (_, [pos, neg])| chi2_from_table([[*pos, *neg], [n_pos - pos, n_neg - neg]]));
    let mut ranked: Vec<(f64, &str)> = scores.into_iter().zip(entries.iter().map(|(p, _)| *p)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    ranked.truncate(k);
    let (scores, paths) = ranked.into_iter().map(|(s, p)| (s, p.to_owned())).unzip();
    Ok(FeatureSpace::from_parts(paths, scores, generalize))
}

/// Sparse feature vector with strictly increasing ids and nonzero values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector(Vec<(usize, f64)>);

impl SparseVector {
    /// Build from unsorted entries; duplicate ids are summed and zeros dropped.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, v) in entries {
            *acc.entry(i).or_insert(0.0) += v;
        }
        SparseVector(acc.into_iter().filter(|(_, v)| *v != 0.0).collect())
    }

    /// Dense vector as sparse entries; zero components are dropped.
    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector(values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Path-count features of an instance in `space`. Generalized variants
/// inherit the count of the path they came from; out-of-space paths are
/// dropped.
pub fn vectorize(instance: &LabeledInstance, space: &FeatureSpace) -> SparseVector {
    let entries = instance.paths.iter().flat_map(|(p, &count)| {
        path_features(p, space.generalize).into_iter().filter_map(move |f| space.id(&f).map(|id| (id, count as f64)))
    });
    SparseVector::from_entries(entries)
}
