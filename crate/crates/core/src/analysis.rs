//! Evaluation metrics, per-path indicativeness scores and automated error
//! categories.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{DepPath, PairPathIndex};
use crate::dataset::RelationRecord;
use crate::exec::{self, Exec};
use crate::network::{softmax, NetworkParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Metrics {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Precision, recall and F1 of the positive class.
pub fn evaluate(predictions: &[bool], gold: &[bool]) -> Result<Metrics> {
    if predictions.len() != gold.len() {
        return Err(Error::arg(format!("{} predictions for {} gold labels", predictions.len(), gold.len())));
    }
    let mut m = Metrics::default();
    for (&p, &g) in predictions.iter().zip(gold) {
        match (p, g) {
            (true, true) => m.tp += 1,
            (true, false) => m.fp += 1,
            (false, true) => m.fn_ += 1,
            (false, false) => m.tn += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn_);
    m.f1 = if m.precision + m.recall > 0.0 { 2.0 * m.precision * m.recall / (m.precision + m.recall) } else { 0.0 };
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathScore {
    pub path: DepPath,
    pub score: f64,
}

/// Positive-class probability of a pair whose only path is `path`, with the
/// term-embedding slots zeroed.
pub fn path_score(params: &NetworkParams, path: &DepPath) -> Result<PathScore> {
    let rows = params.encode_path(path);
    let o_p = params.path_vector(&rows)?;
    let wd = params.word_dim();
    let mut v = vec![0.0; wd];
    v.extend(o_p);
    v.extend(std::iter::repeat_n(0.0, wd));
    let score = softmax(params.logits(&v))[1];
    Ok(PathScore { path: path.clone(), score })
}

/// The `k` highest-scoring distinct paths, ties broken by rendered path.
pub fn rank_paths<'a>(
    params: &NetworkParams,
    paths: impl IntoIterator<Item = &'a DepPath>,
    k: usize,
    exec: Exec,
) -> Result<Vec<PathScore>> {
    if k == 0 {
        return Err(Error::arg("k must be >= 1"));
    }
    let distinct: Vec<&DepPath> =
        paths.into_iter().filter(|p| !p.is_empty()).collect::<BTreeSet<_>>().into_iter().collect();
    let scored = exec::map(exec, &distinct, |_, p| path_score(params, p));
    let mut keyed = scored.into_iter().map(|s| s.map(|s| (s.path.to_string(), s))).collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then_with(|| a.0.cmp(&b.0)));
    keyed.truncate(k);
    Ok(keyed.into_iter().map(|(_, s)| s).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BreakdownConfig {
    /// False negatives with fewer joint occurrences fall into
    /// [`LOW_STATISTICS`].
    pub min_cooccurrence: u64,
    /// Percentile of term frequencies under which a term counts as rare.
    pub rare_percentile: f64,
    /// Relation string → category name for false positives. Unmapped
    /// relations are their own category.
    pub relation_categories: BTreeMap<String, String>,
}

impl Default for BreakdownConfig {
    fn default() -> Self {
        let syn = ["synonym", "alias", "redirect", "wikipedia redirect"];
        BreakdownConfig {
            min_cooccurrence: 25,
            rare_percentile: 10.0,
            relation_categories: syn.iter().map(|r| (r.to_string(), "synonymy".to_string())).collect(),
        }
    }
}

pub const LOW_STATISTICS: &str = "low statistics";
pub const INFREQUENT_TERM: &str = "infrequent term";
pub const UNCATEGORIZED: &str = "uncategorized";
pub const UNKNOWN_RELATION: &str = "unknown relation";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub false_positives: BTreeMap<String, Vec<(String, String)>>,
    pub false_negatives: BTreeMap<String, Vec<(String, String)>>,
    /// Evaluated pairs that had no paths in the index.
    pub missing_from_index: Vec<(String, String)>,
}

impl ErrorReport {
    pub fn is_empty(&self) -> bool {
        self.false_positives.is_empty() && self.false_negatives.is_empty()
    }
}

/// Nearest-rank percentile of `values`.
fn percentile(values: &mut [u64], p: f64) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let rank = ((p / 100.0) * values.len() as f64).ceil().max(1.0) as usize;
    Some(values[rank.min(values.len()) - 1])
}

/// Bucket false positives by gold relation and false negatives by corpus
/// statistics.
pub fn error_breakdown(
    pairs: &[(String, String)],
    predictions: &[bool],
    gold: &[bool],
    index: &PairPathIndex,
    relations: &[RelationRecord],
    config: &BreakdownConfig,
) -> Result<ErrorReport> {
    if predictions.len() != gold.len() || pairs.len() != gold.len() {
        return Err(Error::arg("pairs, predictions and gold labels must align"));
    }
    let relation_of: BTreeMap<(&str, &str), &str> =
        relations.iter().map(|r| ((r.x.as_str(), r.y.as_str()), r.relation.as_str())).collect();
    let freq = index.term_frequencies();
    let mut all: Vec<u64> = freq.values().copied().collect();
    let rare_below = percentile(&mut all, config.rare_percentile).unwrap_or(0);
    let is_rare = |t: &str| freq.get(t).copied().unwrap_or(0) < rare_below;

    let mut report = ErrorReport::default();
    for (((x, y), &p), &g) in pairs.iter().zip(predictions).zip(gold) {
        let key = (x.clone(), y.clone());
        if index.get(x, y).is_none() {
            report.missing_from_index.push(key.clone());
        }
        match (p, g) {
            (true, false) => {
                let category = match relation_of.get(&(x.as_str(), y.as_str())) {
                    Some(rel) => config.relation_categories.get(*rel).cloned().unwrap_or_else(|| rel.to_string()),
                    None => UNKNOWN_RELATION.to_owned(),
                };
                report.false_positives.entry(category).or_default().push(key);
            }
            (false, true) => {
                let category = if index.cooccurrence(x, y) < config.min_cooccurrence {
                    LOW_STATISTICS
                } else if is_rare(x) || is_rare(y) {
                    INFREQUENT_TERM
                } else {
                    UNCATEGORIZED
                };
                report.false_negatives.entry(category.to_owned()).or_default().push(key);
            }
            _ => {}
        }
    }
    Ok(report)
}
