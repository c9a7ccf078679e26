//! SLQS: a term is more general when its most associated contexts have
//! higher entropy.
//!
//! Contexts are lemmatized content words within a symmetric token window.
//! Contexts are ranked per term by local mutual information (LMI); each
//! context's entropy over the terms it co-occurs with is normalized by the
//! log of its distinct-term count. A term's generality `E` is the median
//! entropy of its top `min(N, #contexts with LMI > 0)` contexts. Scores are
//! not multiplied by cosine similarity.
//!
//! The window size, log base (2), median aggregation and entropy
//! normalization are reconstructions of the base measure and are all
//! configurable.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::exec::{self, Exec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlqsConfig {
    /// Tokens on each side of the target that count as context.
    pub window: usize,
    /// Maximum contexts per term (`N`).
    pub max_contexts: usize,
    /// Pairs scoring above this are classified as hypernymy.
    pub threshold: f64,
    /// UPOS tags treated as content words.
    pub content_pos: BTreeSet<String>,
}

impl Default for SlqsConfig {
    fn default() -> Self {
        SlqsConfig {
            window: 2,
            max_contexts: 100,
            threshold: 0.000464,
            content_pos: ["NOUN", "PROPN", "VERB", "ADJ", "ADV"].into_iter().map(String::from).collect(),
        }
    }
}

/// Threshold tuned on the lexical split of the reference dataset.
pub const LEXICAL_SPLIT_THRESHOLD: f64 = 0.007629;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlqsModel {
    pub config: SlqsConfig,
    /// Context counts of each vocabulary term.
    pub context_counts: BTreeMap<String, BTreeMap<String, u64>>,
    /// Normalized entropy of each context seen with a vocabulary term.
    pub context_entropy: BTreeMap<String, f64>,
    /// Generality `E_t`; absent when the term has no context with LMI > 0.
    pub generality: BTreeMap<String, f64>,
}

impl SlqsModel {
    pub fn generality(&self, term: &str) -> Option<f64> {
        self.generality.get(term).copied()
    }

    /// Score and decision for `(x, y)`. An undefined score is classified
    /// negative.
    pub fn classify(&self, x: &str, y: &str) -> (Option<f64>, bool) {
        let s = slqs_score(self, x, y);
        (s, s.is_some_and(|v| v > self.config.threshold))
    }
}

type CountMap = HashMap<(u32, u32), u64>;

struct Interner {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn get(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.ids.get(s) {
            return i;
        }
        let i = self.names.len() as u32;
        self.ids.insert(s.to_owned(), i);
        self.names.push(s.to_owned());
        i
    }
}

pub fn slqs_fit<S: AsRef<str>>(sentences: &[Sentence], content_vocab: &[S], config: SlqsConfig) -> Result<SlqsModel> {
    slqs_fit_with(Exec::default(), sentences, content_vocab, config)
}

pub fn slqs_fit_with<S: AsRef<str>>(
    exec: Exec,
    sentences: &[Sentence],
    content_vocab: &[S],
    config: SlqsConfig,
) -> Result<SlqsModel> {
    if config.max_contexts == 0 {
        return Err(Error::arg("SLQS needs N >= 1"));
    }
    if config.window == 0 {
        return Err(Error::arg("SLQS context window must be >= 1"));
    }
    let vocab: BTreeSet<String> = content_vocab.iter().map(|t| t.as_ref().to_lowercase()).collect();

    // Per-chunk string-keyed counts, merged in corpus order.
    let chunks: Vec<&[Sentence]> = sentences.chunks(256).collect();
    let partial = exec::map(exec, &chunks, |_, chunk| {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for s in chunk.iter() {
            let toks = s.tokens();
            let is_content = |i: usize| config.content_pos.contains(&toks[i].upos);
            for (i, t) in toks.iter().enumerate() {
                if !is_content(i) && !vocab.contains(&t.lemma) {
                    continue;
                }
                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(toks.len() - 1);
                for j in (lo..=hi).filter(|&j| j != i && is_content(j)) {
                    *counts.entry((t.lemma.clone(), toks[j].lemma.clone())).or_insert(0) += 1;
                }
            }
        }
        counts
    });

    let mut interner = Interner { ids: HashMap::new(), names: Vec::new() };
    let mut counts: CountMap = HashMap::new();
    for part in partial {
        for ((t, c), n) in part {
            let key = (interner.get(&t), interner.get(&c));
            *counts.entry(key).or_insert(0) += n;
        }
    }

    let mut row: HashMap<u32, u64> = HashMap::new();
    let mut col: HashMap<u32, u64> = HashMap::new();
    let mut by_context: HashMap<u32, Vec<u64>> = HashMap::new();
    let mut total = 0u64;
    for (&(t, c), &n) in &counts {
        *row.entry(t).or_insert(0) += n;
        *col.entry(c).or_insert(0) += n;
        by_context.entry(c).or_default().push(n);
        total += n;
    }

    let entropy = |c: u32| -> f64 {
        let cells = &by_context[&c];
        if cells.len() <= 1 {
            return 0.0;
        }
        let sum = col[&c] as f64;
        let h: f64 = cells.iter().map(|&n| n as f64 / sum).map(|p| -p * p.log2()).sum();
        h / (cells.len() as f64).log2()
    };

    let mut per_term: BTreeMap<String, Vec<(u32, u64)>> = BTreeMap::new();
    for (&(t, c), &n) in &counts {
        let name = &interner.names[t as usize];
        if vocab.contains(name) {
            per_term.entry(name.clone()).or_default().push((c, n));
        }
    }

    let mut context_counts = BTreeMap::new();
    let mut context_entropy = BTreeMap::new();
    let mut generality = BTreeMap::new();
    for (term, cells) in per_term {
        let t = interner.ids[&term];
        let mut scored: Vec<(f64, &str, u32)> = cells
            .iter()
            .map(|&(c, n)| {
                let pmi = ((n as f64 * total as f64) / (row[&t] as f64 * col[&c] as f64)).log2();
                (n as f64 * pmi, interner.names[c as usize].as_str(), c)
            })
            .filter(|(lmi, _, _)| *lmi > 0.0)
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        scored.truncate(config.max_contexts);
        let mut hs: Vec<f64> = scored.iter().map(|&(_, _, c)| entropy(c)).collect();
        for &(c, _) in &cells {
            context_entropy.entry(interner.names[c as usize].clone()).or_insert_with(|| entropy(c));
        }
        if let Some(m) = median(&mut hs) {
            generality.insert(term.clone(), m);
        }
        context_counts.insert(term, cells.iter().map(|&(c, n)| (interner.names[c as usize].clone(), n)).collect());
    }

    Ok(SlqsModel { config, context_counts, context_entropy, generality })
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

/// `1 − E_x / E_y`; `None` when either generality is undefined or `E_y = 0`.
pub fn slqs_score(model: &SlqsModel, x: &str, y: &str) -> Option<f64> {
    let ex = model.generality(x)?;
    let ey = model.generality(y)?;
    if ey == 0.0 {
        return None;
    }
    Some(1.0 - ex / ey)
}

/// Threshold maximizing F1 over `(score, gold)` pairs. Undefined scores
/// always count as negative predictions.
pub fn tune_threshold(scored: &[(Option<f64>, bool)]) -> f64 {
    let mut values: Vec<f64> = scored.iter().filter_map(|(s, _)| *s).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let Some(&lowest) = values.first() else { return 0.0 };
    let mut candidates = vec![lowest - 1.0];
    candidates.extend(values.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    candidates.push(values[values.len() - 1]);
    let f1 = |th: f64| {
        let (mut tp, mut fp, mut fneg) = (0u32, 0u32, 0u32);
        for (s, gold) in scored {
            match (s.is_some_and(|v| v > th), *gold) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                _ => {}
            }
        }
        if tp == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
        }
    };
    let mut best = (f64::NEG_INFINITY, candidates[0]);
    for th in candidates {
        let score = f1(th);
        if score > best.0 {
            best = (score, th);
        }
    }
    best.1
}
