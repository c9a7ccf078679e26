//! Synthetic corpora with planted hypernymy patterns.
//!
//! Terms are nonce words. Hyponyms are grouped under a few category terms,
//! so many positives share the same hypernym. Every pair is mentioned in a
//! fixed number of sentences: one built from a template of its class
//! (a planted pattern for positives, a distractor for negatives) and the
//! rest from filler templates that both classes share. A fraction of the
//! positives, and a few negatives, are seen with a one-off "variant" verb
//! instead: an exact path match cannot recognise these, a generalized one
//! can, at the cost of some false positives.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::{Sentence, Token};
use crate::dataset::RelationRecord;
use crate::embeddings::Embeddings;
use crate::{Error, Result};

/// The core paths of the planted hypernymy templates.
pub const PLANTED_PATHS: [&str; 5] = [
    "X/NOUN/nsubj/< be/VERB/ROOT/- Y/NOUN/attr/>",
    "X/NOUN/pobj/< as/ADP/prep/< Y/NOUN/ROOT/-",
    "X/NOUN/pobj/< include/VERB/prep/< Y/NOUN/ROOT/-",
    "X/NOUN/nsubj/< be/VERB/ROOT/- kind/NOUN/attr/> of/ADP/prep/> Y/NOUN/pobj/>",
    "X/NOUN/appos/< example/NOUN/pobj/< for/ADP/prep/< Y/NOUN/ROOT/-",
];

/// One template token: form, lemma, UPOS, head (0 = root), relation.
/// The lemmas `X`, `Y` and `V` are slots for the two terms and a verb.
type Slot = (&'static str, &'static str, &'static str, usize, &'static str);

const POSITIVE: [&[Slot]; 5] = [
    // X is Y
    &[("X", "X", "NOUN", 2, "nsubj"), ("is", "be", "VERB", 0, "ROOT"), ("Y", "Y", "NOUN", 2, "attr")],
    // Y such as X
    &[
        ("Y", "Y", "NOUN", 0, "ROOT"),
        ("such", "such", "ADJ", 3, "amod"),
        ("as", "as", "ADP", 1, "prep"),
        ("X", "X", "NOUN", 3, "pobj"),
    ],
    // Y including X
    &[("Y", "Y", "NOUN", 0, "ROOT"), ("including", "include", "VERB", 1, "prep"), ("X", "X", "NOUN", 2, "pobj")],
    // X is a kind of Y
    &[
        ("X", "X", "NOUN", 2, "nsubj"),
        ("is", "be", "VERB", 0, "ROOT"),
        ("a", "a", "DET", 4, "det"),
        ("kind", "kind", "NOUN", 2, "attr"),
        ("of", "of", "ADP", 4, "prep"),
        ("Y", "Y", "NOUN", 5, "pobj"),
    ],
    // Y, for example X
    &[
        ("Y", "Y", "NOUN", 0, "ROOT"),
        (",", ",", "PUNCT", 1, "punct"),
        ("for", "for", "ADP", 1, "prep"),
        ("example", "example", "NOUN", 3, "pobj"),
        ("X", "X", "NOUN", 4, "appos"),
    ],
];

/// X <verb>s as Y, with a verb used nowhere else.
const VARIANT: &[Slot] = &[
    ("X", "X", "NOUN", 2, "nsubj"),
    ("V", "V", "VERB", 0, "ROOT"),
    ("as", "as", "ADP", 2, "prep"),
    ("Y", "Y", "NOUN", 3, "pobj"),
];

const FILLER: [&[Slot]; 3] = [
    // X and Y
    &[("X", "X", "NOUN", 0, "ROOT"), ("and", "and", "CCONJ", 1, "cc"), ("Y", "Y", "NOUN", 1, "conj")],
    // X or Y
    &[("X", "X", "NOUN", 0, "ROOT"), ("or", "or", "CCONJ", 1, "cc"), ("Y", "Y", "NOUN", 1, "conj")],
    // X near Y
    &[("X", "X", "NOUN", 0, "ROOT"), ("near", "near", "ADP", 1, "prep"), ("Y", "Y", "NOUN", 2, "pobj")],
];

const DISTRACTOR: [&[Slot]; 5] = [
    // X eats Y
    &[("X", "X", "NOUN", 2, "nsubj"), ("eats", "eat", "VERB", 0, "ROOT"), ("Y", "Y", "NOUN", 2, "dobj")],
    // X lives in Y
    &[
        ("X", "X", "NOUN", 2, "nsubj"),
        ("lives", "live", "VERB", 0, "ROOT"),
        ("in", "in", "ADP", 2, "prep"),
        ("Y", "Y", "NOUN", 3, "pobj"),
    ],
    // X sees Y
    &[("X", "X", "NOUN", 2, "nsubj"), ("sees", "see", "VERB", 0, "ROOT"), ("Y", "Y", "NOUN", 2, "dobj")],
    // X weighs more than Y
    &[
        ("X", "X", "NOUN", 2, "nsubj"),
        ("weighs", "weigh", "VERB", 0, "ROOT"),
        ("more", "more", "ADJ", 2, "dobj"),
        ("than", "than", "ADP", 3, "prep"),
        ("Y", "Y", "NOUN", 4, "pobj"),
    ],
    // X <verb>s Y, with a verb used nowhere else
    &[("X", "X", "NOUN", 2, "nsubj"), ("V", "V", "VERB", 0, "ROOT"), ("Y", "Y", "NOUN", 2, "dobj")],
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub categories: usize,
    pub hyponyms_per_category: usize,
    /// Terms related to nothing.
    pub unrelated_terms: usize,
    pub negatives: usize,
    pub sentences_per_pair: usize,
    /// Share of positives mentioned with a variant verb instead of a
    /// planted pattern.
    pub variant_fraction: f64,
    /// Same, for negatives instead of a distractor.
    pub negative_variant_fraction: f64,
    pub embedding_dim: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// 200 positives and 800 negatives in 2,000 sentences.
    fn default() -> Self {
        SynthConfig {
            categories: 20,
            hyponyms_per_category: 10,
            unrelated_terms: 60,
            negatives: 800,
            sentences_per_pair: 2,
            variant_fraction: 0.1,
            negative_variant_fraction: 0.01,
            embedding_dim: 50,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub sentences: Vec<Sentence>,
    /// WordNet-style records: `hypernym` for positives, other relations
    /// for negatives.
    pub relations: Vec<RelationRecord>,
    pub vocabulary: BTreeSet<String>,
    /// Independent random vectors, one per term.
    pub embeddings: Embeddings,
    pub categories: Vec<String>,
}

impl SynthCorpus {
    pub fn positives(&self) -> impl Iterator<Item = &RelationRecord> {
        self.relations.iter().filter(|r| r.relation == "hypernym")
    }
}

struct Words {
    rng: ChaCha8Rng,
    used: BTreeSet<String>,
}

impl Words {
    fn new(seed: u64) -> Self {
        Words { rng: ChaCha8Rng::seed_from_u64(seed), used: BTreeSet::new() }
    }

    fn fresh(&mut self, syllables: usize, suffix: &str) -> String {
        const ONSET: [&str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
        const VOWEL: [&str; 5] = ["a", "e", "i", "o", "u"];
        loop {
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSET.choose(&mut self.rng).unwrap());
                w.push_str(VOWEL.choose(&mut self.rng).unwrap());
            }
            w.push_str(suffix);
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn sentence(template: &[Slot], x: &str, y: &str, verb: &str) -> Result<Sentence> {
    let tokens = template
        .iter()
        .enumerate()
        .map(|(i, &(form, lemma, upos, head, deprel))| {
            let (form, lemma) = match lemma {
                "X" => (x, x),
                "Y" => (y, y),
                "V" => (verb, verb),
                _ => (form, lemma),
            };
            Token {
                index: i + 1,
                form: form.into(),
                lemma: lemma.into(),
                upos: upos.into(),
                head,
                deprel: deprel.into(),
            }
        })
        .collect();
    Sentence::new(tokens)
}

/// Draw `k` templates, repeating only once all have been used.
fn pick<'a>(templates: &[&'a [Slot]], k: usize, rng: &mut impl Rng) -> Vec<&'a [Slot]> {
    let mut order: Vec<usize> = (0..templates.len()).collect();
    order.shuffle(rng);
    (0..k).map(|i| templates[order[i % order.len()]]).collect()
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    if config.categories < 2 || config.hyponyms_per_category == 0 || config.sentences_per_pair < 2 {
        return Err(Error::arg("need at least 2 categories, 1 hyponym each and 2 sentences per pair"));
    }
    if ![config.variant_fraction, config.negative_variant_fraction].iter().all(|f| (0.0..=1.0).contains(f)) {
        return Err(Error::arg("variant fractions must be in [0, 1]"));
    }
    let mut words = Words::new(config.seed);
    for (_, lemma, ..) in POSITIVE.iter().chain(&DISTRACTOR).chain(&FILLER).flat_map(|t| t.iter()) {
        words.used.insert(lemma.to_string());
    }
    let categories: Vec<String> = (0..config.categories).map(|_| words.fresh(2, "")).collect();
    let hyponyms: Vec<Vec<String>> = (0..config.categories)
        .map(|_| (0..config.hyponyms_per_category).map(|_| words.fresh(3, "")).collect())
        .collect();
    let unrelated: Vec<String> = (0..config.unrelated_terms).map(|_| words.fresh(3, "n")).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut relations = Vec::new();
    let mut seen = BTreeSet::new();
    let record = |x: &str, y: &str, relation: &str| RelationRecord {
        x: x.to_owned(),
        y: y.to_owned(),
        relation: relation.to_owned(),
        resource: "wordnet".to_owned(),
    };
    for (c, hypos) in hyponyms.iter().enumerate() {
        for h in hypos {
            seen.insert((h.clone(), categories[c].clone()));
            relations.push(record(h, &categories[c], "hypernym"));
        }
    }

    // Negatives mostly avoid category terms in the y slot, so "y is a
    // category" is a strong but purely lexical cue.
    let all_hypos: Vec<(usize, &String)> =
        hyponyms.iter().enumerate().flat_map(|(c, hs)| hs.iter().map(move |h| (c, h))).collect();
    let max_attempts = config.negatives * 100;
    let mut attempts = 0;
    while relations.len() - config.categories * config.hyponyms_per_category < config.negatives {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::arg("not enough terms to draw the requested negatives"));
        }
        let (ca, a) = *all_hypos.choose(&mut rng).unwrap();
        let (cb, b) = *all_hypos.choose(&mut rng).unwrap();
        let u = if unrelated.is_empty() { b } else { unrelated.choose(&mut rng).unwrap() };
        let roll: f64 = rng.gen();
        let (x, y, relation) = if roll < 0.35 {
            (a, b, if ca == cb { "co-hyponym" } else { "unrelated" })
        } else if roll < 0.60 {
            // never the reverse of a positive, whose sentences would then
            // also carry the positive's reversed paths
            if ca == cb {
                continue;
            }
            (&categories[cb], a, "unrelated")
        } else if roll < 0.65 {
            if ca == cb {
                continue;
            }
            (a, &categories[cb], "unrelated")
        } else if roll < 0.85 {
            (a, u, "unrelated")
        } else {
            (u, a, "unrelated")
        };
        if x == y || !seen.insert((x.clone(), y.clone())) {
            continue;
        }
        relations.push(record(x, y, relation));
    }

    let mut sentences = Vec::with_capacity(relations.len() * config.sentences_per_pair);
    for r in &relations {
        let positive = r.relation == "hypernym";
        let variant = if positive { config.variant_fraction } else { config.negative_variant_fraction };
        let template = if rng.gen::<f64>() < variant {
            VARIANT
        } else if positive {
            *POSITIVE.choose(&mut rng).unwrap()
        } else {
            *DISTRACTOR.choose(&mut rng).unwrap()
        };
        let verb = if template.iter().any(|t| t.1 == "V") { words.fresh(2, "ize") } else { String::new() };
        sentences.push(sentence(template, &r.x, &r.y, &verb)?);
        for t in pick(&FILLER, config.sentences_per_pair - 1, &mut rng) {
            sentences.push(sentence(t, &r.x, &r.y, "")?);
        }
    }
    sentences.shuffle(&mut rng);

    let vocabulary: BTreeSet<String> =
        categories.iter().chain(hyponyms.iter().flatten()).chain(&unrelated).cloned().collect();
    let mut embeddings = Embeddings::new(config.embedding_dim);
    for w in &vocabulary {
        let v: Vec<f64> = (0..config.embedding_dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        embeddings.insert(w, &v);
    }
    Ok(SynthCorpus { sentences, relations, vocabulary, embeddings, categories })
}
