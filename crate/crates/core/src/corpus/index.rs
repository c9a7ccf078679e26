use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use super::conllu::Sentence;
use super::extract::extract_paths_between;
use super::path::DepPath;
use crate::exec::{self, Exec};
use crate::{tsv, Error, Result};

/// Path multiset for one term pair.
pub type PathCounts = BTreeMap<DepPath, u64>;

/// Paths observed between ordered term pairs, with corpus counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairPathIndex {
    entries: BTreeMap<(String, String), PathCounts>,
}

impl PairPathIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: &str, y: &str, path: DepPath, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry((x.to_owned(), y.to_owned())).or_default().entry(path).or_insert(0) += count;
    }

    /// Add every count of `other` into `self`.
    pub fn merge(&mut self, other: PairPathIndex) {
        for ((x, y), paths) in other.entries {
            let slot = self.entries.entry((x, y)).or_default();
            for (p, c) in paths {
                *slot.entry(p).or_insert(0) += c;
            }
        }
    }

    pub fn get(&self, x: &str, y: &str) -> Option<&PathCounts> {
        self.entries.get(&(x.to_owned(), y.to_owned()))
    }

    /// Total number of path occurrences connecting x and y.
    pub fn cooccurrence(&self, x: &str, y: &str) -> u64 {
        self.get(x, y).map_or(0, |p| p.values().sum())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(String, String), &PathCounts)> {
        self.entries.iter()
    }

    pub fn num_pairs(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_paths(&self) -> BTreeSet<&DepPath> {
        self.entries.values().flat_map(|p| p.keys()).collect()
    }

    /// Occurrence count of each term, summed over every pair it takes part in.
    pub fn term_frequencies(&self) -> BTreeMap<String, u64> {
        let mut freq = BTreeMap::new();
        for ((x, y), paths) in &self.entries {
            let n: u64 = paths.values().sum();
            *freq.entry(x.clone()).or_insert(0) += n;
            *freq.entry(y.clone()).or_insert(0) += n;
        }
        freq
    }

    /// Write `x<TAB>y<TAB>path<TAB>count` rows sorted lexicographically.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        tsv::write_header(&mut w, "pair-path-index")?;
        let mut rows: Vec<(&str, &str, String, u64)> = self
            .entries
            .iter()
            .flat_map(|((x, y), paths)| paths.iter().map(move |(p, c)| (x.as_str(), y.as_str(), p.to_string(), *c)))
            .collect();
        rows.sort();
        for (x, y, p, c) in rows {
            writeln!(w, "{x}\t{y}\t{p}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self> {
        let mut index = PairPathIndex::new();
        for row in tsv::rows(r) {
            let (line, cols) = row?;
            if cols.len() != 4 {
                return Err(Error::parse(line, format!("expected 4 columns, found {}", cols.len())));
            }
            let path: DepPath = cols[2].parse().map_err(|e| Error::parse(line, format!("{e}")))?;
            let count: u64 = cols[3]
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| Error::parse(line, format!("bad count {:?}", cols[3])))?;
            index.add(&cols[0], &cols[1], path, count);
        }
        Ok(index)
    }
}

/// Finds vocabulary terms in sentences by lowercased lemma.
///
/// Multiword terms match contiguous lemma sequences; the token of the span
/// whose head lies outside the span stands in for the term.
#[derive(Debug, Clone)]
pub struct TermMatcher {
    single: HashMap<String, String>,
    multi: Vec<(Vec<String>, String)>,
}

/// A term found in a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermMatch {
    pub term: String,
    pub head: usize,
    pub span: Vec<usize>,
}

impl TermMatcher {
    pub fn new<I, S>(vocabulary: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut single = HashMap::new();
        let mut multi = Vec::new();
        for term in vocabulary {
            let term = term.as_ref().trim().to_lowercase();
            let parts: Vec<String> = term.split_whitespace().map(str::to_owned).collect();
            match parts.len() {
                0 => continue,
                1 => {
                    single.insert(term.clone(), term);
                }
                _ => multi.push((parts, term)),
            }
        }
        if single.is_empty() && multi.is_empty() {
            return Err(Error::arg("vocabulary is empty"));
        }
        multi.sort();
        multi.dedup();
        Ok(TermMatcher { single, multi })
    }

    pub fn find(&self, sentence: &Sentence) -> Vec<TermMatch> {
        let tokens = sentence.tokens();
        let mut found = Vec::new();
        for t in tokens {
            if let Some(term) = self.single.get(&t.lemma) {
                found.push(TermMatch { term: term.clone(), head: t.index, span: vec![t.index] });
            }
        }
        for (parts, term) in &self.multi {
            let k = parts.len();
            if k > tokens.len() {
                continue;
            }
            for start in 0..=tokens.len() - k {
                if tokens[start..start + k].iter().zip(parts).all(|(t, p)| &t.lemma == p) {
                    let span: Vec<usize> = (start + 1..=start + k).collect();
                    let head = span.iter().copied().find(|&i| !span.contains(&tokens[i - 1].head)).unwrap_or(span[0]);
                    found.push(TermMatch { term: term.clone(), head, span });
                }
            }
        }
        found
    }
}

/// Index one sentence: every ordered pair of distinct matched terms with
/// disjoint spans contributes its extracted paths.
fn index_sentence(sentence: &Sentence, matcher: &TermMatcher) -> PairPathIndex {
    let mut index = PairPathIndex::new();
    let found = matcher.find(sentence);
    for a in &found {
        for b in &found {
            if a.term == b.term || a.span.iter().any(|i| b.span.contains(i)) {
                continue;
            }
            let paths = extract_paths_between(sentence, (a.head, &a.span), (b.head, &b.span))
                .expect("matched tokens are in range and distinct");
            for p in paths {
                index.add(&a.term, &b.term, p, 1);
            }
        }
    }
    index
}

/// Build the pair/path index over a corpus using the default execution
/// strategy.
pub fn index_corpus<S, I>(sentences: &[Sentence], vocabulary: I) -> Result<PairPathIndex>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    index_corpus_with(Exec::default(), sentences, &TermMatcher::new(vocabulary)?)
}

/// Build the index with an explicit execution strategy. Sentences are
/// indexed independently and merged in corpus order.
pub fn index_corpus_with(exec: Exec, sentences: &[Sentence], matcher: &TermMatcher) -> Result<PairPathIndex> {
    const CHUNK: usize = 256;
    let chunks: Vec<&[Sentence]> = sentences.chunks(CHUNK).collect();
    let partial = exec::map(exec, &chunks, |_, chunk| {
        let mut idx = PairPathIndex::new();
        for s in chunk.iter() {
            idx.merge(index_sentence(s, matcher));
        }
        idx
    });
    let mut index = PairPathIndex::new();
    for p in partial {
        index.merge(p);
    }
    Ok(index)
}
