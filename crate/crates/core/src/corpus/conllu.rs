use std::io::{BufRead, Write};

use crate::{Error, Result};

/// One token of a dependency-parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    /// Lowercased lemma.
    pub lemma: String,
    pub upos: String,
    /// Index of the governor, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

/// A sentence whose head links form a single-rooted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
    children: Vec<Vec<usize>>,
}

impl Sentence {
    /// Build a sentence, validating the tree invariants.
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        let n = tokens.len();
        if n == 0 {
            return Err(Error::data("empty sentence"));
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(Error::data(format!("token ids not contiguous at {}", t.index)));
            }
            if t.head > n {
                return Err(Error::data(format!("token {} has head {} outside sentence", t.index, t.head)));
            }
            if t.head == t.index {
                return Err(Error::data(format!("token {} is its own head", t.index)));
            }
        }
        let roots = tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(Error::data(format!("sentence has {roots} roots")));
        }
        // Every token must reach the root within n steps.
        for t in &tokens {
            let mut cur = t.head;
            let mut steps = 0;
            while cur != 0 {
                cur = tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(Error::data("cycle in head links"));
                }
            }
        }
        let mut children = vec![Vec::new(); n + 1];
        for t in &tokens {
            children[t.head].push(t.index);
        }
        Ok(Sentence { tokens, children })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token with 1-based `index`.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Dependents of the token at `index` (0 yields the root).
    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    /// Chain of indices from `index` up to (and including) the root token.
    pub(crate) fn ancestors(&self, index: usize) -> Vec<usize> {
        let mut chain = vec![index];
        let mut cur = self.tokens[index - 1].head;
        while cur != 0 {
            chain.push(cur);
            cur = self.tokens[cur - 1].head;
        }
        chain
    }
}

/// Result of reading a CoNLL-U stream.
#[derive(Debug, Clone, Default)]
pub struct ConlluCorpus {
    pub sentences: Vec<Sentence>,
    /// Sentences dropped because they were not well-formed trees.
    pub rejected: usize,
}

/// Parse CoNLL-U text. Uses the ID, FORM, LEMMA, UPOS, HEAD and DEPREL
/// columns; multiword-token ranges and empty nodes are skipped.
pub fn parse_conllu<R: BufRead>(reader: R) -> Result<ConlluCorpus> {
    let mut out = ConlluCorpus::default();
    let mut pending: Vec<Token> = Vec::new();

    let flush = |pending: &mut Vec<Token>, out: &mut ConlluCorpus| {
        if pending.is_empty() {
            return;
        }
        match Sentence::new(std::mem::take(pending)) {
            Ok(s) => out.sentences.push(s),
            Err(_) => out.rejected += 1,
        }
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut pending, &mut out);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(lineno, format!("expected 10 columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let index: usize = id.parse().map_err(|_| Error::parse(lineno, format!("bad token id {id:?}")))?;
        if index == 0 {
            return Err(Error::parse(lineno, "token id must be >= 1"));
        }
        let head: usize = cols[6].parse().map_err(|_| Error::parse(lineno, format!("bad head {:?}", cols[6])))?;
        let lemma = match cols[2] {
            "_" | "" => cols[1],
            l => l,
        };
        pending.push(Token {
            index,
            form: cols[1].to_owned(),
            lemma: normalize_lemma(lemma),
            upos: cols[3].to_owned(),
            head,
            deprel: cols[7].to_owned(),
        });
    }
    flush(&mut pending, &mut out);
    Ok(out)
}

/// Write sentences as CoNLL-U. Columns the reader ignores are `_`.
pub fn write_conllu<W: Write>(mut w: W, sentences: &[Sentence]) -> Result<()> {
    for s in sentences {
        for t in s.tokens() {
            writeln!(w, "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_", t.index, t.form, t.lemma, t.upos, t.head, t.deprel)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Lowercase and keep the lemma free of the characters the path notation
/// uses as separators.
fn normalize_lemma(lemma: &str) -> String {
    lemma.to_lowercase().chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}
