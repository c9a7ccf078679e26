//! Pre-trained word vectors in the plain text format: one token per line
//! followed by its whitespace-separated components.

use std::collections::HashMap;
use std::io::BufRead;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    dim: usize,
    index: HashMap<String, usize>,
    words: Vec<String>,
    data: Vec<f64>,
}

impl Embeddings {
    pub fn new(dim: usize) -> Self {
        Embeddings { dim, index: HashMap::new(), words: Vec::new(), data: Vec::new() }
    }

    /// Read the text format. The dimension is taken from the first entry and
    /// enforced afterwards; a word2vec-style `count dim` header is skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut emb: Option<Embeddings> = None;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let values: Vec<&str> = fields.collect();
            if lineno == 1 && values.len() == 1 && word.parse::<usize>().is_ok() && values[0].parse::<usize>().is_ok() {
                continue;
            }
            let vector = values
                .iter()
                .map(|v| v.parse::<f64>().ok().filter(|f| f.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::parse(lineno, "non-numeric vector component"))?;
            let e = emb.get_or_insert_with(|| Embeddings::new(vector.len()));
            if vector.is_empty() || vector.len() != e.dim {
                return Err(Error::parse(lineno, format!("expected {} components, found {}", e.dim, vector.len())));
            }
            e.insert(word, &vector);
        }
        emb.ok_or_else(|| Error::data("embedding file has no entries"))
    }

    /// Add or replace the vector of `word`.
    pub fn insert(&mut self, word: &str, vector: &[f64]) {
        assert_eq!(vector.len(), self.dim, "vector dimension mismatch");
        match self.index.get(word) {
            Some(&row) => self.data[row * self.dim..(row + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(word.to_owned(), self.words.len());
                self.words.push(word.to_owned());
                self.data.extend_from_slice(vector);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Vector of a term. Multiword terms are also tried with `_` joins.
    pub fn get(&self, term: &str) -> Option<&[f64]> {
        let row = self.index.get(term).or_else(|| {
            if term.contains(' ') {
                self.index.get(&term.replace(' ', "_"))
            } else {
                None
            }
        })?;
        Some(&self.data[row * self.dim..(row + 1) * self.dim])
    }
}
