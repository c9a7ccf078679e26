//! Dependency-parsed corpus ingestion and path extraction.

mod conllu;
mod extract;
mod index;
mod path;

pub use conllu::{parse_conllu, write_conllu, ConlluCorpus, Sentence, Token};
pub use extract::{extract_paths, extract_paths_between, MAX_CORE_EDGES};
pub use index::{index_corpus, index_corpus_with, PairPathIndex, PathCounts, TermMatcher};
pub use path::{DepPath, Direction, PathEdge};
