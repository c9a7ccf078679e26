use std::collections::BTreeSet;

use super::conllu::Sentence;
use super::path::{DepPath, Direction, PathEdge, X, Y};
use crate::{Error, Result};

/// Longest core path kept, counted in tree edges between the two terms.
pub const MAX_CORE_EDGES: usize = 4;

/// All paths connecting token `x_index` to token `y_index` (1-based).
///
/// Returns the shortest tree path plus one satellite variant per single
/// daughter of x (prepended) and of y (appended) that is not already on the
/// path. Empty when the two tokens are more than [`MAX_CORE_EDGES`] apart.
pub fn extract_paths(sentence: &Sentence, x_index: usize, y_index: usize) -> Result<BTreeSet<DepPath>> {
    extract_paths_between(sentence, (x_index, &[x_index]), (y_index, &[y_index]))
}

/// Like [`extract_paths`], for terms spanning several tokens. Each term is
/// given as its head token and the full token span; span members are never
/// used as satellites of their own term.
pub fn extract_paths_between(
    sentence: &Sentence,
    x: (usize, &[usize]),
    y: (usize, &[usize]),
) -> Result<BTreeSet<DepPath>> {
    let n = sentence.len();
    let (x_head, x_span) = x;
    let (y_head, y_span) = y;
    for idx in [x_head, y_head] {
        if idx == 0 || idx > n {
            return Err(Error::arg(format!("token index {idx} out of range 1..={n}")));
        }
    }
    if x_head == y_head {
        return Err(Error::arg("x and y must be distinct tokens"));
    }

    let mut out = BTreeSet::new();
    let Some(nodes) = tree_path(sentence, x_head, y_head) else {
        return Ok(out);
    };
    let apex = nodes.apex;
    let on_path = &nodes.nodes;

    let core: Vec<PathEdge> = on_path
        .iter()
        .enumerate()
        .map(|(pos, &idx)| {
            let dir = match pos.cmp(&apex) {
                std::cmp::Ordering::Less => Direction::Up,
                std::cmp::Ordering::Equal => Direction::Apex,
                std::cmp::Ordering::Greater => Direction::Down,
            };
            let lemma = if pos == 0 {
                Some(X)
            } else if pos == on_path.len() - 1 {
                Some(Y)
            } else {
                None
            };
            edge(sentence, idx, lemma, dir)
        })
        .collect();

    let excluded = |d: &usize| !on_path.contains(d) && !x_span.contains(d) && !y_span.contains(d);

    for &d in sentence.children(x_head).iter().filter(|d| excluded(d)) {
        let mut edges = Vec::with_capacity(core.len() + 1);
        edges.push(edge(sentence, d, None, Direction::Up));
        edges.extend(core.iter().cloned());
        out.insert(DepPath::new(edges));
    }
    for &d in sentence.children(y_head).iter().filter(|d| excluded(d)) {
        let mut edges = core.clone();
        edges.push(edge(sentence, d, None, Direction::Down));
        out.insert(DepPath::new(edges));
    }
    out.insert(DepPath::new(core));
    Ok(out)
}

fn edge(sentence: &Sentence, idx: usize, placeholder: Option<&str>, dir: Direction) -> PathEdge {
    let t = sentence.token(idx).expect("index validated");
    let lemma = placeholder.unwrap_or(&t.lemma);
    PathEdge::new(lemma, &t.upos, &t.deprel, dir)
}

struct TreePath {
    /// Token indices from x to y.
    nodes: Vec<usize>,
    /// Position of the lowest common ancestor within `nodes`.
    apex: usize,
}

/// Unique tree path between two tokens, or `None` when longer than the cap.
fn tree_path(sentence: &Sentence, x: usize, y: usize) -> Option<TreePath> {
    let up_x = sentence.ancestors(x);
    let up_y = sentence.ancestors(y);
    let (ix, lca) = up_x.iter().enumerate().find(|(_, a)| up_y.contains(a))?;
    let iy = up_y.iter().position(|a| a == lca)?;
    if ix + iy > MAX_CORE_EDGES {
        return None;
    }
    let mut nodes: Vec<usize> = up_x[..=ix].to_vec();
    nodes.extend(up_y[..iy].iter().rev());
    Some(TreePath { nodes, apex: ix })
}
