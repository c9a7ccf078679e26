use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Placeholder lemma for the hyponym candidate.
pub const X: &str = "X";
/// Placeholder lemma for the hypernym candidate.
pub const Y: &str = "Y";

/// Direction of an edge along the path from x to y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Dependent to head, climbing toward the apex.
    Up,
    /// Head to dependent, descending away from the apex.
    Down,
    /// The apex itself.
    Apex,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Up => "<",
            Direction::Down => ">",
            Direction::Apex => "-",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Apex => Direction::Apex,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "<" => Some(Direction::Up),
            ">" => Some(Direction::Down),
            "-" => Some(Direction::Apex),
            _ => None,
        }
    }
}

/// One edge of a dependency path.
///
/// Renders as `lemma/pos/dep/dir`. Generalized edges render as the bare POS
/// tag or as `*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathEdge {
    Full { lemma: String, pos: String, dep: String, dir: Direction },
    Pos(String),
    Wildcard,
}

impl PathEdge {
    pub fn new(lemma: impl Into<String>, pos: impl Into<String>, dep: impl Into<String>, dir: Direction) -> Self {
        PathEdge::Full { lemma: lemma.into(), pos: pos.into(), dep: dep.into(), dir }
    }

    pub fn lemma(&self) -> Option<&str> {
        match self {
            PathEdge::Full { lemma, .. } => Some(lemma),
            _ => None,
        }
    }

    pub fn pos(&self) -> Option<&str> {
        match self {
            PathEdge::Full { pos, .. } | PathEdge::Pos(pos) => Some(pos),
            PathEdge::Wildcard => None,
        }
    }

    pub fn dir(&self) -> Option<Direction> {
        match self {
            PathEdge::Full { dir, .. } => Some(*dir),
            _ => None,
        }
    }

    fn is_placeholder(&self, which: &str) -> bool {
        self.lemma() == Some(which)
    }
}

impl fmt::Display for PathEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathEdge::Full { lemma, pos, dep, dir } => write!(f, "{lemma}/{pos}/{dep}/{}", dir.symbol()),
            PathEdge::Pos(pos) => f.write_str(pos),
            PathEdge::Wildcard => f.write_str("*"),
        }
    }
}

impl FromStr for PathEdge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.contains(char::is_whitespace) {
            return Err(Error::arg(format!("bad path edge {s:?}")));
        }
        if s == "*" {
            return Ok(PathEdge::Wildcard);
        }
        if !s.contains('/') {
            return Ok(PathEdge::Pos(s.to_owned()));
        }
        // Split from the right so a lemma may itself contain '/'.
        let mut parts = s.rsplitn(4, '/');
        let (dir, dep, pos, lemma) = (parts.next(), parts.next(), parts.next(), parts.next());
        match (lemma, pos, dep, dir.and_then(Direction::parse)) {
            (Some(lemma), Some(pos), Some(dep), Some(dir)) if !lemma.is_empty() => {
                Ok(PathEdge::new(lemma, pos, dep, dir))
            }
            _ => Err(Error::arg(format!("bad path edge {s:?}"))),
        }
    }
}

/// A dependency path from x's node to y's node, possibly extended by one
/// satellite edge at either end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepPath {
    edges: Vec<PathEdge>,
}

impl DepPath {
    pub fn new(edges: Vec<PathEdge>) -> Self {
        DepPath { edges }
    }

    pub fn edges(&self) -> &[PathEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when the path carries a satellite edge, i.e. does not start at X
    /// or does not end at Y.
    pub fn is_satellite(&self) -> bool {
        match (self.edges.first(), self.edges.last()) {
            (Some(first), Some(last)) => !first.is_placeholder(X) || !last.is_placeholder(Y),
            _ => false,
        }
    }

    /// The same path read from y to x: edges reversed, directions swapped,
    /// placeholders X and Y exchanged.
    pub fn reversed(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .rev()
            .map(|e| match e {
                PathEdge::Full { lemma, pos, dep, dir } => {
                    let lemma = match lemma.as_str() {
                        X => Y.to_owned(),
                        Y => X.to_owned(),
                        _ => lemma.clone(),
                    };
                    PathEdge::Full { lemma, pos: pos.clone(), dep: dep.clone(), dir: dir.reversed() }
                }
                other => other.clone(),
            })
            .collect();
        DepPath { edges }
    }
}

impl fmt::Display for DepPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for DepPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let edges = s.split(' ').map(str::parse).collect::<Result<Vec<_>>>()?;
        if edges.is_empty() {
            return Err(Error::arg("empty path"));
        }
        Ok(DepPath { edges })
    }
}

impl Serialize for DepPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DepPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
