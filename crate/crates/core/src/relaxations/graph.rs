use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use crate::{Error, Result};

/// Simple undirected graph. Vertices are `0..n`, edges are stored as
/// `(i, j)` with `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    pub name: String,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
            name: String::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        complement(&Self::empty(n))
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    /// Builds a graph from 0-based edges; self-loops and out-of-range
    /// vertices are rejected, duplicates merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::VertexOutOfRange {
                    line: 0,
                    vertex: i.max(j) + 1,
                    n,
                });
            }
            if i == j {
                return Err(Error::InvalidInstance(format!(
                    "self-loop at vertex {}",
                    i + 1
                )));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Returns false when the edge was already present.
    fn add_edge(&mut self, i: usize, j: usize) -> bool {
        self.edges.insert((i.min(j), i.max(j)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Pairs `i < j` that are not edges.
    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |j| (0..j).map(move |i| (i, j)))
            .filter(|&(i, j)| !self.has_edge(i, j))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// DIMACS ascii, 1-based.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            let _ = writeln!(out, "c {}", self.name);
        }
        let _ = writeln!(out, "p edge {} {}", self.n, self.edges.len());
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "e {} {}", i + 1, j + 1);
        }
        out
    }
}

/// Same vertices, edge set replaced by all missing pairs.
pub fn complement(g: &Graph) -> Graph {
    let edges = g.non_edges().collect();
    Graph {
        n: g.n,
        edges,
        name: g.name.clone(),
    }
}

/// Parses DIMACS ascii: `c` comments, one `p edge n m` (or `p col n m`)
/// header and `e i j` lines with 1-based vertices. Duplicate edges and a
/// wrong edge count only produce warnings.
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    let mut declared = 0;
    let mut duplicates = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut parts = raw.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        let malformed = |message: &str| Error::MalformedLine {
            line,
            message: message.to_string(),
        };
        match tag {
            "c" => {}
            "p" => {
                if graph.is_some() {
                    return Err(malformed("second problem line"));
                }
                let _format = parts.next().ok_or_else(|| malformed("missing format"))?;
                let n: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| malformed("bad vertex count"))?;
                declared = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| malformed("bad edge count"))?;
                graph = Some(Graph::empty(n));
            }
            "e" => {
                let g = graph.as_mut().ok_or(Error::MissingHeader)?;
                let mut vertex = || -> Result<usize> {
                    parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| malformed("expected two vertex numbers"))
                };
                let (i, j) = (vertex()?, vertex()?);
                for v in [i, j] {
                    if v == 0 || v > g.n {
                        return Err(Error::VertexOutOfRange {
                            line,
                            vertex: v,
                            n: g.n,
                        });
                    }
                }
                if i == j {
                    return Err(malformed("self-loop"));
                }
                if !g.add_edge(i - 1, j - 1) {
                    duplicates += 1;
                }
            }
            _ => return Err(malformed("unknown line type")),
        }
    }
    let g = graph.ok_or(Error::MissingHeader)?;
    if duplicates > 0 {
        warn!("{duplicates} duplicate edge line(s) ignored");
    }
    if g.num_edges() != declared && g.num_edges() + duplicates != declared {
        warn!("header declares {declared} edges, found {}", g.num_edges());
    }
    Ok(g)
}

/// Reads a DIMACS file; the graph is named after the file stem.
pub fn read_dimacs(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(parse_dimacs(&text)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn duplicates_are_merged() {
        let g = parse_dimacs("c x\np edge 2 2\ne 1 2\ne 2 1\n").unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_dimacs("p edge 3 1\ne 1 4"),
            Err(Error::VertexOutOfRange {
                line: 2,
                vertex: 4,
                n: 3
            })
        ));
        assert!(matches!(parse_dimacs("e 1 2"), Err(Error::MissingHeader)));
        assert!(matches!(parse_dimacs("c only"), Err(Error::MissingHeader)));
        assert!(matches!(
            parse_dimacs("p edge 3 1\ne 1 x"),
            Err(Error::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_dimacs("p edge 3 1\nq"),
            Err(Error::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn col_header_accepted() {
        let g = parse_dimacs("p col 4 1\ne 1 4\n").unwrap();
        assert!(g.has_edge(3, 0));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&Graph::complete(3)).num_edges(), 0);
        assert_eq!(complement(&Graph::empty(4)).num_edges(), 6);
        let g = Graph::cycle(7);
        assert_eq!(complement(&complement(&g)), g);
    }

    #[test]
    fn dimacs_round_trip() {
        let g = Graph::cycle(5).with_name("c5");
        let back = parse_dimacs(&g.to_dimacs()).unwrap();
        assert_eq!(
            back.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
    }
}
