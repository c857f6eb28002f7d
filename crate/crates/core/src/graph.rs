//! Two-colorable graphs and the bit-level syndrome conventions built on them.
//!
//! Vertex `v` corresponds to bit `v` of a [`SyndromeIndex`], bit 0 being the
//! least significant. Every other module relies on this convention.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Largest vertex count a [`Graph`] can hold (masks are `u64`).
pub const MAX_VERTICES: usize = 63;

/// Bit pattern over the vertices; bit `v` holds the eigenvalue exponent of
/// the correlation operator of vertex `v`.
pub type SyndromeIndex = usize;

/// Side of the bipartition a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    A,
    B,
}

/// The standard graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StandardGraph {
    /// Star with center 0 (in A) and leaves `1..n`.
    Ghz(usize),
    /// Path `0 - 1 - ... - (n-1)`.
    LinearCluster(usize),
    /// Ring on an even number of vertices.
    ClosedCluster(usize),
    /// Rectangular lattice, vertex `(r, c)` has index `r * cols + c`.
    GridCluster { rows: usize, cols: usize },
}

impl StandardGraph {
    pub fn kind_name(&self) -> &'static str {
        match self {
            StandardGraph::Ghz(_) => "ghz",
            StandardGraph::LinearCluster(_) => "path",
            StandardGraph::ClosedCluster(_) => "ring",
            StandardGraph::GridCluster { .. } => "grid",
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            StandardGraph::Ghz(n)
            | StandardGraph::LinearCluster(n)
            | StandardGraph::ClosedCluster(n) => n,
            StandardGraph::GridCluster { rows, cols } => rows * cols,
        }
    }
}

impl fmt::Display for StandardGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardGraph::GridCluster { rows, cols } => write!(f, "grid-{rows}x{cols}"),
            other => write!(f, "{}-{}", other.kind_name(), other.vertex_count()),
        }
    }
}

/// An immutable two-colored graph with precomputed neighbor bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    colors: Vec<Color>,
    neighbor_masks: Vec<u64>,
    a_mask: u64,
    b_mask: u64,
    name: String,
}

impl Graph {
    /// Builds a graph from an edge list and two-colors it.
    ///
    /// Each connected component is colored by breadth-first search from its
    /// smallest vertex, which is put in `A`. Neighbors are visited in
    /// ascending order.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidParam(format!(
                "vertex count {n} outside 1..={MAX_VERTICES}"
            )));
        }
        let mut neighbor_masks = vec![0u64; n];
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if neighbor_masks[u] >> v & 1 == 1 {
                return Err(Error::DuplicateEdge(u, v));
            }
            neighbor_masks[u] |= 1 << v;
            neighbor_masks[v] |= 1 << u;
            edges.push((u.min(v), u.max(v)));
        }

        let mut colors: Vec<Option<Color>> = vec![None; n];
        let mut queue = VecDeque::new();
        for root in 0..n {
            if colors[root].is_some() {
                continue;
            }
            colors[root] = Some(Color::A);
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                let cu = colors[u].unwrap();
                let other = match cu {
                    Color::A => Color::B,
                    Color::B => Color::A,
                };
                for w in bits(neighbor_masks[u]) {
                    match colors[w] {
                        None => {
                            colors[w] = Some(other);
                            queue.push_back(w);
                        }
                        Some(c) if c == cu => return Err(Error::OddCycle(u.min(w), u.max(w))),
                        Some(_) => {}
                    }
                }
            }
        }
        let colors: Vec<Color> = colors.into_iter().map(Option::unwrap).collect();
        let a_mask = colors
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Color::A)
            .fold(0u64, |m, (v, _)| m | 1 << v);
        let b_mask = !a_mask & full_mask(n);

        Ok(Graph {
            n,
            edges,
            colors,
            neighbor_masks,
            a_mask,
            b_mask,
            name: format!("custom-{n}"),
        })
    }

    /// Builds one of the standard families.
    pub fn standard(kind: StandardGraph) -> Result<Self> {
        let edges: Vec<(usize, usize)> = match kind {
            StandardGraph::Ghz(n) => {
                require(n >= 2, "GHZ graph needs at least 2 vertices")?;
                (1..n).map(|k| (0, k)).collect()
            }
            StandardGraph::LinearCluster(n) => {
                require(n >= 2, "linear cluster needs at least 2 vertices")?;
                (0..n - 1).map(|k| (k, k + 1)).collect()
            }
            StandardGraph::ClosedCluster(n) => {
                require(n >= 4, "closed cluster needs at least 4 vertices")?;
                require(n % 2 == 0, "closed cluster with odd length is not two-colorable")?;
                (0..n).map(|k| (k, (k + 1) % n)).collect()
            }
            StandardGraph::GridCluster { rows, cols } => {
                require(rows >= 1 && cols >= 1 && rows * cols >= 2, "grid needs at least 2 sites")?;
                let mut e = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        let v = r * cols + c;
                        if c + 1 < cols {
                            e.push((v, v + 1));
                        }
                        if r + 1 < rows {
                            e.push((v, v + cols));
                        }
                    }
                }
                e
            }
        };
        let mut g = Graph::new(kind.vertex_count(), &edges)?;
        g.name = kind.to_string();
        Ok(g)
    }

    /// Parses the text format: a header line `n m`, then `m` lines `u v`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let [n, m] = parse_pair(header, lineno)?;
        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in lines.by_ref().take(m) {
            let [u, v] = parse_pair(line, lineno)?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header announces {m} edges but only {} found",
                edges.len()
            )));
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(Error::Parse(format!("line {lineno}: trailing content after {m} edges")));
        }
        Graph::new(n, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of graph-basis coefficients, `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.neighbor_masks[v]
    }

    pub fn a_mask(&self) -> u64 {
        self.a_mask
    }

    pub fn b_mask(&self) -> u64 {
        self.b_mask
    }

    pub fn mask_of(&self, color: Color) -> u64 {
        match color {
            Color::A => self.a_mask,
            Color::B => self.b_mask,
        }
    }

    pub fn n_a(&self) -> usize {
        self.a_mask.count_ones() as usize
    }

    pub fn n_b(&self) -> usize {
        self.b_mask.count_ones() as usize
    }

    pub fn vertices_of(&self, color: Color) -> impl Iterator<Item = usize> + '_ {
        bits(self.mask_of(color))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbor_masks[v].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Splits an index into its A-part and B-part.
    pub fn syndrome_parts(&self, idx: SyndromeIndex) -> (SyndromeIndex, SyndromeIndex) {
        let idx = idx as u64;
        ((idx & self.a_mask) as usize, (idx & self.b_mask) as usize)
    }
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParam(msg.to_string()))
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<[usize; 2]> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse(format!("line {lineno}: expected two integers, got {line:?}")));
    }
    let mut out = [0; 2];
    for (slot, f) in out.iter_mut().zip(&fields) {
        *slot = f
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: {f:?} is not a nonnegative integer")))?;
    }
    Ok(out)
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates over the set bit positions of `mask`, lowest first.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}
