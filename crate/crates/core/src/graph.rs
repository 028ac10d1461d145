//! Fixed-size simple undirected graphs stored as adjacency bit rows.
//!
//! Everything the searches do per iteration lives here: flipping a node
//! pair, counting 3- and 4-cycles, and computing the exact change in those
//! counts caused by a single flip without building the flipped graph.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported node count.
pub const MAX_NODES: usize = 256;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Number of node pairs (and therefore flip actions) on `n` nodes.
#[inline]
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An unordered node pair, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlipAction {
    u: u16,
    v: u16,
}

impl FlipAction {
    /// Builds the canonical pair for two distinct nodes, in either order.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        if v >= MAX_NODES {
            return Err(Error::NodeOutOfRange {
                node: v,
                n: MAX_NODES,
            });
        }
        Ok(FlipAction {
            u: u as u16,
            v: v as u16,
        })
    }

    #[inline]
    pub fn u(self) -> usize {
        self.u as usize
    }

    #[inline]
    pub fn v(self) -> usize {
        self.v as usize
    }

    /// Position of this pair in the row-major enumeration of pairs of an
    /// `n`-node graph: (0,1), (0,2), ..., (0,n-1), (1,2), ...
    #[inline]
    pub fn index(self, n: usize) -> usize {
        let (u, v) = (self.u(), self.v());
        u * (2 * n - u - 1) / 2 + (v - u - 1)
    }

    /// Inverse of [`FlipAction::index`].
    pub fn from_index(index: usize, n: usize) -> Option<Self> {
        if index >= pair_count(n) {
            return None;
        }
        let mut rest = index;
        for u in 0..n {
            let row = n - u - 1;
            if rest < row {
                return Some(FlipAction {
                    u: u as u16,
                    v: (u + 1 + rest) as u16,
                });
            }
            rest -= row;
        }
        None
    }

    fn check(self, n: usize) -> Result<()> {
        if self.v() >= n {
            Err(Error::NodeOutOfRange { node: self.v(), n })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for FlipAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// All `C(n,2)` actions of an `n`-node graph in index order.
pub fn all_actions(n: usize) -> impl Iterator<Item = FlipAction> {
    (0..n).flat_map(move |u| {
        (u + 1..n).map(move |v| FlipAction {
            u: u as u16,
            v: v as u16,
        })
    })
}

/// Change in (edges, triangles, squares, score) caused by one flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreDelta {
    pub d_edges: i64,
    pub d_triangles: i64,
    pub d_squares: i64,
    pub d_score: i64,
}

impl ScoreDelta {
    fn new(adding: bool, triangles: i64, squares: i64) -> Self {
        let sign = if adding { 1 } else { -1 };
        let d_edges = sign;
        let d_triangles = sign * triangles;
        let d_squares = sign * squares;
        ScoreDelta {
            d_edges,
            d_triangles,
            d_squares,
            d_score: d_edges - d_triangles - d_squares,
        }
    }
}

/// A simple undirected graph on `n` nodes.
///
/// Row `u` is a bitset of the neighbours of `u`, `words` 64-bit words wide.
/// The adjacency is kept symmetric and loop-free, and `edges` always equals
/// half the number of set bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    edges: usize,
}

impl Graph {
    /// The edgeless graph on `n` nodes.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::SizeOutOfRange(n));
        }
        let words = words_for(n);
        Ok(Graph {
            n,
            words,
            adj: vec![0; n * words],
            edges: 0,
        })
    }

    /// Builds a graph from an edge list. Repeated pairs are an error.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n)?;
        for (a, b) in edges {
            let e = FlipAction::new(a, b)?;
            e.check(n)?;
            if g.has_edge(a, b) {
                return Err(Error::Config(format!("duplicate edge {e}")));
            }
            g.flip_unchecked(e.u(), e.v());
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.adj[u * self.words + v / 64] >> (v % 64)) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> BitIter<'_> {
        BitIter::new(self.row(u))
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Returns `G ⊕ e`.
    pub fn flip(&self, e: FlipAction) -> Result<Graph> {
        let mut g = self.clone();
        g.flip_in_place(e)?;
        Ok(g)
    }

    pub fn flip_in_place(&mut self, e: FlipAction) -> Result<()> {
        e.check(self.n)?;
        self.flip_unchecked(e.u(), e.v());
        Ok(())
    }

    /// Toggles the pair `{u, v}`. Callers guarantee `u != v` and both `< n`.
    #[inline]
    pub(crate) fn flip_unchecked(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        let w = self.words;
        self.adj[u * w + v / 64] ^= 1 << (v % 64);
        self.adj[v * w + u / 64] ^= 1 << (u % 64);
        if self.has_edge(u, v) {
            self.edges += 1;
        } else {
            self.edges -= 1;
        }
    }

    /// `|N(u) ∩ N(v)|`.
    #[inline]
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Number of 3-cycles: a third of the summed codegrees over edges.
    pub fn count_triangles(&self) -> u64 {
        let total: u64 = self.edges().map(|(u, v)| self.codegree(u, v) as u64).sum();
        total / 3
    }

    /// Number of 4-cycles: every cycle is counted by both of its diagonals.
    pub fn count_squares(&self) -> u64 {
        let mut total = 0u64;
        for u in 0..self.n {
            for v in u + 1..self.n {
                let c = self.codegree(u, v) as u64;
                total += c * c.saturating_sub(1) / 2;
            }
        }
        total / 2
    }

    /// Exact score change of flipping `e`, without building the flipped graph.
    pub fn flip_delta(&self, e: FlipAction) -> Result<ScoreDelta> {
        e.check(self.n)?;
        Ok(self.flip_delta_unchecked(e.u(), e.v()))
    }

    /// Triangles gained or lost are the common neighbours of `u` and `v`.
    /// Squares gained or lost are the paths `u-x-y-v` with `x ≠ v`, `y ≠ u`.
    #[inline]
    pub(crate) fn flip_delta_unchecked(&self, u: usize, v: usize) -> ScoreDelta {
        let present = self.has_edge(u, v);
        let rv = self.row(v);
        let triangles = self.codegree(u, v) as i64;

        let mut paths = 0i64;
        let mut terms = 0i64;
        for x in self.neighbors(u) {
            if x == v {
                continue;
            }
            terms += 1;
            paths += self
                .row(x)
                .iter()
                .zip(rv)
                .map(|(a, b)| (a & b).count_ones() as i64)
                .sum::<i64>();
        }
        // Every x above is adjacent to u, so when u ~ v each term also
        // counted y = u once.
        if present {
            paths -= terms;
        }
        ScoreDelta::new(!present, triangles, paths)
    }

    /// Appends `k` isolated nodes.
    pub fn pad_nodes(&self, k: usize) -> Result<Graph> {
        let mut g = Graph::new(self.n + k)?;
        for u in 0..self.n {
            let dst = u * g.words;
            g.adj[dst..dst + self.words].copy_from_slice(self.row(u));
        }
        g.edges = self.edges;
        Ok(g)
    }

    /// Graph on nodes `perm[0], perm[1], ...` relabelled so that old node
    /// `perm[i]` becomes node `i`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                actual: perm.len(),
            });
        }
        let mut pos = vec![usize::MAX; self.n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.n {
                return Err(Error::NodeOutOfRange { node: p, n: self.n });
            }
            if pos[p] != usize::MAX {
                return Err(Error::Config("relabelling is not a permutation".into()));
            }
            pos[p] = i;
        }
        Graph::from_edges(self.n, self.edges().map(|(u, v)| (pos[u], pos[v])))
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Iterates the set bits of a bitset slice in increasing order.
pub struct BitIter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl<'a> BitIter<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            index: 0,
            current: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// Small named graphs used by tests and examples.
pub mod named {
    use super::Graph;

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("valid clique")
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("valid star")
    }

    /// Outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5.
    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        Graph::from_edges(10, outer.chain(inner).chain(spokes)).expect("valid petersen")
    }
}
