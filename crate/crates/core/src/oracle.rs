//! Exact f(n) for small n by visiting every labelled n-node graph.
//!
//! Graphs are visited in Gray-code order over the `C(n, 2)` pair bits, so
//! consecutive graphs differ by one flip and the counts are updated with
//! [`Graph::flip_delta`]. The top bits split the space into chunks that run
//! in parallel.

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonical_certificate, Certificate};
use crate::error::{Error, Result};
use crate::graph::{pair_count, FlipAction, Graph};
use crate::scoring::score;

/// Largest size accepted; `2^28` labelled graphs.
pub const ORACLE_MAX_N: usize = 8;

const CHUNK_BITS: usize = 6;

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub n: usize,
    /// Maximum of the score over all labelled graphs.
    pub max_score: i64,
    /// Largest edge count of a graph without 3- and 4-cycles.
    pub max_feasible_edges: u64,
    /// Labelled feasible graphs with `max_feasible_edges` edges.
    pub labelled_witnesses: u64,
    /// One graph per isomorphism class of those, ordered by certificate.
    #[serde(serialize_with = "witnesses_as_sparse6")]
    pub witnesses: Vec<Graph>,
    pub graphs_visited: u64,
}

fn witnesses_as_sparse6<S: serde::Serializer>(
    gs: &[Graph],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(gs.iter().map(crate::codec::encode_sparse6_string))
}

impl OracleResult {
    /// f(n); the maximum score and the feasible maximum coincide.
    pub fn f(&self) -> u64 {
        self.max_feasible_edges
    }
}

struct Enumeration {
    n: usize,
    pairs: Vec<(usize, usize)>,
    low_bits: usize,
    chunks: u64,
}

impl Enumeration {
    fn new(n: usize) -> Self {
        let m = pair_count(n);
        let pairs = (0..m)
            .map(|i| {
                let a = FlipAction::from_index(i, n).expect("index below pair count");
                (a.u(), a.v())
            })
            .collect();
        let high = m.min(CHUNK_BITS);
        Enumeration {
            n,
            pairs,
            low_bits: m - high,
            chunks: 1 << high,
        }
    }

    /// Visits every graph of chunk `c` with `(graph, edges, triangles, squares)`.
    fn for_each(&self, c: u64, mut visit: impl FnMut(&Graph, u64, u64, u64)) {
        let high_edges = (0..CHUNK_BITS)
            .filter(|j| c >> j & 1 == 1)
            .map(|j| self.pairs[self.low_bits + j]);
        let mut g = Graph::from_edges(self.n, high_edges).expect("distinct in-range pairs");
        let s = score(&g);
        let (mut e, mut t, mut q) = (s.edges as i64, s.triangles as i64, s.squares as i64);
        visit(&g, e as u64, t as u64, q as u64);
        for i in 1u64..1 << self.low_bits {
            let (u, v) = self.pairs[i.trailing_zeros() as usize];
            let d = g.flip_delta_unchecked(u, v);
            g.flip_unchecked(u, v);
            e += d.d_edges;
            t += d.d_triangles;
            q += d.d_squares;
            visit(&g, e as u64, t as u64, q as u64);
        }
    }
}

/// Exhaustive f(n) with isomorphism-deduplicated witnesses.
pub fn oracle(n: usize) -> Result<OracleResult> {
    if n == 0 || n > ORACLE_MAX_N {
        return Err(Error::Config(format!(
            "oracle needs 1 <= n <= {ORACLE_MAX_N}, got {n}"
        )));
    }
    let en = Enumeration::new(n);

    let (max_score, max_edges, visited) = (0..en.chunks)
        .into_par_iter()
        .map(|c| {
            let (mut best_s, mut best_e, mut count) = (i64::MIN, 0u64, 0u64);
            en.for_each(c, |_, e, t, q| {
                best_s = best_s.max(e as i64 - t as i64 - q as i64);
                if t == 0 && q == 0 {
                    best_e = best_e.max(e);
                }
                count += 1;
            });
            (best_s, best_e, count)
        })
        .reduce(
            || (i64::MIN, 0, 0),
            |a, b| (a.0.max(b.0), a.1.max(b.1), a.2 + b.2),
        );

    let (labelled, mut classes) = (0..en.chunks)
        .into_par_iter()
        .map(|c| {
            let mut labelled = 0u64;
            let mut classes: Vec<(Certificate, Graph)> = Vec::new();
            en.for_each(c, |g, e, t, q| {
                if t == 0 && q == 0 && e == max_edges {
                    labelled += 1;
                    let cert = canonical_certificate(g);
                    if !classes.iter().any(|(c, _)| *c == cert) {
                        classes.push((cert, g.clone()));
                    }
                }
            });
            (labelled, classes)
        })
        .reduce(
            || (0, Vec::new()),
            |(la, mut ca), (lb, cb)| {
                for (cert, g) in cb {
                    if !ca.iter().any(|(c, _)| *c == cert) {
                        ca.push((cert, g));
                    }
                }
                (la + lb, ca)
            },
        );
    classes.sort_by(|a, b| a.0.cmp(&b.0));

    Ok(OracleResult {
        n,
        max_score,
        max_feasible_edges: max_edges,
        labelled_witnesses: labelled,
        witnesses: classes.into_iter().map(|(_, g)| g).collect(),
        graphs_visited: visited,
    })
}
