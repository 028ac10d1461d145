//! The objective `s(G) = e(G) - triangles(G) - squares(G)`, feasibility,
//! the cycle-deleting repair, and the closed-form upper bound on f(n).

mod reference;

pub use reference::{
    reference_csv, reference_lookup, reference_table, ReferenceEntry, EXACT_UP_TO, MONOTONE_UP_TO,
    SOURCE_EXACT, SOURCE_LOWER_BOUND, TABLE_MAX,
};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, ScoreDelta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub edges: u64,
    pub triangles: u64,
    pub squares: u64,
    pub score: i64,
}

impl ScoreBreakdown {
    pub fn new(edges: u64, triangles: u64, squares: u64) -> Self {
        ScoreBreakdown {
            edges,
            triangles,
            squares,
            score: edges as i64 - triangles as i64 - squares as i64,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.triangles == 0 && self.squares == 0
    }

    /// Breakdown after a flip with the given delta.
    pub fn apply(&self, d: ScoreDelta) -> Self {
        ScoreBreakdown::new(
            (self.edges as i64 + d.d_edges) as u64,
            (self.triangles as i64 + d.d_triangles) as u64,
            (self.squares as i64 + d.d_squares) as u64,
        )
    }
}

pub fn score(g: &Graph) -> ScoreBreakdown {
    ScoreBreakdown::new(
        g.edge_count() as u64,
        g.count_triangles(),
        g.count_squares(),
    )
}

/// No 3-cycles and no 4-cycles.
pub fn is_feasible(g: &Graph) -> bool {
    score(g).is_feasible()
}

/// Deletes edges until no 3- or 4-cycle remains.
///
/// Each round removes an edge lying on the most remaining short cycles,
/// ties broken uniformly with `rng`. Every deletion destroys at least one
/// cycle and creates none, so the result has at least `s(g)` edges.
pub fn repair_to_feasible<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Graph {
    let mut g = g.clone();
    let mut best: Vec<(usize, usize)> = Vec::new();
    loop {
        best.clear();
        let mut most = 0i64;
        for (u, v) in g.edges() {
            let d = g.flip_delta_unchecked(u, v);
            let cycles = -(d.d_triangles + d.d_squares);
            if cycles > most {
                most = cycles;
                best.clear();
            }
            if cycles == most && cycles > 0 {
                best.push((u, v));
            }
        }
        match best.choose(rng) {
            Some(&(u, v)) => g.flip_unchecked(u, v),
            None => return g,
        }
    }
}

/// `floor(n * sqrt(n - 1) / 2)` in exact integer arithmetic: the largest
/// `m` with `(2m)^2 <= n^2 (n - 1)`.
pub fn upper_bound(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let n = n as u128;
    let target = n * n * (n - 1);
    (target.isqrt() / 2) as u64
}

/// Conjectured limit of f(n) / (n sqrt n).
pub fn conjectured_limit() -> f64 {
    1.0 / (2.0 * std::f64::consts::SQRT_2)
}

/// `edges / (n sqrt n)`.
pub fn normalized_score(edges: i64, n: usize) -> f64 {
    let n = n as f64;
    edges as f64 / (n * n.sqrt())
}
