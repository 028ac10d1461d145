#![allow(dead_code)]

use exsearch_core::Graph;
use rand::Rng;

/// Triangle and square counts from closed walks of the adjacency matrix:
/// `tr(A^3) = 6t` and `tr(A^4) = 8q + 2m + 2 sum_v d(v)(d(v) - 1)`.
#[allow(clippy::needless_range_loop)]
pub fn walk_counts(g: &Graph) -> (u64, u64, u64) {
    let n = g.n();
    let a: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| g.has_edge(i, j) as u64).collect())
        .collect();
    let mut a2 = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 1 {
                for j in 0..n {
                    a2[i][j] += a[k][j];
                }
            }
        }
    }
    let mut tr3 = 0;
    let mut tr4 = 0;
    for i in 0..n {
        for j in 0..n {
            tr3 += a2[i][j] * a[j][i];
            tr4 += a2[i][j] * a2[j][i];
        }
    }
    let m: u64 = (0..n).map(|i| a2[i][i]).sum::<u64>() / 2;
    let deg_pairs: u64 = (0..n).map(|i| a2[i][i] * a2[i][i].saturating_sub(1)).sum();
    (m, tr3 / 6, (tr4 - 2 * m - 2 * deg_pairs) / 8)
}

pub fn walk_score(g: &Graph) -> i64 {
    let (m, t, q) = walk_counts(g);
    m as i64 - t as i64 - q as i64
}

/// `G(n, p)` with `p` drawn uniformly from `[0, p_max]`.
pub fn random_graph<R: Rng>(n: usize, p_max: f64, rng: &mut R) -> Graph {
    let p = rng.random_range(0.0..=p_max.min(1.0));
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}
