//! Action-tabu local search over single-pair flips.
//!
//! Each iteration evaluates the score change of every pair that was not
//! flipped during the last `history` iterations, moves to a uniformly chosen
//! maximiser, and bans that pair. The best graph ever visited, including the
//! start, is returned.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, FlipAction, Graph, ScoreDelta};
use crate::scoring::{score, ScoreBreakdown};

pub const DEFAULT_HISTORY: usize = 5;
pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_RESTARTS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuConfig {
    /// Number of iterations a flipped pair stays banned.
    pub history: usize,
    pub iterations: usize,
    /// Keep the per-iteration best score and the chosen actions.
    #[serde(default)]
    pub record_trace: bool,
}

impl Default for TabuConfig {
    fn default() -> Self {
        TabuConfig {
            history: DEFAULT_HISTORY,
            iterations: DEFAULT_ITERATIONS,
            record_trace: false,
        }
    }
}

impl TabuConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.history >= pair_count(n) {
            return Err(Error::Config(format!(
                "history {} must be below the {} pairs of a {n}-node graph",
                self.history,
                pair_count(n)
            )));
        }
        Ok(())
    }
}

/// FIFO of recently flipped pairs with constant-time membership.
#[derive(Clone, Debug)]
pub struct TabuState {
    n: usize,
    capacity: usize,
    queue: VecDeque<FlipAction>,
    banned: Vec<bool>,
}

impl TabuState {
    pub fn new(n: usize, history: usize) -> Result<Self> {
        if history >= pair_count(n) {
            return Err(Error::Config(format!(
                "history {history} must be below the {} pairs of a {n}-node graph",
                pair_count(n)
            )));
        }
        Ok(TabuState {
            n,
            capacity: history,
            queue: VecDeque::with_capacity(history),
            banned: vec![false; pair_count(n)],
        })
    }

    pub fn contains(&self, a: FlipAction) -> bool {
        self.banned[a.index(self.n)]
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Bans `a`, evicting the oldest entry when full. With zero capacity
    /// nothing is ever banned.
    pub fn push(&mut self, a: FlipAction) {
        if self.capacity == 0 {
            return;
        }
        if self.queue.len() == self.capacity {
            if let Some(old) = self.queue.pop_front() {
                self.banned[old.index(self.n)] = false;
            }
        }
        self.queue.push_back(a);
        self.banned[a.index(self.n)] = true;
    }

    pub fn iter(&self) -> impl Iterator<Item = FlipAction> + '_ {
        self.queue.iter().copied()
    }
}

/// Uniformly random maximiser of the score change over non-banned pairs.
fn best_action<R: Rng + ?Sized>(
    g: &Graph,
    tabu: &TabuState,
    rng: &mut R,
    ties: &mut Vec<(FlipAction, ScoreDelta)>,
) -> (FlipAction, ScoreDelta) {
    ties.clear();
    let mut best = i64::MIN;
    let n = g.n();
    let mut index = 0;
    for u in 0..n {
        for v in u + 1..n {
            let banned = tabu.banned[index];
            index += 1;
            if banned {
                continue;
            }
            let d = g.flip_delta_unchecked(u, v);
            if d.d_score < best {
                continue;
            }
            if d.d_score > best {
                best = d.d_score;
                ties.clear();
            }
            let a = FlipAction::new(u, v).expect("u < v");
            ties.push((a, d));
        }
    }
    *ties
        .choose(rng)
        .expect("history below pair count leaves a valid action")
}

/// One move: returns `G ⊕ a` and the chosen `a`, which is pushed onto the
/// tabu queue.
pub fn tabu_step<R: Rng + ?Sized>(
    g: &Graph,
    tabu: &mut TabuState,
    rng: &mut R,
) -> (Graph, FlipAction) {
    let mut ties = Vec::new();
    let (a, _) = best_action(g, tabu, rng, &mut ties);
    let mut next = g.clone();
    next.flip_unchecked(a.u(), a.v());
    tabu.push(a);
    (next, a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    #[serde(with = "crate::codec::serde_sparse6")]
    pub best_graph: Graph,
    pub best_score: i64,
    pub iterations_used: usize,
    /// Best score so far after each iteration, when tracing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score_trace: Option<Vec<i64>>,
    /// Action taken at each iteration, when tracing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<FlipAction>>,
}

/// Runs `cfg.iterations` tabu moves from `g0`.
pub fn tabu_search<R: Rng + ?Sized>(
    g0: &Graph,
    cfg: &TabuConfig,
    rng: &mut R,
) -> Result<SearchOutcome> {
    cfg.validate(g0.n())?;
    let mut tabu = TabuState::new(g0.n(), cfg.history)?;
    let mut g = g0.clone();
    let mut current = score(&g);
    let mut best_graph = g.clone();
    let mut best_score = current.score;
    let mut trace = cfg.record_trace.then(|| Vec::with_capacity(cfg.iterations));
    let mut actions = cfg.record_trace.then(|| Vec::with_capacity(cfg.iterations));
    let mut ties = Vec::new();

    for i in 0..cfg.iterations {
        let (a, d) = best_action(&g, &tabu, rng, &mut ties);
        g.flip_unchecked(a.u(), a.v());
        current = current.apply(d);
        tabu.push(a);
        if cfg!(debug_assertions) && i % 100 == 0 {
            debug_assert_eq!(
                current,
                score(&g),
                "incremental score drifted at iteration {i}"
            );
        }
        if current.score > best_score {
            best_score = current.score;
            best_graph.clone_from(&g);
        }
        if let Some(t) = trace.as_mut() {
            t.push(best_score);
        }
        if let Some(acts) = actions.as_mut() {
            acts.push(a);
        }
    }

    Ok(SearchOutcome {
        best_graph,
        best_score,
        iterations_used: cfg.iterations,
        score_trace: trace,
        actions,
    })
}

/// Seed for run `run` of a batch seeded with `seed`.
pub fn run_seed(seed: u64, run: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed
        ^ run
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keeps the higher score; on ties the earlier outcome wins.
pub fn merge_outcomes(outcomes: impl IntoIterator<Item = SearchOutcome>) -> Option<SearchOutcome> {
    outcomes.into_iter().fold(None, |best, o| match best {
        Some(b) if b.best_score >= o.best_score => Some(b),
        _ => Some(o),
    })
}

/// Independent tabu runs from the empty graph, best result kept.
pub fn restart_loop(
    n: usize,
    cfg: &TabuConfig,
    restarts: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    let empty = Graph::new(n)?;
    restart_loop_from(&empty, cfg, restarts, seed)
}

/// Independent tabu runs from `g0`. Run `i` uses [`run_seed`]`(seed, i)`,
/// so the result does not depend on thread scheduling.
pub fn restart_loop_from(
    g0: &Graph,
    cfg: &TabuConfig,
    restarts: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    cfg.validate(g0.n())?;
    let outcomes: Vec<SearchOutcome> = (0..restarts as u64)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed(seed, run));
            tabu_search(g0, cfg, &mut rng)
        })
        .collect::<Result<_>>()?;
    let total = outcomes.iter().map(|o| o.iterations_used).sum();
    let mut best = merge_outcomes(outcomes).expect("at least one run");
    best.iterations_used = total;
    Ok(best)
}

/// Score of the incremental breakdown after applying `path` to `g0`.
pub fn replay(g0: &Graph, path: &[FlipAction]) -> Result<(Graph, ScoreBreakdown)> {
    let mut g = g0.clone();
    let mut s = score(&g);
    for &a in path {
        s = s.apply(g.flip_delta(a)?);
        g.flip_in_place(a)?;
    }
    Ok((g, s))
}
