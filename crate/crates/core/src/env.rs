//! The edge-flipping decision process: a state is an n-node graph, an action
//! is an unordered node pair, the transition flips that pair, and the reward
//! is either the change in score (telescopic) or the final score paid at the
//! last step (terminal). Episodes last exactly `horizon` steps.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codec::serde_sparse6;
use crate::error::{Error, Result};
use crate::graph::{all_actions, pair_count, FlipAction, Graph, MAX_NODES};
use crate::incremental::{sample_seed, BestGraphStore};
use crate::scoring::score;

/// Horizon used when curriculum starts are enabled.
pub const CURRICULUM_HORIZON: usize = 30;

/// Horizon for empty-start episodes, by size bucket.
pub fn default_horizon(n: usize, curriculum: bool) -> usize {
    if curriculum {
        return CURRICULUM_HORIZON;
    }
    match n {
        0..=20 => 80,
        21..=40 => 160,
        41..=60 => 240,
        61..=80 => 320,
        _ => 434,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    /// `s(G') - s(G)` every step.
    Telescopic,
    /// 0 until the last step, which pays `s(G_H)`.
    Terminal,
}

#[derive(Clone)]
pub enum InitialSource {
    Empty,
    Fixed(Graph),
    /// A padded best graph of size `n - k`, `k <= k_max`.
    Store {
        store: Arc<BestGraphStore>,
        k_max: usize,
    },
}

impl fmt::Debug for InitialSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialSource::Empty => f.write_str("Empty"),
            InitialSource::Fixed(g) => f.debug_tuple("Fixed").field(g).finish(),
            InitialSource::Store { k_max, .. } => {
                f.debug_struct("Store").field("k_max", k_max).finish()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnvConfig {
    pub n: usize,
    pub horizon: usize,
    pub reward: RewardMode,
    pub source: InitialSource,
}

impl EnvConfig {
    /// Telescopic rewards and the default horizon for the source.
    pub fn new(n: usize, source: InitialSource) -> Self {
        let curriculum = !matches!(source, InitialSource::Empty);
        EnvConfig {
            n,
            horizon: default_horizon(n, curriculum),
            reward: RewardMode::Telescopic,
            source,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_NODES {
            return Err(Error::Config(format!(
                "environment size {} must lie within 2..={MAX_NODES}",
                self.n
            )));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if let InitialSource::Fixed(g) = &self.source {
            if g.n() != self.n {
                return Err(Error::SizeMismatch {
                    expected: self.n,
                    actual: g.n(),
                });
            }
        }
        Ok(())
    }

    /// Number of distinct actions, `C(n, 2)`.
    pub fn action_count(&self) -> usize {
        pair_count(self.n)
    }
}

/// Initial state of an episode.
pub fn reset<R: Rng + ?Sized>(cfg: &EnvConfig, rng: &mut R) -> Result<Graph> {
    cfg.validate()?;
    match &cfg.source {
        InitialSource::Empty => Graph::new(cfg.n),
        InitialSource::Fixed(g) => Ok(g.clone()),
        InitialSource::Store { store, k_max } => Ok(sample_seed(store, cfg.n, *k_max, rng)?.graph),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepResult {
    pub state: Graph,
    pub reward: i64,
    /// Steps taken so far, including this one.
    pub step: usize,
    pub done: bool,
}

/// Applies `action` as step number `step_index` (0-based).
pub fn step(
    state: &Graph,
    action: FlipAction,
    cfg: &EnvConfig,
    step_index: usize,
) -> Result<StepResult> {
    if step_index >= cfg.horizon {
        return Err(Error::EpisodeFinished(cfg.horizon));
    }
    if state.n() != cfg.n {
        return Err(Error::SizeMismatch {
            expected: cfg.n,
            actual: state.n(),
        });
    }
    let delta = state.flip_delta(action)?;
    let next = state.flip(action)?;
    let step = step_index + 1;
    let done = step == cfg.horizon;
    let reward = match cfg.reward {
        RewardMode::Telescopic => delta.d_score,
        RewardMode::Terminal if done => score(&next).score,
        RewardMode::Terminal => 0,
    };
    Ok(StepResult {
        state: next,
        reward,
        step,
        done,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeTranscript {
    pub reward_mode: RewardMode,
    #[serde(with = "serde_sparse6")]
    pub initial: Graph,
    pub actions: Vec<FlipAction>,
    pub rewards: Vec<i64>,
    #[serde(rename = "final", with = "serde_sparse6")]
    pub final_graph: Graph,
    /// Highest-scoring of the `H + 1` visited states, earliest on ties.
    #[serde(with = "serde_sparse6")]
    pub best_graph: Graph,
    pub best_score: i64,
}

impl EpisodeTranscript {
    pub fn total_reward(&self) -> i64 {
        self.rewards.iter().sum()
    }

    /// Re-applies the actions to the initial graph.
    pub fn replay(&self) -> Result<Graph> {
        let mut g = self.initial.clone();
        for &a in &self.actions {
            g.flip_in_place(a)?;
        }
        Ok(g)
    }

    pub fn write_jsonl<W: Write>(
        transcripts: &[EpisodeTranscript],
        mut out: W,
    ) -> std::io::Result<()> {
        for t in transcripts {
            serde_json::to_writer(&mut out, t)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> std::io::Result<Vec<EpisodeTranscript>> {
        let mut out = Vec::new();
        for line in input.lines() {
            let line = line?;
            if !line.trim().is_empty() {
                out.push(serde_json::from_str(&line)?);
            }
        }
        Ok(out)
    }
}

/// Runs one episode of exactly `cfg.horizon` steps.
pub fn run_episode<R, P>(cfg: &EnvConfig, mut policy: P, rng: &mut R) -> Result<EpisodeTranscript>
where
    R: Rng + ?Sized,
    P: FnMut(&Graph, &mut R) -> FlipAction,
{
    let initial = reset(cfg, rng)?;
    let mut state = initial.clone();
    let mut best_graph = initial.clone();
    let mut best_score = score(&initial).score;
    let mut current = best_score;
    let mut actions = Vec::with_capacity(cfg.horizon);
    let mut rewards = Vec::with_capacity(cfg.horizon);

    for i in 0..cfg.horizon {
        let action = policy(&state, rng);
        let delta = state.flip_delta(action)?;
        let r = step(&state, action, cfg, i)?;
        current += delta.d_score;
        state = r.state;
        if current > best_score {
            best_score = current;
            best_graph = state.clone();
        }
        actions.push(action);
        rewards.push(r.reward);
    }

    Ok(EpisodeTranscript {
        reward_mode: cfg.reward,
        initial,
        actions,
        rewards,
        final_graph: state,
        best_graph,
        best_score,
    })
}

/// Uniformly random action.
pub fn random_policy<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> FlipAction {
    let n = g.n();
    let i = rng.random_range(0..pair_count(n));
    FlipAction::from_index(i, n).expect("index below pair count")
}

/// Action with the largest score change, ties broken uniformly.
pub fn greedy_policy<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> FlipAction {
    let mut best = i64::MIN;
    let mut ties = Vec::new();
    for a in all_actions(g.n()) {
        let d = g.flip_delta(a).expect("action in range").d_score;
        if d > best {
            best = d;
            ties.clear();
        }
        if d == best {
            ties.push(a);
        }
    }
    *ties.choose(rng).expect("at least one action")
}

/// The flips turning `from` into `to`: their adjacency symmetric difference.
pub fn transition_path(from: &Graph, to: &Graph) -> Result<Vec<FlipAction>> {
    if from.n() != to.n() {
        return Err(Error::SizeMismatch {
            expected: from.n(),
            actual: to.n(),
        });
    }
    Ok(all_actions(from.n())
        .filter(|a| from.has_edge(a.u(), a.v()) != to.has_edge(a.u(), a.v()))
        .collect())
}
