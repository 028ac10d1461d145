//! Curriculum search: per-size workers seeded from the best graphs of
//! smaller sizes padded with isolated nodes, sharing one store of
//! best-scoring graphs.
//!
//! A worker iteration samples `k` from the populated donor sizes `n-1 ..
//! n-K`, pads a donor graph with `k` isolated nodes, runs tabu search from
//! it, deletes short cycles from the result and submits it. The store keeps,
//! per size, only graphs at the best score seen so far, one per isomorphism
//! class.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_certificate, Certificate};
use crate::codec::{self, GraphRecord, Provenance, SizeManifest};
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, MAX_NODES};
use crate::scoring::{repair_to_feasible, score, upper_bound};
use crate::tabu::{run_seed, tabu_search, TabuConfig};

pub const DEFAULT_K_MAX: usize = 4;
pub const DEFAULT_WORKERS_PER_SIZE: usize = 32;

/// What [`BestGraphStore::submit`] did with a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubmitOutcome {
    /// Strictly better: the slot now holds only this graph.
    Improved,
    /// Ties the slot best and is a new isomorphism class.
    Added,
    /// Ties the slot best but is isomorphic to a stored graph.
    Duplicate,
    /// Below the slot best.
    Rejected,
}

impl SubmitOutcome {
    pub fn changed(self) -> bool {
        matches!(self, SubmitOutcome::Improved | SubmitOutcome::Added)
    }
}

#[derive(Default)]
struct Slot {
    best: Option<i64>,
    graphs: Vec<Graph>,
    records: Vec<GraphRecord>,
    certificates: HashSet<Certificate>,
}

/// Per-size sets of best graphs, safe to share between threads.
pub struct BestGraphStore {
    slots: Vec<Mutex<Slot>>,
    checkpoint_locks: Vec<Mutex<()>>,
    version: AtomicU64,
}

impl Default for BestGraphStore {
    fn default() -> Self {
        Self::new()
    }
}

impl BestGraphStore {
    pub fn new() -> Self {
        BestGraphStore {
            slots: (0..=MAX_NODES)
                .map(|_| Mutex::new(Slot::default()))
                .collect(),
            checkpoint_locks: (0..=MAX_NODES).map(|_| Mutex::new(())).collect(),
            version: AtomicU64::new(0),
        }
    }

    fn slot(&self, n: usize) -> Result<std::sync::MutexGuard<'_, Slot>> {
        let slot = self
            .slots
            .get(n)
            .filter(|_| n > 0)
            .ok_or(Error::SizeOutOfRange(n))?;
        Ok(slot.lock().unwrap_or_else(|p| p.into_inner()))
    }

    /// Number of accepted changes over the store's lifetime.
    pub fn version(&self) -> u64 {
        self.version.load(Ordering::Acquire)
    }

    pub fn best_score(&self, n: usize) -> Option<i64> {
        self.slot(n).ok().and_then(|s| s.best)
    }

    pub fn count(&self, n: usize) -> usize {
        self.slot(n).map(|s| s.graphs.len()).unwrap_or(0)
    }

    pub fn graphs(&self, n: usize) -> Vec<Graph> {
        self.slot(n).map(|s| s.graphs.clone()).unwrap_or_default()
    }

    pub fn records(&self, n: usize) -> Vec<GraphRecord> {
        self.slot(n).map(|s| s.records.clone()).unwrap_or_default()
    }

    /// Sizes with at least one graph.
    pub fn sizes(&self) -> Vec<usize> {
        (1..=MAX_NODES).filter(|&n| self.count(n) > 0).collect()
    }

    /// Offers `candidate` to slot `n`.
    pub fn submit(
        &self,
        n: usize,
        candidate: &Graph,
        provenance: Provenance,
    ) -> Result<SubmitOutcome> {
        self.submit_inner(n, candidate, provenance, None)
    }

    /// Offers an archived record, trusting its stored certificate.
    pub fn submit_record(&self, record: &GraphRecord) -> Result<SubmitOutcome> {
        let g = record
            .decode()
            .map_err(|why| Error::Config(format!("bad record: {why}")))?;
        self.submit_inner(
            record.n,
            &g,
            record.provenance.clone(),
            Some(record.certificate.clone()),
        )
    }

    fn submit_inner(
        &self,
        n: usize,
        candidate: &Graph,
        provenance: Provenance,
        certificate: Option<Certificate>,
    ) -> Result<SubmitOutcome> {
        if candidate.n() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: candidate.n(),
            });
        }
        let s = score(candidate);
        if s.is_feasible() && s.edges > upper_bound(n) {
            return Err(Error::BoundViolation {
                n,
                edges: s.edges as usize,
                bound: upper_bound(n) as usize,
            });
        }
        if matches!(self.slot(n)?.best, Some(best) if s.score < best) {
            return Ok(SubmitOutcome::Rejected);
        }

        // Canonical labelling is the expensive part; do it unlocked.
        let cert = certificate.unwrap_or_else(|| canonical_certificate(candidate));
        let record = GraphRecord::with_certificate(candidate, provenance, cert.clone());

        let mut slot = self.slot(n)?;
        let outcome = match slot.best {
            Some(best) if s.score < best => SubmitOutcome::Rejected,
            Some(best) if s.score == best => {
                if slot.certificates.contains(&cert) {
                    SubmitOutcome::Duplicate
                } else {
                    slot.certificates.insert(cert);
                    slot.graphs.push(candidate.clone());
                    slot.records.push(record);
                    SubmitOutcome::Added
                }
            }
            _ => {
                slot.best = Some(s.score);
                slot.certificates.clear();
                slot.certificates.insert(cert);
                slot.graphs = vec![candidate.clone()];
                slot.records = vec![record];
                SubmitOutcome::Improved
            }
        };
        if outcome.changed() {
            self.version.fetch_add(1, Ordering::AcqRel);
        }
        Ok(outcome)
    }

    /// Merges every record of an archive directory. Returns how many
    /// records changed the store.
    pub fn load_archive(&self, dir: &Path) -> Result<usize> {
        let mut changed = 0;
        for r in &codec::archive_records(dir)? {
            if self.submit_record(r)?.changed() {
                changed += 1;
            }
        }
        Ok(changed)
    }

    /// Writes slot `n` to `dir`, replacing what was there.
    pub fn checkpoint_size(&self, dir: &Path, n: usize) -> Result<SizeManifest> {
        let _writer = self.checkpoint_locks[n]
            .lock()
            .unwrap_or_else(|p| p.into_inner());
        let records = self.records(n);
        codec::archive_write_size(dir, n, &records)
    }

    /// Writes every populated slot.
    pub fn checkpoint_all(&self, dir: &Path) -> Result<Vec<SizeManifest>> {
        self.sizes()
            .into_iter()
            .map(|n| self.checkpoint_size(dir, n))
            .collect()
    }
}

/// A padded donor graph.
#[derive(Clone, Debug)]
pub struct Seed {
    pub graph: Graph,
    pub k: usize,
    pub donor_size: usize,
}

/// Picks `k` uniformly among the populated donor sizes `n-1 ..= n-k_max`,
/// then a donor graph uniformly within that slot, and pads it to size `n`.
pub fn sample_seed<R: Rng + ?Sized>(
    store: &BestGraphStore,
    n: usize,
    k_max: usize,
    rng: &mut R,
) -> Result<Seed> {
    let ks: Vec<usize> = (1..=k_max)
        .filter(|&k| k < n && store.count(n - k) > 0)
        .collect();
    let &k = ks.choose(rng).ok_or(Error::NoDonor { n, k_max })?;
    let donors = store.graphs(n - k);
    let donor = donors.choose(rng).ok_or(Error::NoDonor { n, k_max })?;
    Ok(Seed {
        graph: donor.pad_nodes(k)?,
        k,
        donor_size: n - k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Smallest and largest size searched.
    pub range: (usize, usize),
    pub k_max: usize,
    pub tabu: TabuConfig,
    pub workers_per_size: usize,
    /// OS threads; defaults to the available parallelism.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Wall-clock budget.
    #[serde(with = "duration_secs")]
    pub budget: Duration,
    /// Stop after this many worker iterations per size.
    #[serde(default)]
    pub max_runs_per_size: Option<usize>,
    /// Archive merged into the store before starting.
    #[serde(default)]
    pub seed_archive: Option<PathBuf>,
    /// Archive written on every improvement and at the end; also read on
    /// start and periodically to pick up other processes' results.
    #[serde(default)]
    pub checkpoint_dir: Option<PathBuf>,
    #[serde(with = "duration_secs")]
    pub pull_interval: Duration,
    pub seed: u64,
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            range: (5, 20),
            k_max: DEFAULT_K_MAX,
            tabu: TabuConfig::default(),
            workers_per_size: DEFAULT_WORKERS_PER_SIZE,
            threads: None,
            budget: Duration::from_secs(60),
            max_runs_per_size: None,
            seed_archive: None,
            checkpoint_dir: None,
            pull_interval: Duration::from_secs(60),
            seed: 0,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.range;
        if a == 0 || b > MAX_NODES {
            return Err(Error::Config(format!(
                "range {a}:{b} must lie within 1:{MAX_NODES}"
            )));
        }
        if a > b {
            return Err(Error::Config(format!("empty range {a}:{b}")));
        }
        if self.k_max == 0 {
            return Err(Error::Config("k-max must be at least 1".into()));
        }
        if self.workers_per_size == 0 {
            return Err(Error::Config("workers per size must be at least 1".into()));
        }
        if self.tabu.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sizes(&self) -> std::ops::RangeInclusive<usize> {
        self.range.0..=self.range.1
    }

    /// Tabu settings for size `n`, with the history clamped below the pair
    /// count of very small graphs.
    pub fn tabu_for(&self, n: usize) -> TabuConfig {
        let mut t = self.tabu;
        t.history = t.history.min(pair_count(n).saturating_sub(1));
        t
    }
}

/// Result of one worker iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerStep {
    pub n: usize,
    pub k: Option<usize>,
    pub score: i64,
    pub outcome: SubmitOutcome,
    pub rng_seed: u64,
}

/// One iteration of the size-`n` worker.
pub fn worker_step(
    store: &BestGraphStore,
    n: usize,
    cfg: &CampaignConfig,
    rng_seed: u64,
) -> Result<WorkerStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (start, k) = match sample_seed(store, n, cfg.k_max, &mut rng) {
        Ok(seed) => (seed.graph, Some(seed.k)),
        Err(Error::NoDonor { .. }) => (Graph::new(n)?, None),
        Err(e) => return Err(e),
    };

    let tabu = cfg.tabu_for(n);
    let best = if pair_count(n) == 0 {
        start
    } else {
        tabu_search(&start, &tabu, &mut rng)?.best_graph
    };
    let found = repair_to_feasible(&best, &mut rng);

    let mut provenance = Provenance::new("incremental-tabu", rng_seed);
    provenance.k = k;
    provenance.seed_size = k.map(|k| n - k);
    provenance.history = Some(tabu.history);
    provenance.iterations = Some(tabu.iterations);

    let outcome = store.submit(n, &found, provenance)?;
    Ok(WorkerStep {
        n,
        k,
        score: score(&found).score,
        outcome,
        rng_seed,
    })
}

/// When a worker or campaign should stop.
#[derive(Clone, Copy, Debug)]
pub struct StopCondition<'a> {
    pub deadline: Option<Instant>,
    pub max_runs: Option<usize>,
    pub flag: Option<&'a AtomicBool>,
}

impl StopCondition<'_> {
    fn reached(&self, runs: usize) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
            || self.max_runs.is_some_and(|m| runs >= m)
            || self.flag.is_some_and(|f| f.load(Ordering::Relaxed))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerStats {
    pub runs: usize,
    pub improvements: usize,
    pub additions: usize,
}

/// The size-`n` worker: repeats [`worker_step`] until `stop`, writing slot
/// `n` to `checkpoint` whenever it changes.
pub fn worker_loop(
    store: &BestGraphStore,
    n: usize,
    cfg: &CampaignConfig,
    worker_id: u64,
    stop: StopCondition<'_>,
    checkpoint: Option<&Path>,
) -> Result<WorkerStats> {
    let mut stats = WorkerStats::default();
    while !stop.reached(stats.runs) {
        let seed = run_seed(
            cfg.seed ^ worker_id.rotate_left(32),
            ((n as u64) << 40) | stats.runs as u64,
        );
        let step = worker_step(store, n, cfg, seed)?;
        stats.runs += 1;
        match step.outcome {
            SubmitOutcome::Improved => stats.improvements += 1,
            SubmitOutcome::Added => stats.additions += 1,
            _ => {}
        }
        if let (true, Some(dir)) = (step.outcome.changed(), checkpoint) {
            store.checkpoint_size(dir, n)?;
        }
    }
    Ok(stats)
}

/// Single-threaded curriculum: sizes in increasing order, `runs_per_size`
/// worker iterations each, repeated for `rounds` passes. Deterministic for
/// a given store state and seed.
pub fn curriculum_sweep(
    store: &BestGraphStore,
    cfg: &CampaignConfig,
    runs_per_size: usize,
    rounds: usize,
) -> Result<Vec<WorkerStep>> {
    cfg.validate()?;
    let mut steps = Vec::new();
    for round in 0..rounds {
        for n in cfg.sizes() {
            for r in 0..runs_per_size {
                let id = ((round * MAX_NODES + n) * runs_per_size + r) as u64;
                steps.push(worker_step(store, n, cfg, run_seed(cfg.seed, id))?);
            }
        }
    }
    Ok(steps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignOutcome {
    pub config: CampaignConfig,
    pub runs: usize,
    pub improvements: usize,
    pub elapsed_secs: f64,
}

/// Runs workers for every size in the range until the budget or run cap is
/// reached, then flushes the store.
///
/// Worker iterations are spread over a fixed pool of threads: job `j` runs
/// one iteration of the worker for size `a + j mod (b - a + 1)`. With
/// `workers_per_size` logical workers per size, up to that many jobs per
/// size are in flight at once.
pub fn campaign_run(cfg: &CampaignConfig, store: &BestGraphStore) -> Result<CampaignOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    if let Some(dir) = &cfg.seed_archive {
        store.load_archive(dir)?;
    }
    if let Some(dir) = &cfg.checkpoint_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        store.load_archive(dir)?;
    }

    let sizes: Vec<usize> = cfg.sizes().collect();
    let logical = sizes.len() * cfg.workers_per_size;
    let threads = cfg
        .threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .min(logical)
        .max(1);
    let total_jobs = cfg.max_runs_per_size.map(|m| m * sizes.len());
    let deadline = started + cfg.budget;

    let next_job = AtomicUsize::new(0);
    let improvements = AtomicUsize::new(0);
    let runs = AtomicUsize::new(0);
    let failed: Mutex<Option<Error>> = Mutex::new(None);
    let stop = AtomicBool::new(false);
    let last_pull = Mutex::new(Instant::now());

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) || Instant::now() >= deadline {
                    break;
                }
                let job = next_job.fetch_add(1, Ordering::Relaxed);
                if total_jobs.is_some_and(|t| job >= t) {
                    break;
                }
                let n = sizes[job % sizes.len()];
                let result =
                    worker_step(store, n, cfg, run_seed(cfg.seed, job as u64)).and_then(|step| {
                        if step.outcome.changed() {
                            if step.outcome == SubmitOutcome::Improved {
                                improvements.fetch_add(1, Ordering::Relaxed);
                            }
                            if let Some(dir) = &cfg.checkpoint_dir {
                                store.checkpoint_size(dir, n)?;
                            }
                        }
                        runs.fetch_add(1, Ordering::Relaxed);
                        pull_if_due(store, cfg, &last_pull)
                    });
                if let Err(e) = result {
                    failed
                        .lock()
                        .unwrap_or_else(|p| p.into_inner())
                        .get_or_insert(e);
                    stop.store(true, Ordering::Relaxed);
                    break;
                }
            });
        }
    });

    if let Some(e) = failed.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(e);
    }
    if let Some(dir) = &cfg.checkpoint_dir {
        store.checkpoint_all(dir)?;
    }
    Ok(CampaignOutcome {
        config: cfg.clone(),
        runs: runs.into_inner(),
        improvements: improvements.into_inner(),
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

fn pull_if_due(
    store: &BestGraphStore,
    cfg: &CampaignConfig,
    last_pull: &Mutex<Instant>,
) -> Result<()> {
    let Some(dir) = &cfg.checkpoint_dir else {
        return Ok(());
    };
    {
        let mut last = last_pull.lock().unwrap_or_else(|p| p.into_inner());
        if last.elapsed() < cfg.pull_interval {
            return Ok(());
        }
        *last = Instant::now();
    }
    store.load_archive(dir).map(|_| ())
}
