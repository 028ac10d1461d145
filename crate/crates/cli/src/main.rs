use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use exsearch_core::codec::{self, archive_read, archive_write, GraphRecord, Provenance};
use exsearch_core::incremental::{campaign_run, BestGraphStore, CampaignConfig};
use exsearch_core::oracle::{oracle, ORACLE_MAX_N};
use exsearch_core::report::{render_csv, render_table, rows_from_manifest, rows_from_store};
use exsearch_core::scoring::{
    reference_csv, reference_lookup, repair_to_feasible, score, upper_bound,
};
use exsearch_core::tabu::{restart_loop_from, TabuConfig};
use exsearch_core::{Error, Graph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "exsearch",
    version,
    about = "Search for graphs without 3- and 4-cycles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabu search with restarts at one size.
    Search(SearchArgs),
    /// Curriculum search over a range of sizes.
    Campaign(CampaignArgs),
    /// Count edges, triangles and squares of sparse6 graphs.
    Verify(VerifyArgs),
    /// Convert between sparse6, edge lists and JSON records.
    Convert(ConvertArgs),
    /// Exact f(n) by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Per-size table of an archive.
    Report(ReportArgs),
    /// Throughput of flips, deltas and tabu steps.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct TabuArgs {
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 5)]
    history: usize,
}

impl TabuArgs {
    fn config(&self) -> TabuConfig {
        TabuConfig {
            history: self.history,
            iterations: self.iterations,
            record_trace: false,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[command(flatten)]
    tabu: TabuArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start from this sparse6 graph instead of the empty graph.
    #[arg(long)]
    start: Option<PathBuf>,
    /// Add the (repaired) best graph to this archive.
    #[arg(long)]
    archive: Option<PathBuf>,
}

#[derive(Args)]
struct CampaignArgs {
    /// Size range a:b.
    #[arg(long, value_parser = parse_range)]
    range: (usize, usize),
    #[arg(long, default_value_t = 4)]
    k_max: usize,
    /// Logical workers per size.
    #[arg(long, default_value_t = 32)]
    workers: usize,
    /// OS threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    tabu: TabuArgs,
    /// Wall-clock budget, e.g. 90s, 10m, 12h.
    #[arg(long, value_parser = humantime::parse_duration, default_value = "10m")]
    budget: Duration,
    /// Stop after this many worker iterations per size.
    #[arg(long)]
    max_runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checkpoint directory; existing contents are merged first.
    #[arg(long, conflicts_with = "resume")]
    archive: Option<PathBuf>,
    /// Continue from a checkpoint directory and keep checkpointing there.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Archive merged into the store before starting.
    #[arg(long)]
    seed_archive: Option<PathBuf>,
    /// Interval between merges of the checkpoint directory.
    #[arg(long, value_parser = humantime::parse_duration, default_value = "60s")]
    pull_interval: Duration,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// sparse6 file with one graph per line; `-` or absent reads stdin.
    path: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Sparse6,
    Edgelist,
    Json,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input file; `-` or absent reads stdin. sparse6 and edge lists are
    /// told apart by the leading `:` or `>>sparse6<<`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sparse6")]
    to: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also add the graph to this archive.
    #[arg(long)]
    archive: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    /// Write the witnesses to this archive.
    #[arg(long)]
    archive: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Archive directory.
    #[arg(long, required_unless_present = "reference")]
    archive: Option<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the built-in reference table as CSV instead.
    #[arg(long)]
    reference: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[command(flatten)]
    tabu: TabuArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a = a
        .trim()
        .parse()
        .map_err(|e| format!("bad lower size {a:?}: {e}"))?;
    let b = b
        .trim()
        .parse()
        .map_err(|e| format!("bad upper size {b:?}: {e}"))?;
    Ok((a, b))
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Io { .. } | Error::Json { .. } => (EXIT_IO, "io"),
            Error::Corrupt { .. } => (EXIT_IO, "corrupt"),
            Error::Decode(_) => (EXIT_IO, "decode"),
            Error::BoundViolation { .. } => (EXIT_INFEASIBLE, "bound-violation"),
            _ => (EXIT_USAGE, "usage"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<codec::DecodeError> for Failure {
    fn from(e: codec::DecodeError) -> Self {
        Error::from(e).into()
    }
}

impl Failure {
    fn io(path: &Path, e: io::Error) -> Self {
        Error::io(path, e).into()
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) if p != Path::new("-") => fs::read(p).map_err(|e| Failure::io(p, e)),
        _ => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::io(Path::new("<stdin>"), e))?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, body: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let tmp = p.with_extension("tmp");
            fs::write(&tmp, body).map_err(|e| Failure::io(&tmp, e))?;
            fs::rename(&tmp, p).map_err(|e| Failure::io(p, e))
        }
        None => io::stdout()
            .write_all(body)
            .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn print_json(v: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("json value serializes")
    );
}

fn cmd_search(a: &SearchArgs) -> CmdResult {
    let cfg = a.tabu.config();
    let start = match &a.start {
        Some(p) => codec::decode_sparse6(&read_input(Some(p))?).map_err(Error::from)?,
        None => Graph::new(a.n)?,
    };
    if start.n() != a.n {
        return Err(Failure::usage(format!(
            "--start graph has {} nodes, --n is {}",
            start.n(),
            a.n
        )));
    }
    if a.restarts == 0 {
        return Err(Failure::usage("--restarts must be at least 1"));
    }
    let started = Instant::now();
    let out = restart_loop_from(&start, &cfg, a.restarts, a.seed)?;
    let repaired = repair_to_feasible(&out.best_graph, &mut ChaCha8Rng::seed_from_u64(a.seed));
    let mut prov = Provenance::new("tabu", a.seed);
    prov.history = Some(cfg.history);
    prov.iterations = Some(cfg.iterations);
    let record = GraphRecord::new(&repaired, prov);
    if let Some(dir) = &a.archive {
        let store = BestGraphStore::new();
        if dir.exists() {
            store.load_archive(dir)?;
        }
        store.submit_record(&record)?;
        store.checkpoint_size(dir, a.n)?;
    }
    print_json(&json!({
        "config": {
            "n": a.n, "restarts": a.restarts, "iterations": cfg.iterations,
            "history": cfg.history, "seed": a.seed,
            "start": a.start.as_ref().map(|p| p.display().to_string()),
        },
        "best_score": out.best_score,
        "edges": repaired.edge_count(),
        "reference": reference_lookup(a.n).map(|r| r.best_known_edges),
        "iterations_used": out.iterations_used,
        "elapsed_secs": started.elapsed().as_secs_f64(),
        "graph": record.graph,
        "certificate": record.certificate,
    }));
    Ok(0)
}

fn cmd_campaign(a: &CampaignArgs) -> CmdResult {
    let cfg = CampaignConfig {
        range: a.range,
        k_max: a.k_max,
        tabu: a.tabu.config(),
        workers_per_size: a.workers,
        threads: a.threads,
        budget: a.budget,
        max_runs_per_size: a.max_runs,
        seed_archive: a.seed_archive.clone(),
        checkpoint_dir: a.resume.clone().or_else(|| a.archive.clone()),
        pull_interval: a.pull_interval,
        seed: a.seed,
    };
    cfg.validate()?;
    if let Some(dir) = &a.resume {
        if !dir.is_dir() {
            return Err(Failure::io(
                dir,
                io::Error::new(io::ErrorKind::NotFound, "no checkpoint directory"),
            ));
        }
    }
    let store = BestGraphStore::new();
    let outcome = campaign_run(&cfg, &store)?;
    let rows = rows_from_store(&store, cfg.sizes());
    let report = json!({ "campaign": outcome, "rows": rows });
    if let Some(dir) = &cfg.checkpoint_dir {
        let body = serde_json::to_vec_pretty(&report).expect("report serializes");
        write_output(Some(&dir.join("report.json")), &body)?;
        write_output(Some(&dir.join("report.csv")), render_csv(&rows).as_bytes())?;
    }
    if a.json {
        print_json(&report);
    } else {
        println!(
            "campaign {}:{} seed {} runs {} improvements {} elapsed {:.1}s",
            cfg.range.0,
            cfg.range.1,
            cfg.seed,
            outcome.runs,
            outcome.improvements,
            outcome.elapsed_secs
        );
        print!("{}", render_table(&rows));
    }
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let input = read_input(a.path.as_deref())?;
    let text = String::from_utf8_lossy(&input);
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::Decode(codec::DecodeError::MissingColon).into());
    }
    let mut all_feasible = true;
    for line in lines {
        let g = codec::decode_sparse6(line.as_bytes())?;
        let s = score(&g);
        let reference = reference_lookup(g.n()).map(|r| r.best_known_edges);
        let bound = upper_bound(g.n());
        all_feasible &= s.is_feasible();
        if a.json {
            println!(
                "{}",
                json!({
                    "n": g.n(), "edges": s.edges, "triangles": s.triangles, "squares": s.squares,
                    "score": s.score, "feasible": s.is_feasible(), "reference": reference, "bound": bound,
                })
            );
        } else {
            println!(
                "n={} edges={} triangles={} squares={} score={} {}, reference={}, bound={}",
                g.n(),
                s.edges,
                s.triangles,
                s.squares,
                s.score,
                if s.is_feasible() {
                    "feasible"
                } else {
                    "infeasible"
                },
                reference
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "-".into()),
                bound
            );
        }
    }
    Ok(if all_feasible { 0 } else { EXIT_INFEASIBLE })
}

fn parse_edgelist(text: &str) -> Result<Graph, Failure> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Failure::usage("empty edge list"))?
        .parse()
        .map_err(|e| Failure::usage(format!("edge list must start with the node count: {e}")))?;
    let mut edges = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => return Err(Failure::usage(format!("bad edge line {line:?}"))),
        }
    }
    Ok(Graph::from_edges(n, edges)?)
}

fn cmd_convert(a: &ConvertArgs) -> CmdResult {
    let input = read_input(a.input.as_deref())?;
    let text = String::from_utf8_lossy(&input);
    let trimmed = text.trim_start();
    let g = if trimmed.starts_with(':') || trimmed.starts_with(">>sparse6<<") {
        codec::decode_sparse6(trimmed.as_bytes())?
    } else {
        parse_edgelist(&text)?
    };
    let body = match a.to {
        Format::Sparse6 => format!("{}\n", codec::encode_sparse6_string(&g)),
        Format::Edgelist => {
            let mut s = format!("{}\n", g.n());
            for (u, v) in g.edges() {
                s += &format!("{u} {v}\n");
            }
            s
        }
        Format::Json => {
            let record = GraphRecord::new(&g, Provenance::new("import", 0));
            serde_json::to_string(&record).expect("record serializes") + "\n"
        }
    };
    write_output(a.output.as_deref(), body.as_bytes())?;
    if let Some(dir) = &a.archive {
        let store = BestGraphStore::new();
        if dir.exists() {
            store.load_archive(dir)?;
        }
        let outcome = store.submit(g.n(), &g, Provenance::new("import", 0))?;
        store.checkpoint_size(dir, g.n())?;
        eprintln!(
            "{}",
            json!({ "archive": dir.display().to_string(), "n": g.n(), "outcome": outcome })
        );
    }
    Ok(0)
}

fn cmd_oracle(a: &OracleArgs) -> CmdResult {
    if a.n == 0 || a.n > ORACLE_MAX_N {
        return Err(Failure::usage(format!(
            "--n must lie within 1..={ORACLE_MAX_N}"
        )));
    }
    let started = Instant::now();
    let r = oracle(a.n)?;
    if let Some(dir) = &a.archive {
        let records: Vec<_> = r
            .witnesses
            .iter()
            .map(|g| GraphRecord::new(g, Provenance::new("oracle", 0)))
            .collect();
        archive_write(&records, dir)?;
    }
    print_json(&json!({
        "config": { "n": a.n },
        "f": r.f(),
        "max_score": r.max_score,
        "witness_classes": r.witnesses.len(),
        "labelled_witnesses": r.labelled_witnesses,
        "graphs_visited": r.graphs_visited,
        "reference": reference_lookup(a.n).map(|e| e.best_known_edges),
        "elapsed_secs": started.elapsed().as_secs_f64(),
        "witnesses": r.witnesses.iter().map(codec::encode_sparse6_string).collect::<Vec<_>>(),
    }));
    Ok(0)
}

fn cmd_report(a: &ReportArgs) -> CmdResult {
    if a.reference {
        write_output(a.csv.as_deref(), reference_csv().as_bytes())?;
        return Ok(0);
    }
    let dir = a.archive.as_ref().expect("clap requires --archive");
    let (manifest, _) = archive_read(dir)?;
    let rows = rows_from_manifest(&manifest);
    print!("{}", render_table(&rows));
    if let Some(csv) = &a.csv {
        write_output(Some(csv), render_csv(&rows).as_bytes())?;
    }
    Ok(0)
}

fn cmd_bench(a: &BenchArgs) -> CmdResult {
    let cfg = a.tabu.config();
    cfg.validate(a.n)?;
    let n = a.n;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);

    // a tabu run from empty gives a realistic graph to measure on
    let g = exsearch_core::tabu::tabu_search(&Graph::new(n)?, &cfg, &mut rng)?.best_graph;
    let actions: Vec<_> = exsearch_core::graph::all_actions(n).collect();

    let t = Instant::now();
    let mut sink = 0i64;
    let rounds = (2_000_000 / actions.len()).max(1);
    for _ in 0..rounds {
        for &e in &actions {
            sink += g.flip_delta(e)?.d_score;
        }
    }
    let deltas = (rounds * actions.len()) as f64 / t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut h = g.clone();
    for i in 0..2_000_000 {
        h.flip_in_place(actions[i % actions.len()])?;
    }
    let flips = 2_000_000.0 / t.elapsed().as_secs_f64();

    let t = Instant::now();
    let s = score(&g);
    let recount_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let out = exsearch_core::tabu::tabu_search(&Graph::new(n)?, &cfg, &mut rng)?;
    let steps = cfg.iterations as f64 / t.elapsed().as_secs_f64();

    print_json(&json!({
        "config": { "n": n, "iterations": cfg.iterations, "history": cfg.history, "seed": a.seed },
        "deltas_per_sec": deltas,
        "flips_per_sec": flips,
        "full_recount_secs": recount_secs,
        "tabu_steps_per_sec": steps,
        "tabu_best_score": out.best_score,
        "graph_score": s.score,
        "checksum": sink,
    }));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => cmd_report(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
