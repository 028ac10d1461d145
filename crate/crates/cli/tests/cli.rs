use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exsearch"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/appendix_64.s6")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn verify_fixture() {
    let o = run(&["verify", fixture().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "n=64 edges=230 triangles=0 squares=0 score=230 feasible, reference=230, bound=253"
    );
}

#[test]
fn verify_exit_codes() {
    // C4 is infeasible
    let o = run_stdin(&["verify"], ":Cda\n");
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("squares=1"));

    let o = run_stdin(&["verify", "-"], ":@\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n=1 edges=0 "));

    let o = run_stdin(&["verify"], "not sparse6\n");
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "decode");

    assert_eq!(run(&["verify", "/nonexistent/file"]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["campaign", "--range", "9:5"]).status.code(), Some(2));
    assert_eq!(run(&["campaign", "--range", "nine"]).status.code(), Some(2));
    assert_eq!(
        run(&["search", "--n", "10", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["oracle", "--n", "9"]).status.code(), Some(2));
    assert_eq!(
        run(&["search", "--n", "4", "--history", "6"]).status.code(),
        Some(2)
    );
}

#[test]
fn convert_then_verify_preserves_counts() {
    let square = "4\n0 1\n1 2\n2 3\n# closing edge\n3 0\n";
    let s6 = run_stdin(&["convert", "--to", "sparse6"], square);
    assert_eq!(s6.status.code(), Some(0));
    let back = run_stdin(&["convert", "--to", "edgelist"], &stdout(&s6));
    assert_eq!(stdout(&back), "4\n0 1\n0 3\n1 2\n2 3\n");
    let v = run_stdin(&["verify", "--json"], &stdout(&s6));
    let v: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(
        (v["edges"].as_u64(), v["squares"].as_u64()),
        (Some(4), Some(1))
    );

    let rec = run(&["convert", "--to", "json", fixture().to_str().unwrap()]);
    let rec: serde_json::Value = serde_json::from_slice(&rec.stdout).unwrap();
    assert_eq!(
        (rec["n"].as_u64(), rec["edges"].as_u64()),
        (Some(64), Some(230))
    );
}

#[test]
fn convert_imports_into_archive() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "convert",
        fixture().to_str().unwrap(),
        "--archive",
        dir.path().to_str().unwrap(),
        "-o",
        dir.path().join("copy.s6").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = run(&["report", "--archive", dir.path().to_str().unwrap()]);
    let table = stdout(&r);
    let row = table.lines().nth(1).unwrap();
    assert!(
        row.split_whitespace().take(3).eq(["64", "230", "1"]),
        "{row}"
    );
}

#[test]
fn oracle_small() {
    let o = json(&run(&["oracle", "--n", "4"]));
    assert_eq!(
        (o["f"].as_u64(), o["witness_classes"].as_u64()),
        (Some(3), Some(2))
    );
    let o = json(&run(&["oracle", "--n", "6"]));
    assert_eq!(
        (o["f"].as_u64(), o["witness_classes"].as_u64()),
        (Some(6), Some(2))
    );
}

#[test]
fn search_is_deterministic() {
    let a = json(&run(&[
        "search",
        "--n",
        "10",
        "--restarts",
        "32",
        "--seed",
        "4",
    ]));
    let b = json(&run(&[
        "search",
        "--n",
        "10",
        "--restarts",
        "32",
        "--seed",
        "4",
    ]));
    assert_eq!(a["best_score"].as_i64(), Some(15));
    assert_eq!(a["graph"], b["graph"]);
    assert_eq!(a["config"]["seed"].as_u64(), Some(4));
}

#[test]
fn campaign_resume_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&[
        "campaign",
        "--range",
        "5:9",
        "--workers",
        "5",
        "--budget",
        "2m",
        "--max-runs",
        "12",
        "--archive",
        d,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let scores: Vec<String> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect();
    assert_eq!(scores, ["5", "6", "8", "10", "12"]);
    assert!(dir.path().join("report.json").exists());

    let o = run(&[
        "campaign",
        "--range",
        "5:9",
        "--max-runs",
        "1",
        "--seed",
        "7",
        "--resume",
        d,
        "--json",
    ]);
    let report = json(&o);
    let resumed: Vec<i64> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["score"].as_i64().unwrap())
        .collect();
    assert_eq!(resumed, [5, 6, 8, 10, 12]);
    assert_eq!(report["campaign"]["config"]["seed"].as_u64(), Some(7));

    let csv = dir.path().join("out.csv");
    let r = run(&["report", "--archive", d, "--csv", csv.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with(
        "n,score,graphs,normalized,reference,gap,upper_bound,conjectured_limit\n5,5,1,"
    ));
}

#[test]
fn report_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["report", "--archive", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert_eq!(
        run(&["report", "--archive", "/nonexistent/dir"])
            .status
            .code(),
        Some(3)
    );
    let o = run(&["report", "--reference"]);
    assert_eq!(stdout(&o).lines().count(), 201);
    assert!(stdout(&o).contains("\n64,230,false,incremental-tabu lower bound,"));
}

#[test]
fn bench_reports_throughput() {
    let o = json(&run(&["bench", "--n", "16", "--iterations", "50"]));
    assert!(o["deltas_per_sec"].as_f64().unwrap() > 0.0);
    assert_eq!(o["config"]["n"].as_u64(), Some(16));
}
