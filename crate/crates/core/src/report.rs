//! Per-size summaries: best score, normalized score `score / (n sqrt n)`,
//! the reference value and the gap to it, as a text table or CSV.

use serde::Serialize;

use crate::codec::Manifest;
use crate::incremental::BestGraphStore;
use crate::scoring::{conjectured_limit, normalized_score, reference_lookup, upper_bound};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub score: i64,
    pub graphs: usize,
    pub normalized: f64,
    pub reference: Option<usize>,
    /// `score - reference`.
    pub gap: Option<i64>,
    pub upper_bound: u64,
    pub conjectured_limit: f64,
}

impl ReportRow {
    pub fn new(n: usize, score: i64, graphs: usize) -> Self {
        let reference = reference_lookup(n).map(|r| r.best_known_edges);
        ReportRow {
            n,
            score,
            graphs,
            normalized: normalized_score(score, n),
            reference,
            gap: reference.map(|r| score - r as i64),
            upper_bound: upper_bound(n),
            conjectured_limit: conjectured_limit(),
        }
    }
}

pub fn rows_from_store(
    store: &BestGraphStore,
    sizes: impl IntoIterator<Item = usize>,
) -> Vec<ReportRow> {
    sizes
        .into_iter()
        .filter_map(|n| Some(ReportRow::new(n, store.best_score(n)?, store.count(n))))
        .collect()
}

pub fn rows_from_manifest(manifest: &Manifest) -> Vec<ReportRow> {
    let mut rows: Vec<_> = manifest
        .iter()
        .filter(|m| m.count > 0)
        .map(|m| ReportRow::new(m.size, m.best_score, m.count))
        .collect();
    rows.sort_by_key(|r| r.n);
    rows
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

pub fn render_table(rows: &[ReportRow]) -> String {
    let mut out = format!(
        "{:>4} {:>6} {:>6} {:>10} {:>9} {:>5} {:>6} {:>8}\n",
        "n", "score", "graphs", "normalized", "reference", "gap", "bound", "limit"
    );
    for r in rows {
        out += &format!(
            "{:>4} {:>6} {:>6} {:>10.4} {:>9} {:>5} {:>6} {:>8.5}\n",
            r.n,
            r.score,
            r.graphs,
            r.normalized,
            opt(r.reference),
            opt(r.gap),
            r.upper_bound,
            r.conjectured_limit
        );
    }
    out
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out =
        String::from("n,score,graphs,normalized,reference,gap,upper_bound,conjectured_limit\n");
    for r in rows {
        out += &format!(
            "{},{},{},{:.6},{},{},{},{:.6}\n",
            r.n,
            r.score,
            r.graphs,
            r.normalized,
            r.reference.map(|v| v.to_string()).unwrap_or_default(),
            r.gap.map(|v| v.to_string()).unwrap_or_default(),
            r.upper_bound,
            r.conjectured_limit
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_values() {
        let r = ReportRow::new(50, 175, 1);
        assert!((r.normalized - 0.4950).abs() < 5e-5);
        assert_eq!(
            (r.reference, r.gap, r.upper_bound),
            (Some(175), Some(0), 175)
        );
        assert!((r.conjectured_limit - 0.35355).abs() < 5e-6);
        let r = ReportRow::new(300, 10, 1);
        assert_eq!((r.reference, r.gap), (None, None));
    }

    #[test]
    fn renders() {
        let rows = vec![ReportRow::new(10, 14, 3), ReportRow::new(201, 5, 1)];
        let csv = render_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("\n10,14,3,0.442719,15,-1,15,0.353553\n"));
        assert!(csv.ends_with("201,5,1,0.001755,,,1421,0.353553\n"));
        let table = render_table(&rows);
        assert!(table.lines().nth(1).unwrap().contains("0.4427"));
        assert_eq!(render_table(&[]).lines().count(), 1);
    }
}
