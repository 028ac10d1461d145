//! Directory archive of graphs: one `nNNN/` subdirectory per size holding a
//! line-delimited `records.jsonl` and a `manifest.json` summary.
//!
//! Files are replaced atomically (write to a temporary name, then rename).
//! Reading cross-checks every record against its sparse6 payload and the
//! manifest against the records.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{decode_sparse6, encode_sparse6_string};
use crate::canon::{canonical_certificate, Certificate};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scoring::score;

const RECORDS_FILE: &str = "records.jsonl";
const MANIFEST_FILE: &str = "manifest.json";

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Where a graph came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// `tabu`, `incremental-tabu`, `oracle`, `import`, ...
    pub method: String,
    /// Size of the donor graph (n - k) for curriculum runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub rng_seed: u64,
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl Provenance {
    pub fn new(method: impl Into<String>, rng_seed: u64) -> Self {
        Provenance {
            method: method.into(),
            seed_size: None,
            k: None,
            rng_seed,
            timestamp: unix_now(),
            history: None,
            iterations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    /// sparse6, `:`-prefixed, no header.
    pub graph: String,
    pub n: usize,
    pub edges: usize,
    pub score: i64,
    pub provenance: Provenance,
    pub certificate: Certificate,
}

impl GraphRecord {
    pub fn new(g: &Graph, provenance: Provenance) -> Self {
        Self::with_certificate(g, provenance, canonical_certificate(g))
    }

    pub fn with_certificate(g: &Graph, provenance: Provenance, certificate: Certificate) -> Self {
        GraphRecord {
            graph: encode_sparse6_string(g),
            n: g.n(),
            edges: g.edge_count(),
            score: score(g).score,
            provenance,
            certificate,
        }
    }

    /// Decodes the payload and checks it against the stated fields.
    pub fn decode(&self) -> std::result::Result<Graph, String> {
        let g = decode_sparse6(self.graph.as_bytes()).map_err(|e| e.to_string())?;
        if g.n() != self.n {
            return Err(format!(
                "record says n={} but payload has {}",
                self.n,
                g.n()
            ));
        }
        if g.edge_count() != self.edges {
            return Err(format!(
                "record says {} edges but payload has {}",
                self.edges,
                g.edge_count()
            ));
        }
        let s = score(&g).score;
        if s != self.score {
            return Err(format!(
                "record says score {} but payload scores {s}",
                self.score
            ));
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeManifest {
    pub size: usize,
    pub best_score: i64,
    pub count: usize,
    pub updated_at: u64,
}

/// Per-size summaries, sorted by size.
pub type Manifest = Vec<SizeManifest>;

fn size_dir(root: &Path, n: usize) -> PathBuf {
    root.join(format!("n{n:03}"))
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Replaces the archive contents for size `n` with `records`.
pub fn archive_write_size(root: &Path, n: usize, records: &[GraphRecord]) -> Result<SizeManifest> {
    if let Some(r) = records.iter().find(|r| r.n != n) {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: r.n,
        });
    }
    let dir = size_dir(root, n);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let mut body = Vec::new();
    for r in records {
        serde_json::to_writer(&mut body, r).map_err(|e| Error::Json {
            path: dir.join(RECORDS_FILE),
            source: e,
        })?;
        body.push(b'\n');
    }
    let manifest = SizeManifest {
        size: n,
        best_score: records.iter().map(|r| r.score).max().unwrap_or(0),
        count: records.len(),
        updated_at: unix_now(),
    };
    let manifest_json = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Json {
        path: dir.join(MANIFEST_FILE),
        source: e,
    })?;
    write_atomic(&dir.join(RECORDS_FILE), &body)?;
    write_atomic(&dir.join(MANIFEST_FILE), &manifest_json)?;
    Ok(manifest)
}

/// Writes every size present in `records`, replacing those sizes on disk.
pub fn archive_write(records: &[GraphRecord], root: &Path) -> Result<Manifest> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut manifest = Vec::new();
    for n in sizes {
        let slice: Vec<GraphRecord> = records.iter().filter(|r| r.n == n).cloned().collect();
        manifest.push(archive_write_size(root, n, &slice)?);
    }
    Ok(manifest)
}

fn read_records(root: &Path, n: usize) -> Result<Vec<GraphRecord>> {
    let records_path = size_dir(root, n).join(RECORDS_FILE);
    let text = fs::read_to_string(&records_path).map_err(|e| Error::io(&records_path, e))?;
    let mut records = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: GraphRecord = serde_json::from_str(line)
            .map_err(|e| Error::corrupt(&records_path, format!("line {}: {e}", line_no + 1)))?;
        if r.n != n {
            return Err(Error::corrupt(
                &records_path,
                format!("line {}: size {} stored under n={n}", line_no + 1, r.n),
            ));
        }
        r.decode()
            .map_err(|why| Error::corrupt(&records_path, format!("line {}: {why}", line_no + 1)))?;
        records.push(r);
    }
    Ok(records)
}

/// Reads and verifies the records of one size. A missing size directory is
/// an empty slot.
pub fn archive_read_size(
    root: &Path,
    n: usize,
) -> Result<(Option<SizeManifest>, Vec<GraphRecord>)> {
    let dir = size_dir(root, n);
    if !dir.exists() {
        return Ok((None, Vec::new()));
    }
    let records = read_records(root, n)?;
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text =
        fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: SizeManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| Error::corrupt(&manifest_path, e.to_string()))?;
    let best = records.iter().map(|r| r.score).max().unwrap_or(0);
    if manifest.size != n || manifest.count != records.len() || manifest.best_score != best {
        return Err(Error::corrupt(
            &manifest_path,
            format!(
                "manifest (size {}, count {}, best {}) disagrees with records (size {n}, count {}, best {best})",
                manifest.size,
                manifest.count,
                manifest.best_score,
                records.len()
            ),
        ));
    }
    Ok((Some(manifest), records))
}

fn archive_sizes(root: &Path) -> Result<Vec<usize>> {
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut sizes = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(n) = name.strip_prefix('n').and_then(|d| d.parse::<usize>().ok()) {
            if entry.path().is_dir() {
                sizes.push(n);
            }
        }
    }
    sizes.sort_unstable();
    Ok(sizes)
}

/// Every verified record under `root`, without consulting the manifests.
/// Records are written before their manifest, so this also reads an archive
/// whose writer stopped between the two files.
pub fn archive_records(root: &Path) -> Result<Vec<GraphRecord>> {
    let mut records = Vec::new();
    for n in archive_sizes(root)? {
        if size_dir(root, n).join(RECORDS_FILE).exists() {
            records.append(&mut read_records(root, n)?);
        }
    }
    Ok(records)
}

/// Reads every size directory under `root`.
pub fn archive_read(root: &Path) -> Result<(Manifest, Vec<GraphRecord>)> {
    let mut manifest = Vec::new();
    let mut records = Vec::new();
    for n in archive_sizes(root)? {
        let (m, mut rs) = archive_read_size(root, n)?;
        manifest.extend(m);
        records.append(&mut rs);
    }
    Ok((manifest, records))
}
