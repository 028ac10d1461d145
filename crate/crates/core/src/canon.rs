//! Canonical labelling by colour refinement plus individualisation.
//!
//! The search tree follows the usual individualise-and-refine scheme: refine
//! the ordered partition to an equitable one, pick a target cell, and branch
//! on each of its vertices. Every discrete leaf yields a relabelled
//! adjacency matrix, and the smallest one is the canonical form. Branches
//! are skipped when they are images of explored branches under an
//! automorphism, either a twin transposition or an automorphism discovered
//! by two leaves producing the same matrix.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec;
use crate::graph::Graph;

const MAX_STORED_AUTOMORPHISMS: usize = 256;
const MAX_CACHED_LEAVES: usize = 20_000;

/// Isomorphism-invariant byte string: the sparse6 encoding of the canonical
/// relabelling. Two graphs get equal certificates iff they are isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate(Vec<u8>);

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Certificate(bytes)
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({})", String::from_utf8_lossy(&self.0))
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&String::from_utf8_lossy(&self.0))
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Certificate(s.into_bytes()))
    }
}

pub fn canonical_certificate(g: &Graph) -> Certificate {
    let form = canonical_form(g);
    Certificate(codec::encode_sparse6(&form))
}

/// The canonically relabelled copy of `g`.
pub fn canonical_form(g: &Graph) -> Graph {
    let lab = canonical_labeling(g);
    g.relabel(&lab).expect("labelling is a permutation")
}

/// `lab[i]` is the vertex placed at position `i` in the canonical order.
pub fn canonical_labeling(g: &Graph) -> Vec<usize> {
    let mut search = Search::new(g);
    let mut root = Partition::unit(g.n());
    root.refine(g, (0..1).collect());
    search.visit(root);
    search.best.expect("search visits at least one leaf").1
}

/// Ordered partition of the vertices. Cells occupy contiguous ranges of
/// `lab`; `cell_end[s]` is meaningful only at cell starts.
#[derive(Clone)]
struct Partition {
    lab: Vec<usize>,
    cell_start: Vec<usize>,
    cell_end: Vec<usize>,
    cells: usize,
}

impl Partition {
    fn unit(n: usize) -> Self {
        let mut cell_end = vec![0; n];
        cell_end[0] = n;
        Partition {
            lab: (0..n).collect(),
            cell_start: vec![0; n],
            cell_end,
            cells: 1,
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn starts(&self) -> impl Iterator<Item = usize> + '_ {
        let mut pos = 0;
        std::iter::from_fn(move || {
            if pos >= self.lab.len() {
                return None;
            }
            let s = pos;
            pos = self.cell_end[s];
            Some(s)
        })
    }

    /// First smallest cell with more than one vertex.
    fn target_cell(&self) -> Option<usize> {
        self.starts()
            .filter(|&s| self.cell_end[s] - s > 1)
            .min_by_key(|&s| (self.cell_end[s] - s, s))
    }

    /// Splits `v` off the front of its cell and refines.
    fn individualize(&mut self, g: &Graph, v: usize) {
        let s = self.cell_start[v];
        let end = self.cell_end[s];
        let at = self.lab[s..end]
            .iter()
            .position(|&x| x == v)
            .expect("v in its cell")
            + s;
        self.lab.swap(s, at);
        self.cell_end[s] = s + 1;
        self.cell_end[s + 1] = end;
        for &x in &self.lab[s + 1..end] {
            self.cell_start[x] = s + 1;
        }
        self.cells += 1;
        self.refine(g, vec![s, s + 1]);
    }

    /// Splits cells by neighbour counts into splitter cells until the
    /// partition is equitable. Fragments are ordered by increasing count.
    fn refine(&mut self, g: &Graph, mut queue: Vec<usize>) {
        let n = self.lab.len();
        let words = g.words();
        let mut queued = vec![false; n];
        for &s in &queue {
            queued[s] = true;
        }
        let mut head = 0;
        let mut splitter = vec![0u64; words];
        let mut counts: Vec<(u32, usize)> = Vec::with_capacity(n);

        while head < queue.len() && !self.is_discrete() {
            let sp = queue[head];
            head += 1;
            queued[sp] = false;
            splitter.iter_mut().for_each(|w| *w = 0);
            for &x in &self.lab[sp..self.cell_end[sp]] {
                splitter[x / 64] |= 1 << (x % 64);
            }

            let mut pos = 0;
            while pos < n {
                let start = pos;
                let end = self.cell_end[start];
                pos = end;
                if end - start == 1 {
                    continue;
                }
                counts.clear();
                for &x in &self.lab[start..end] {
                    let c: u32 = g
                        .row(x)
                        .iter()
                        .zip(&splitter)
                        .map(|(a, b)| (a & b).count_ones())
                        .sum();
                    counts.push((c, x));
                }
                if counts.iter().all(|&(c, _)| c == counts[0].0) {
                    continue;
                }
                counts.sort_unstable();
                let was_queued = queued[start];
                let mut frag = start;
                for i in 0..counts.len() {
                    let p = start + i;
                    self.lab[p] = counts[i].1;
                    if i > 0 && counts[i].0 != counts[i - 1].0 {
                        self.cell_end[frag] = p;
                        frag = p;
                        self.cells += 1;
                        if !queued[frag] {
                            queued[frag] = true;
                            queue.push(frag);
                        }
                    }
                    self.cell_start[counts[i].1] = frag;
                }
                self.cell_end[frag] = end;
                if !was_queued && !queued[start] {
                    queued[start] = true;
                    queue.push(start);
                }
            }
        }
    }
}

enum Outcome {
    Continue,
    /// Abandon the subtree below this level.
    Abort(usize),
}

struct Search<'a> {
    g: &'a Graph,
    best: Option<(Vec<u64>, Vec<usize>)>,
    leaves: HashMap<u64, Vec<Vec<u16>>>,
    cached: usize,
    automorphisms: Vec<Vec<usize>>,
    twin_class: Vec<usize>,
    path: Vec<usize>,
    explored: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph) -> Self {
        Search {
            g,
            best: None,
            leaves: HashMap::new(),
            cached: 0,
            automorphisms: Vec::new(),
            twin_class: twin_classes(g),
            path: Vec::new(),
            explored: Vec::new(),
        }
    }

    fn visit(&mut self, part: Partition) -> Outcome {
        if part.is_discrete() {
            return self.leaf(&part.lab);
        }
        let target = part
            .target_cell()
            .expect("non-discrete partition has a target");
        let mut candidates: Vec<usize> = part.lab[target..part.cell_end[target]].to_vec();
        candidates.sort_unstable();

        let depth = self.path.len();
        self.explored.push(Vec::new());
        let mut seen_twins: Vec<usize> = Vec::new();
        for v in candidates {
            let twin = self.twin_class[v];
            if seen_twins.contains(&twin) {
                continue;
            }
            if self.equivalent_to_explored(depth, v) {
                continue;
            }
            seen_twins.push(twin);

            let mut child = part.clone();
            child.individualize(self.g, v);
            self.path.push(v);
            let outcome = self.visit(child);
            self.path.pop();
            self.explored[depth].push(v);
            if let Outcome::Abort(level) = outcome {
                if level < depth {
                    self.explored.pop();
                    return outcome;
                }
            }
        }
        self.explored.pop();
        Outcome::Continue
    }

    fn leaf(&mut self, lab: &[usize]) -> Outcome {
        let rows = relabelled_rows(self.g, lab);
        let key = {
            let mut h = DefaultHasher::new();
            rows.hash(&mut h);
            h.finish()
        };

        let mut twin_of: Option<Vec<usize>> = None;
        if let Some(bucket) = self.leaves.get(&key) {
            for other in bucket {
                let other: Vec<usize> = other.iter().map(|&x| x as usize).collect();
                if relabelled_rows(self.g, &other) == rows {
                    twin_of = Some(other);
                    break;
                }
            }
        }

        match twin_of {
            Some(other) => {
                // gamma maps this leaf's vertex at position p to other[p].
                let mut gamma = vec![0; lab.len()];
                for (p, &x) in lab.iter().enumerate() {
                    gamma[x] = other[p];
                }
                if self.automorphisms.len() < MAX_STORED_AUTOMORPHISMS {
                    self.automorphisms.push(gamma);
                }
                self.abort_level()
            }
            None => {
                if self.cached < MAX_CACHED_LEAVES {
                    self.leaves
                        .entry(key)
                        .or_default()
                        .push(lab.iter().map(|&x| x as u16).collect());
                    self.cached += 1;
                }
                let better = match &self.best {
                    None => true,
                    Some((best_rows, _)) => rows < *best_rows,
                };
                if better {
                    self.best = Some((rows, lab.to_vec()));
                }
                Outcome::Continue
            }
        }
    }

    /// Highest level whose current branch is now known to repeat an
    /// explored sibling.
    fn abort_level(&self) -> Outcome {
        for level in 0..self.path.len() {
            if self.equivalent_to_explored(level, self.path[level]) {
                return Outcome::Abort(level);
            }
        }
        Outcome::Continue
    }

    /// Whether `v` lies in the orbit of an explored child at `level` under
    /// the stored automorphisms that fix the path above `level`.
    fn equivalent_to_explored(&self, level: usize, v: usize) -> bool {
        let explored = &self.explored[level];
        if explored.is_empty() || self.automorphisms.is_empty() {
            return false;
        }
        let prefix = &self.path[..level];
        let mut uf = UnionFind::new(self.g.n());
        let mut any = false;
        for gamma in &self.automorphisms {
            if prefix.iter().all(|&x| gamma[x] == x) {
                any = true;
                for (x, &y) in gamma.iter().enumerate() {
                    uf.union(x, y);
                }
            }
        }
        if !any {
            return false;
        }
        let root = uf.find(v);
        explored.iter().any(|&u| u != v && uf.find(u) == root)
    }
}

fn relabelled_rows(g: &Graph, lab: &[usize]) -> Vec<u64> {
    let n = g.n();
    let words = g.words();
    let mut pos = vec![0; n];
    for (p, &x) in lab.iter().enumerate() {
        pos[x] = p;
    }
    let mut rows = vec![0u64; n * words];
    for (p, &x) in lab.iter().enumerate() {
        for y in g.neighbors(x) {
            let q = pos[y];
            rows[p * words + q / 64] |= 1 << (q % 64);
        }
    }
    rows
}

/// Vertices with equal open or equal closed neighbourhoods share a class.
fn twin_classes(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut keys: HashMap<(bool, Vec<u64>), usize> = HashMap::new();
    let closed = |x: usize| {
        let mut r = g.row(x).to_vec();
        r[x / 64] |= 1 << (x % 64);
        r
    };
    (0..n)
        .map(|x| {
            let open_key = (false, g.row(x).to_vec());
            let closed_key = (true, closed(x));
            let class = match (keys.get(&open_key), keys.get(&closed_key)) {
                (Some(&c), _) | (None, Some(&c)) => c,
                (None, None) => x,
            };
            keys.entry(open_key).or_insert(class);
            keys.entry(closed_key).or_insert(class);
            class
        })
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
