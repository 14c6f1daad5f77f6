//! Max-Cut problem instances: random 3-regular generation, JSON persistence
//! and the exhaustive classical oracle.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};

/// Largest graph the exhaustive oracle will enumerate.
pub const DEFAULT_EXHAUSTION_LIMIT: usize = 24;

/// Attempts before the configuration model gives up on a seed.
const MAX_PAIRING_ATTEMPTS: usize = 10_000;

/// An unweighted simple graph together with its cached exact Max-Cut.
///
/// Edges are stored as `(low, high)` pairs in sorted order so that two
/// instances built from the same edge set compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    seed: u64,
    optimal_cut_size: Option<u64>,
    optimal_partition: Option<Bitstring>,
}

impl GraphInstance {
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::parse("nodes", "graph needs at least one node"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::parse(
                    "edges",
                    format!("edge ({a}, {b}) references a node >= {num_nodes}"),
                ));
            }
            if a == b {
                return Err(Error::parse("edges", format!("self-loop on node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::parse("edges", format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(GraphInstance {
            num_nodes,
            edges: set.into_iter().collect(),
            seed: 0,
            optimal_cut_size: None,
            optimal_partition: None,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)));
        GraphInstance::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        GraphInstance::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle needs n >= 3")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn optimal_cut_size(&self) -> Option<u64> {
        self.optimal_cut_size
    }

    pub fn optimal_partition(&self) -> Option<&Bitstring> {
        self.optimal_partition.as_ref()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbors();
        let mut seen = vec![false; self.num_nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Number of edges crossing the partition `s`.
    pub fn cut_size(&self, s: &Bitstring) -> Result<u64> {
        if s.len() != self.num_nodes {
            return Err(Error::Contract(format!(
                "bitstring has {} bits but the graph has {} nodes",
                s.len(),
                self.num_nodes
            )));
        }
        Ok(self.edges.iter().filter(|&&(a, b)| s.get(a) != s.get(b)).count() as u64)
    }

    /// Same graph with node `i` renamed to `perm[i]`; drops cached solutions.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::Contract("permutation length differs from node count".into()));
        }
        let g = GraphInstance::new(self.num_nodes, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))?;
        Ok(g.with_seed(self.seed))
    }

    /// Runs the exhaustive oracle and caches the answer on success.
    pub fn annotate_exact(&mut self, limit: usize) -> MaxCutOutcome {
        let outcome = exact_max_cut(self, limit);
        if let MaxCutOutcome::Exact { size, partition } = &outcome {
            self.optimal_cut_size = Some(*size);
            self.optimal_partition = Some(partition.clone());
        }
        outcome
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&InstanceFile::from(self)).map_err(|e| Error::json(path, e))?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = ["nodes", "edges", "seed", "optimal_cut_size", "optimal_partition"]
                .into_iter()
                .find(|f| msg.contains(&format!("`{f}`")))
                .unwrap_or("document");
            Error::parse(field, msg)
        })?;
        file.try_into()
    }
}

/// On-disk form of a [`GraphInstance`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    nodes: usize,
    edges: Vec<[usize; 2]>,
    seed: u64,
    optimal_cut_size: CutField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    optimal_partition: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CutField {
    Known(u64),
    Unknown(String),
}

impl From<&GraphInstance> for InstanceFile {
    fn from(g: &GraphInstance) -> Self {
        InstanceFile {
            nodes: g.num_nodes,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            seed: g.seed,
            optimal_cut_size: match g.optimal_cut_size {
                Some(c) => CutField::Known(c),
                None => CutField::Unknown("unknown".into()),
            },
            optimal_partition: g.optimal_partition.as_ref().map(|p| p.to_string()),
        }
    }
}

impl TryFrom<InstanceFile> for GraphInstance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        let mut g = GraphInstance::new(f.nodes, f.edges.iter().map(|e| (e[0], e[1])))?.with_seed(f.seed);
        let cut = match f.optimal_cut_size {
            CutField::Known(c) => Some(c),
            CutField::Unknown(s) if s == "unknown" => None,
            CutField::Unknown(s) => {
                return Err(Error::parse("optimal_cut_size", format!("expected an integer or \"unknown\", got {s:?}")))
            }
        };
        let partition = match f.optimal_partition {
            Some(p) => {
                let b: Bitstring = p.parse().map_err(|_| Error::parse("optimal_partition", "not a binary string"))?;
                if b.len() != g.num_nodes {
                    return Err(Error::parse(
                        "optimal_partition",
                        format!("length {} differs from node count {}", b.len(), g.num_nodes),
                    ));
                }
                Some(b)
            }
            None => None,
        };
        match (cut, &partition) {
            (Some(c), Some(p)) => {
                if g.cut_size(p)? != c {
                    return Err(Error::parse("optimal_cut_size", "does not match the cut of optimal_partition"));
                }
            }
            (None, Some(_)) => return Err(Error::parse("optimal_partition", "present while optimal_cut_size is unknown")),
            _ => {}
        }
        g.optimal_cut_size = cut;
        g.optimal_partition = partition;
        Ok(g)
    }
}

/// Random simple connected 3-regular graph on `n` nodes.
///
/// Configuration model: three stubs per node are shuffled and paired; any
/// pairing with a self-loop, a repeated edge or more than one component is
/// rejected and the same RNG stream draws again.
pub fn generate_3_regular(n: usize, seed: u64) -> Result<GraphInstance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::DegreeInfeasible { nodes: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut edges = BTreeSet::new();
        let simple = stubs.chunks_exact(2).all(|p| p[0] != p[1] && edges.insert((p[0].min(p[1]), p[0].max(p[1]))));
        if !simple {
            continue;
        }
        let g = GraphInstance::new(n, edges)?.with_seed(seed);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Config(format!(
        "configuration model found no simple connected pairing for n = {n} after {MAX_PAIRING_ATTEMPTS} attempts"
    )))
}

/// Result of the exhaustive oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxCutOutcome {
    Exact { size: u64, partition: Bitstring },
    /// The graph exceeds the exhaustion limit; no answer is given.
    Unknown { num_nodes: usize, limit: usize },
}

impl MaxCutOutcome {
    pub fn size(&self) -> Option<u64> {
        match self {
            MaxCutOutcome::Exact { size, .. } => Some(*size),
            MaxCutOutcome::Unknown { .. } => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, MaxCutOutcome::Unknown { .. })
    }
}

/// Exhaustive Max-Cut over the 2^(n-1) partitions that keep the last node in
/// set 0. Partitions are visited in Gray-code order so each step costs one
/// node flip; ties resolve to the numerically smallest assignment.
pub fn exact_max_cut(g: &GraphInstance, limit: usize) -> MaxCutOutcome {
    let n = g.num_nodes();
    if n > limit.min(63) {
        return MaxCutOutcome::Unknown { num_nodes: n, limit };
    }
    if g.num_edges() == 0 || n == 1 {
        return MaxCutOutcome::Exact {
            size: 0,
            partition: Bitstring::zeros(n),
        };
    }
    let mut adj = vec![0u64; n];
    for &(a, b) in g.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let free = n - 1;
    let low = free.min(16);
    let high = free - low;
    let (size, assignment) = (0..1u64 << high)
        .into_par_iter()
        .map(|block| scan_block(&adj, g.edges(), block << low, low))
        .reduce(|| (0, u64::MAX), pick_better);
    MaxCutOutcome::Exact {
        size,
        partition: Bitstring::from_index(assignment, n),
    }
}

fn pick_better(a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn scan_block(adj: &[u64], edges: &[(usize, usize)], base: u64, low: usize) -> (u64, u64) {
    let mut assign = base;
    let mut cut = edges
        .iter()
        .filter(|&&(a, b)| ((assign >> a) ^ (assign >> b)) & 1 == 1)
        .count() as i64;
    let mut best = (cut as u64, assign);
    for i in 1..(1u64 << low) {
        let v = i.trailing_zeros() as usize;
        let same = if (assign >> v) & 1 == 0 {
            (adj[v] & !assign).count_ones()
        } else {
            (adj[v] & assign).count_ones()
        } as i64;
        let deg = adj[v].count_ones() as i64;
        cut += same - (deg - same);
        assign ^= 1 << v;
        best = pick_better(best, (cut as u64, assign));
    }
    best
}
