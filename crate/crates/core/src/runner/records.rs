use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{BenchmarkConfig, Solver};
use crate::error::{Error, Result};
use crate::graphs::GraphInstance;
use crate::metrics::{CutHistogram, QualityRecord, TimingBreakdown};
use crate::qaoa::{AnsatzParams, CircuitResources, Fidelity, NoiseModel};

pub const METRICS_FILE: &str = "metrics.jsonl";
pub const WALLCLOCK_FILE: &str = "wallclock.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const INSTANCE_DIR: &str = "instances";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Statevector,
    Evolver,
    Proxy,
}

/// One solver execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub solver: Solver,
    pub size: usize,
    pub instance: usize,
    /// 1-based.
    pub restart: usize,
    /// 1-based execution index within the restart.
    pub iteration: usize,
    pub anneal_time_us: Option<f64>,
    pub params: Option<AnsatzParams>,
    pub shots: u64,
    pub backend: Backend,
    pub optimal_cut: u64,
    /// False when the reference optimum is a heuristic lower bound.
    pub optimal_exact: bool,
    pub objective_value: f64,
    pub quality: QualityRecord,
    pub timing: TimingBreakdown,
    pub seed: u64,
    pub cut_histogram: CutHistogram,
}

/// Final result of one restart: its best-objective execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub size: usize,
    pub instance: usize,
    pub restart: usize,
    pub best_iteration: usize,
    pub executions: usize,
    pub converged: bool,
    pub final_objective: f64,
    pub quality: QualityRecord,
}

/// Per-(size, instance) summary: the best restart, or the reason the group
/// was abandoned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub size: usize,
    pub instance: usize,
    pub best_restart: Option<usize>,
    pub quality: Option<QualityRecord>,
    pub error: Option<String>,
}

/// Method-1 gate-model execution scored against its exact distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRecord {
    pub size: usize,
    pub instance: usize,
    pub rounds: usize,
    pub shots: u64,
    pub seed: u64,
    pub params: AnsatzParams,
    pub noise: Option<NoiseModel>,
    pub fidelity: Fidelity,
    pub resources: CircuitResources,
    pub optimal_cut: u64,
    pub quality: QualityRecord,
    pub cut_histogram: CutHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricLine {
    Header {
        tool_version: String,
        schema_version: u32,
        config: Box<BenchmarkConfig>,
    },
    Iteration(Box<IterationRecord>),
    Restart(RestartRecord),
    Group(GroupRecord),
    Fidelity(Box<FidelityRecord>),
}

/// Measured simulator time for one execution; never mixed into modeled times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallclockLine {
    pub size: usize,
    pub instance: usize,
    pub restart: usize,
    pub iteration: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSeed {
    pub size: usize,
    pub instance: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub schema_version: u32,
    pub config: BenchmarkConfig,
    pub instance_seeds: Vec<InstanceSeed>,
    pub started_unix: f64,
    pub finished_unix: f64,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// In-memory result of a run.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub lines: Vec<MetricLine>,
    pub wallclock: Vec<WallclockLine>,
    pub instances: Vec<(InstanceSeed, GraphInstance)>,
}

impl RunOutput {
    pub fn instance_seeds(&self) -> Vec<InstanceSeed> {
        self.instances.iter().map(|(k, _)| k.clone()).collect()
    }

    pub fn iterations(&self) -> impl Iterator<Item = &IterationRecord> {
        iterations(&self.lines)
    }

    pub fn groups(&self) -> impl Iterator<Item = &GroupRecord> {
        self.lines.iter().filter_map(|l| match l {
            MetricLine::Group(g) => Some(g),
            _ => None,
        })
    }

    pub fn fidelities(&self) -> impl Iterator<Item = &FidelityRecord> {
        self.lines.iter().filter_map(|l| match l {
            MetricLine::Fidelity(f) => Some(f.as_ref()),
            _ => None,
        })
    }
}

pub fn iterations(lines: &[MetricLine]) -> impl Iterator<Item = &IterationRecord> {
    lines.iter().filter_map(|l| match l {
        MetricLine::Iteration(r) => Some(r.as_ref()),
        _ => None,
    })
}

pub fn instance_path(dir: &Path, size: usize, instance: usize) -> PathBuf {
    dir.join(INSTANCE_DIR).join(format!("n{size}_i{instance}.json"))
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::json(path, e))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes metrics, wall-clock sidecar, instances and manifest into `dir`.
pub fn write_run(dir: &Path, out: &RunOutput, manifest: &RunManifest) -> Result<()> {
    fs::create_dir_all(dir.join(INSTANCE_DIR)).map_err(|e| Error::io(dir, e))?;
    write_jsonl(&dir.join(METRICS_FILE), &out.lines)?;
    write_jsonl(&dir.join(WALLCLOCK_FILE), &out.wallclock)?;
    for (key, g) in &out.instances {
        g.store(instance_path(dir, key.size, key.instance))?;
    }
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).map_err(|e| Error::json(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Metric lines of a run directory.
pub fn read_metrics(dir: &Path) -> Result<Vec<MetricLine>> {
    let path = dir.join(METRICS_FILE);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut lines = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str(&line).map_err(|e| Error::parse(format!("{}:{}", path.display(), k + 1), e.to_string()))?;
        lines.push(parsed);
    }
    Ok(lines)
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(&path, e))
}

/// The header's config, if the metrics start with one.
pub fn header_config(lines: &[MetricLine]) -> Option<&BenchmarkConfig> {
    match lines.first() {
        Some(MetricLine::Header { config, .. }) => Some(config),
        _ => None,
    }
}
