//! Solution-quality ratios and modeled device timing.
//!
//! Sampled energies are `E = -cut`, so every ratio is a cut-size average
//! divided by the optimal cut `|E_min|` and lies in `[0, 1]`. All ratios are
//! computed from a [`CutHistogram`] with integer sums, which makes
//! `CVaR_1 == AR` hold bit-for-bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::GraphInstance;
use crate::hamiltonian::DiagonalCostTable;
use crate::qaoa::SampleSet;

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_ETA: f64 = 0.5;

/// Shot counts keyed by cut size. Serialized as `[[cut, count], ...]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<(u64, u64)>", from = "Vec<(u64, u64)>")]
pub struct CutHistogram(BTreeMap<u64, u64>);

impl From<CutHistogram> for Vec<(u64, u64)> {
    fn from(h: CutHistogram) -> Self {
        h.0.into_iter().collect()
    }
}

impl From<Vec<(u64, u64)>> for CutHistogram {
    fn from(pairs: Vec<(u64, u64)>) -> Self {
        CutHistogram::from_counts(pairs)
    }
}

impl CutHistogram {
    pub fn from_samples(samples: &SampleSet, g: &GraphInstance) -> Result<Self> {
        let mut h = BTreeMap::new();
        for (b, &c) in samples.counts() {
            *h.entry(g.cut_size(b)?).or_insert(0) += c;
        }
        Ok(CutHistogram(h))
    }

    pub fn from_table(samples: &SampleSet, table: &DiagonalCostTable) -> Result<Self> {
        let mut h = BTreeMap::new();
        for (b, &c) in samples.counts() {
            let idx = b
                .to_index()
                .filter(|&i| (i as usize) < table.cut_sizes().len() && b.len() == table.num_qubits())
                .ok_or_else(|| Error::Contract(format!("bitstring of length {} does not fit the cost table", b.len())))?;
            *h.entry(table.cut(idx as usize) as u64).or_insert(0) += c;
        }
        Ok(CutHistogram(h))
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = BTreeMap::new();
        for (cut, c) in counts {
            if c > 0 {
                *h.entry(cut).or_insert(0) += c;
            }
        }
        CutHistogram(h)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn max_cut(&self) -> Option<u64> {
        self.0.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (u64, u64)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    fn cut_sum(&self) -> u128 {
        self.iter().map(|(cut, c)| cut as u128 * c as u128).sum()
    }

    /// Sum of the `k` largest sampled cuts.
    fn top_sum(&self, k: u64) -> u128 {
        let mut left = k;
        let mut sum = 0u128;
        for (cut, c) in self.iter().rev() {
            let take = c.min(left);
            sum += cut as u128 * take as u128;
            left -= take;
            if left == 0 {
                break;
            }
        }
        sum
    }

    /// The `k`-th smallest cut (0-based) in the expanded shot list.
    fn kth(&self, k: u64) -> u64 {
        let mut seen = 0;
        for (cut, c) in self.iter() {
            seen += c;
            if k < seen {
                return cut;
            }
        }
        self.max_cut().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord {
    pub energy_expectation: f64,
    pub approximation_ratio: f64,
    pub cvar_ratio: f64,
    pub alpha: f64,
    pub gibbs_ratio: f64,
    pub eta: f64,
    pub best_measurement_ratio: f64,
    pub optimality_gap_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ratio {
    Ar,
    Cvar,
    Gibbs,
    Best,
}

impl Ratio {
    pub const ALL: [Ratio; 4] = [Ratio::Ar, Ratio::Cvar, Ratio::Gibbs, Ratio::Best];

    pub fn name(self) -> &'static str {
        match self {
            Ratio::Ar => "ar",
            Ratio::Cvar => "cvar",
            Ratio::Gibbs => "gibbs",
            Ratio::Best => "best",
        }
    }
}

impl std::str::FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ar" | "approximation" => Ok(Ratio::Ar),
            "cvar" => Ok(Ratio::Cvar),
            "gibbs" => Ok(Ratio::Gibbs),
            "best" => Ok(Ratio::Best),
            other => Err(Error::parse("objective", format!("unknown ratio `{other}`; expected ar, cvar, gibbs or best"))),
        }
    }
}

impl QualityRecord {
    pub fn ratio(&self, which: Ratio) -> f64 {
        match which {
            Ratio::Ar => self.approximation_ratio,
            Ratio::Cvar => self.cvar_ratio,
            Ratio::Gibbs => self.gibbs_ratio,
            Ratio::Best => self.best_measurement_ratio,
        }
    }
}

/// `(1 - ratio) * 100`.
pub fn optimality_gap(ratio: f64) -> f64 {
    (1.0 - ratio) * 100.0
}

fn check_params(alpha: f64, eta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Contract(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Contract(format!("eta must be > 0, got {eta}")));
    }
    Ok(())
}

/// Scores a set of samples against an instance whose optimum is `optimal_cut`
/// (that is, `E_min = -optimal_cut`).
pub fn quality_record(samples: &SampleSet, g: &GraphInstance, optimal_cut: u64, alpha: f64, eta: f64) -> Result<QualityRecord> {
    quality_from_histogram(&CutHistogram::from_samples(samples, g)?, optimal_cut, alpha, eta)
}

pub fn quality_from_histogram(h: &CutHistogram, optimal_cut: u64, alpha: f64, eta: f64) -> Result<QualityRecord> {
    check_params(alpha, eta)?;
    let n = h.total();
    if n == 0 {
        return Err(Error::Contract("cannot score an empty sample set".into()));
    }
    if optimal_cut == 0 {
        return Err(Error::DegenerateInstance("optimal cut is 0 (graph has no edges)".into()));
    }
    let opt = optimal_cut as f64;
    let mean_cut = h.cut_sum() as f64 / n as f64;

    let k = ((alpha * n as f64) - 1e-9).ceil().max(1.0) as u64;
    let cvar = h.top_sum(k.min(n)) as f64 / k.min(n) as f64;

    // ln(mean exp(eta * cut)), shifted by the largest cut; expm1/ln_1p keep
    // precision as eta -> 0.
    let top = h.max_cut().unwrap_or(0) as f64;
    let s: f64 = h
        .iter()
        .map(|(cut, c)| c as f64 * (eta * (cut as f64 - top)).exp_m1())
        .sum::<f64>()
        / n as f64;
    let log_mean = eta * top + s.ln_1p();
    let gibbs = log_mean / (eta * opt);

    let ar = mean_cut / opt;
    Ok(QualityRecord {
        energy_expectation: -mean_cut,
        approximation_ratio: ar.clamp(0.0, 1.0),
        cvar_ratio: (cvar / opt).clamp(0.0, 1.0),
        alpha,
        gibbs_ratio: gibbs.clamp(0.0, 1.0),
        eta,
        best_measurement_ratio: (top / opt).clamp(0.0, 1.0),
        optimality_gap_pct: optimality_gap(ar.clamp(0.0, 1.0)),
    })
}

/// Per-shot normalized gaps `1 - cut / optimal` and their quartiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapDistribution {
    /// `(normalized gap, shot count)`, ascending in gap.
    pub values: Vec<(f64, u64)>,
    pub quartiles: [f64; 3],
}

pub fn distribution_stats(h: &CutHistogram, optimal_cut: u64) -> Result<GapDistribution> {
    let n = h.total();
    if n == 0 {
        return Err(Error::Contract("cannot summarize an empty sample set".into()));
    }
    if optimal_cut == 0 {
        return Err(Error::DegenerateInstance("optimal cut is 0 (graph has no edges)".into()));
    }
    let opt = optimal_cut as f64;
    let gap = |cut: u64| (1.0 - cut as f64 / opt).clamp(0.0, 1.0);
    let values = h.iter().rev().map(|(cut, c)| (gap(cut), c)).collect();
    // Linear interpolation between order statistics (Hyndman-Fan type 7);
    // gaps descend as cuts ascend, so rank j of the gaps is rank n-1-j of the cuts.
    let quantile = |q: f64| {
        let pos = q * (n - 1) as f64;
        let lo = pos.floor() as u64;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        let g_lo = gap(h.kth(n - 1 - lo));
        let g_hi = gap(h.kth(n - 1 - hi));
        g_lo + frac * (g_hi - g_lo)
    };
    Ok(GapDistribution {
        values,
        quartiles: [quantile(0.25), quantile(0.5), quantile(0.75)],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Paradigm {
    GateModel,
    Annealing,
}

/// Throughput constants, all in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceProfile {
    pub name: String,
    pub paradigm: Paradigm,
    pub t_init: f64,
    pub t_shot: f64,
    pub t_delay: f64,
    pub t_compile: f64,
    pub t_load: f64,
    pub t_queue: f64,
    pub t_create: f64,
    pub t_optimize: f64,
    pub t_programming: f64,
    pub t_readout_per_read: f64,
    pub t_embed: f64,
    pub t_sample: f64,
    pub t_resolve: f64,
}

impl Default for DeviceProfile {
    fn default() -> Self {
        DeviceProfile::zero()
    }
}

impl DeviceProfile {
    pub const PRESETS: [&'static str; 4] = ["superconducting", "ion-trap", "annealer", "zero"];

    pub fn zero() -> Self {
        DeviceProfile {
            name: "zero".into(),
            paradigm: Paradigm::GateModel,
            t_init: 0.0,
            t_shot: 0.0,
            t_delay: 0.0,
            t_compile: 0.0,
            t_load: 0.0,
            t_queue: 0.0,
            t_create: 0.0,
            t_optimize: 0.0,
            t_programming: 0.0,
            t_readout_per_read: 0.0,
            t_embed: 0.0,
            t_sample: 0.0,
            t_resolve: 0.0,
        }
    }

    /// 0.43 ms per shot; the fixed 3.17 s per execution reproduces a
    /// 108 s total for 30 executions of 1000 shots.
    pub fn superconducting() -> Self {
        DeviceProfile {
            name: "superconducting".into(),
            t_init: (108.0 - 30.0 * 1000.0 * 0.43e-3) / 30.0,
            t_shot: 0.43e-3,
            t_compile: 0.5,
            t_load: 0.2,
            t_create: 0.05,
            t_optimize: 0.01,
            ..DeviceProfile::zero()
        }
    }

    /// 14.6 ms per shot, no fixed overhead.
    pub fn ion_trap() -> Self {
        DeviceProfile {
            name: "ion-trap".into(),
            t_shot: 14.6e-3,
            t_compile: 0.5,
            t_load: 0.2,
            t_create: 0.05,
            t_optimize: 0.01,
            ..DeviceProfile::zero()
        }
    }

    /// 16 ms programming and 0.25 ms readout per read.
    pub fn annealer() -> Self {
        DeviceProfile {
            name: "annealer".into(),
            paradigm: Paradigm::Annealing,
            t_programming: 16e-3,
            t_readout_per_read: 0.25e-3,
            t_embed: 0.1,
            t_create: 0.01,
            ..DeviceProfile::zero()
        }
    }

    /// A preset by name, or a JSON profile file when `name` is a path to one.
    pub fn resolve(name: &str) -> Result<Self> {
        match name {
            "superconducting" => Ok(Self::superconducting()),
            "ion-trap" => Ok(Self::ion_trap()),
            "annealer" => Ok(Self::annealer()),
            "zero" => Ok(Self::zero()),
            path if Path::new(path).is_file() => Self::load(path),
            other => Err(Error::Config(format!(
                "unknown device profile `{other}`; use one of {} or a JSON file",
                Self::PRESETS.join(", ")
            ))),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: DeviceProfile = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("t_init", self.t_init),
            ("t_shot", self.t_shot),
            ("t_delay", self.t_delay),
            ("t_compile", self.t_compile),
            ("t_load", self.t_load),
            ("t_queue", self.t_queue),
            ("t_create", self.t_create),
            ("t_optimize", self.t_optimize),
            ("t_programming", self.t_programming),
            ("t_readout_per_read", self.t_readout_per_read),
            ("t_embed", self.t_embed),
            ("t_sample", self.t_sample),
            ("t_resolve", self.t_resolve),
        ];
        for (field, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::parse(field, format!("duration must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn classical_time(&self) -> f64 {
        self.t_create + self.t_optimize
    }
}

/// Modeled times for one execution plus running totals, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingBreakdown {
    pub t_quantum: f64,
    pub t_elapsed_quantum: f64,
    pub t_classical: f64,
    pub cum_quantum: f64,
    pub cum_elapsed_quantum: f64,
    pub cum_classical: f64,
}

/// Gate-model execution of `shots` shots; cumulative fields equal the
/// per-execution ones until passed through a [`TimingAccumulator`].
pub fn gate_model_timing(profile: &DeviceProfile, shots: u64) -> TimingBreakdown {
    let t_quantum = profile.t_init + shots as f64 * (profile.t_shot + profile.t_delay);
    let t_elapsed = profile.t_queue + profile.t_compile + profile.t_load + t_quantum;
    single(t_quantum, t_elapsed, profile.classical_time())
}

/// Annealer execution of `reads` reads at `anneal_time_us` microseconds.
pub fn annealing_timing(profile: &DeviceProfile, reads: u64, anneal_time_us: f64) -> TimingBreakdown {
    let t_quantum = profile.t_programming + reads as f64 * (anneal_time_us * 1e-6 + profile.t_readout_per_read);
    let t_elapsed = profile.t_queue + profile.t_embed + profile.t_sample + t_quantum + profile.t_resolve;
    single(t_quantum, t_elapsed, profile.classical_time())
}

fn single(q: f64, e: f64, c: f64) -> TimingBreakdown {
    TimingBreakdown {
        t_quantum: q,
        t_elapsed_quantum: e,
        t_classical: c,
        cum_quantum: q,
        cum_elapsed_quantum: e,
        cum_classical: c,
    }
}

/// Fills cumulative fields with prefix sums over a sequence of executions.
#[derive(Debug, Clone, Default)]
pub struct TimingAccumulator {
    quantum: f64,
    elapsed: f64,
    classical: f64,
}

impl TimingAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: TimingBreakdown) -> TimingBreakdown {
        self.quantum += t.t_quantum;
        self.elapsed += t.t_elapsed_quantum;
        self.classical += t.t_classical;
        TimingBreakdown {
            cum_quantum: self.quantum,
            cum_elapsed_quantum: self.elapsed,
            cum_classical: self.classical,
            ..t
        }
    }
}
