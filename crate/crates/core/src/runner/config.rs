use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annealer::{DEFAULT_MAX_DT, DEFAULT_TIME_SCALE};
use crate::error::{Error, Result};
use crate::graphs::DEFAULT_EXHAUSTION_LIMIT;
use crate::hamiltonian::DEFAULT_STATEVECTOR_LIMIT;
use crate::metrics::{Ratio, DEFAULT_ALPHA, DEFAULT_ETA};
use crate::optimizer::DEFAULT_MAX_ITERATIONS;
use crate::qaoa::NoiseModel;

/// Largest instance the annealing evolver integrates by default; larger
/// instances go to the classical proxy.
pub const DEFAULT_ANNEAL_EVOLVER_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Qaoa,
    Qa,
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qaoa" => Ok(Solver::Qaoa),
            "qa" => Ok(Solver::Qa),
            other => Err(Error::parse("solver", format!("unknown solver `{other}`; expected qaoa or qa"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleSource {
    Default,
    Random,
    Fixed,
}

impl std::str::FromStr for AngleSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "default" => Ok(AngleSource::Default),
            "random" => Ok(AngleSource::Random),
            "fixed" => Ok(AngleSource::Fixed),
            other => Err(Error::parse("angles", format!("unknown angle mode `{other}`; expected default, random or fixed"))),
        }
    }
}

/// Inclusive size sweep `min, min + step, ..., <= max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
    pub step: usize,
}

impl SizeRange {
    /// Parses `A..B:S`, `A..B` (step 2) or a single size `A`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |m: &str| Error::parse("sizes", format!("`{text}`: {m}"));
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| err("expected A..B[:S] with integers"));
        let r = match text.split_once("..") {
            None => {
                let v = num(text)?;
                SizeRange { min: v, max: v, step: 2 }
            }
            Some((a, rest)) => {
                let (b, s) = match rest.split_once(':') {
                    Some((b, s)) => (b, Some(s)),
                    None => (rest, None),
                };
                SizeRange {
                    min: num(a)?,
                    max: num(b)?,
                    step: s.map(num).transpose()?.unwrap_or(2),
                }
            }
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min > self.max {
            return Err(Error::Config(format!("size range {}..{} is empty: min must be <= max", self.min, self.max)));
        }
        if self.step == 0 {
            return Err(Error::Config("size step must be >= 1".into()));
        }
        if self.min == 0 {
            return Err(Error::Config("sizes must be >= 1".into()));
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<usize> {
        (self.min..=self.max).step_by(self.step.max(1)).collect()
    }
}

/// Geometric anneal-time sweep in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealRange {
    pub min: f64,
    pub max: f64,
    pub factor: f64,
}

impl Default for AnnealRange {
    fn default() -> Self {
        AnnealRange {
            min: 1.0,
            max: 256.0,
            factor: 2.0,
        }
    }
}

impl AnnealRange {
    /// Parses `A..BxF`, `A..B` (factor 2) or a single time `A`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |m: &str| Error::parse("anneal", format!("`{text}`: {m}"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err("expected A..BxF with numbers"));
        let r = match text.split_once("..") {
            None => {
                let v = num(text)?;
                AnnealRange { min: v, max: v, factor: 2.0 }
            }
            Some((a, rest)) => {
                let (b, f) = match rest.split_once(['x', 'X']) {
                    Some((b, f)) => (b, Some(f)),
                    None => (rest, None),
                };
                AnnealRange {
                    min: num(a)?,
                    max: num(b)?,
                    factor: f.map(num).transpose()?.unwrap_or(2.0),
                }
            }
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!("anneal times must be positive, got {}..{}", self.min, self.max)));
        }
        if self.min > self.max {
            return Err(Error::Config(format!("anneal range {}..{} is empty: min must be <= max", self.min, self.max)));
        }
        if !(self.factor > 1.0 && self.factor.is_finite()) {
            return Err(Error::Config(format!("anneal factor must be > 1, got {}", self.factor)));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut t = self.min;
        while t <= self.max * (1.0 + 1e-12) {
            out.push(t);
            t *= self.factor;
        }
        out
    }
}

/// Everything that determines a run. Missing fields in a config file take
/// the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub solver: Solver,
    /// 1: single execution per point; 2: full iterative loop or anneal sweep.
    pub method: u8,
    pub sizes: SizeRange,
    pub instances_per_size: usize,
    pub max_restarts: usize,
    pub num_shots: u64,
    pub rounds: usize,
    pub max_iterations: usize,
    pub objective: Ratio,
    pub alpha: f64,
    pub eta: f64,
    pub angles: AngleSource,
    /// JSON table of fixed angles, required when `angles` is `fixed`.
    pub fixed_angles_path: Option<PathBuf>,
    pub anneal: AnnealRange,
    /// Preset name or profile file; `None` picks the solver's default preset.
    pub profile: Option<String>,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
    /// Method-1 grid: rounds and shot counts to sweep; empty means
    /// `[rounds]` and `[num_shots]`.
    pub sweep_rounds: Vec<usize>,
    pub sweep_shots: Vec<u64>,
    pub statevector_limit: usize,
    pub exhaustion_limit: usize,
    pub anneal_evolver_limit: usize,
    pub anneal_time_scale: f64,
    pub anneal_max_dt: f64,
    pub proxy_sweeps_per_us: f64,
    /// Nelder-Mead initial simplex edge, radians.
    pub initial_step: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            solver: Solver::Qaoa,
            method: 2,
            sizes: SizeRange { min: 4, max: 12, step: 2 },
            instances_per_size: 1,
            max_restarts: 1,
            num_shots: 1000,
            rounds: 2,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            objective: Ratio::Ar,
            alpha: DEFAULT_ALPHA,
            eta: DEFAULT_ETA,
            angles: AngleSource::Default,
            fixed_angles_path: None,
            anneal: AnnealRange::default(),
            profile: None,
            seed: 0,
            noise: None,
            sweep_rounds: Vec::new(),
            sweep_shots: Vec::new(),
            statevector_limit: DEFAULT_STATEVECTOR_LIMIT,
            exhaustion_limit: DEFAULT_EXHAUSTION_LIMIT,
            anneal_evolver_limit: DEFAULT_ANNEAL_EVOLVER_LIMIT,
            anneal_time_scale: DEFAULT_TIME_SCALE,
            anneal_max_dt: DEFAULT_MAX_DT,
            proxy_sweeps_per_us: 2.0,
            initial_step: 0.5,
        }
    }
}

impl BenchmarkConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.sizes.validate()?;
        if self.solver == Solver::Qa || self.method == 1 {
            self.anneal.validate()?;
        }
        if !matches!(self.method, 1 | 2) {
            return bad(format!("method must be 1 or 2, got {}", self.method));
        }
        if self.num_shots == 0 || self.sweep_shots.contains(&0) {
            return bad("shot counts must be >= 1".into());
        }
        if self.rounds == 0 || self.sweep_rounds.contains(&0) {
            return bad("rounds must be >= 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max iterations must be >= 1".into());
        }
        if self.max_restarts == 0 || self.instances_per_size == 0 {
            return bad("restarts and instances per size must be >= 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be > 0, got {}", self.eta));
        }
        if self.angles == AngleSource::Fixed && self.fixed_angles_path.is_none() {
            return bad("fixed angles need a table file (fixed_angles_path / --angle-table)".into());
        }
        if let Some(noise) = self.noise {
            NoiseModel::new(noise.p1, noise.p2)?;
        }
        if !(self.anneal_time_scale > 0.0 && self.anneal_max_dt > 0.0 && self.proxy_sweeps_per_us > 0.0) {
            return bad("anneal time scale, max dt and proxy sweep rate must be > 0".into());
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad(format!("initial step must be > 0, got {}", self.initial_step));
        }
        if let Some(p) = &self.profile {
            crate::metrics::DeviceProfile::resolve(p)?;
        }
        Ok(())
    }

    pub fn profile_name(&self) -> &str {
        match (&self.profile, self.solver) {
            (Some(p), _) => p,
            (None, Solver::Qaoa) => "superconducting",
            (None, Solver::Qa) => "annealer",
        }
    }

    pub fn anneal_times(&self) -> Vec<f64> {
        if self.method == 1 {
            vec![self.anneal.min]
        } else {
            self.anneal.times()
        }
    }

    pub fn method1_rounds(&self) -> Vec<usize> {
        if self.sweep_rounds.is_empty() {
            vec![self.rounds]
        } else {
            self.sweep_rounds.clone()
        }
    }

    pub fn method1_shots(&self) -> Vec<u64> {
        if self.sweep_shots.is_empty() {
            vec![self.num_shots]
        } else {
            self.sweep_shots.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(SizeRange::parse("4..16:2").unwrap().sizes(), vec![4, 6, 8, 10, 12, 14, 16]);
        assert_eq!(SizeRange::parse("4..8").unwrap().sizes(), vec![4, 6, 8]);
        assert_eq!(SizeRange::parse("6").unwrap().sizes(), vec![6]);
        assert_eq!(SizeRange::parse("4..9:4").unwrap().sizes(), vec![4, 8]);
        assert!(SizeRange::parse("8..4").unwrap_err().is_config());
        assert!(SizeRange::parse("4..x").unwrap_err().is_config());
        assert!(SizeRange::parse("4..8:0").is_err());
    }

    #[test]
    fn anneal_ranges() {
        let t = AnnealRange::parse("1..256x2").unwrap().times();
        assert_eq!(t.len(), 9);
        assert_eq!(t[8], 256.0);
        assert_eq!(AnnealRange::default().times(), t);
        assert_eq!(AnnealRange::parse("1..128").unwrap().times().len(), 8);
        assert_eq!(AnnealRange::parse("5").unwrap().times(), vec![5.0]);
        assert!(AnnealRange::parse("4..2").is_err());
        assert!(AnnealRange::parse("1..4x1").is_err());
        assert!(AnnealRange::parse("0..4").is_err());
    }

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let c = BenchmarkConfig::default();
        c.validate().unwrap();
        assert_eq!((c.num_shots, c.rounds, c.max_iterations, c.max_restarts), (1000, 2, 30, 1));
        assert_eq!(c.alpha, 0.1);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<BenchmarkConfig>(&text).unwrap(), c);
        let partial: BenchmarkConfig = serde_json::from_str(r#"{"num_shots": 50}"#).unwrap();
        assert_eq!(partial.num_shots, 50);
        assert_eq!(partial.rounds, 2);
        assert!(serde_json::from_str::<BenchmarkConfig>(r#"{"shots": 50}"#).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let check = |f: &dyn Fn(&mut BenchmarkConfig)| {
            let mut c = BenchmarkConfig::default();
            f(&mut c);
            assert!(c.validate().unwrap_err().is_config());
        };
        check(&|c| c.num_shots = 0);
        check(&|c| c.method = 3);
        check(&|c| c.alpha = 0.0);
        check(&|c| c.angles = AngleSource::Fixed);
        check(&|c| c.sizes = SizeRange { min: 8, max: 4, step: 2 });
        check(&|c| c.profile = Some("nowhere".into()));
        check(&|c| c.noise = Some(NoiseModel { p1: 2.0, p2: 0.0 }));
    }

    #[test]
    fn method_one_uses_single_anneal_time() {
        let c = BenchmarkConfig {
            solver: Solver::Qa,
            method: 1,
            ..Default::default()
        };
        assert_eq!(c.anneal_times(), vec![1.0]);
        assert_eq!(c.profile_name(), "annealer");
    }
}
