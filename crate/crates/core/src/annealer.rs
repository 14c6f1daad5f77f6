//! Quantum-annealing solver: closed-system transverse-field Ising evolution
//! for small instances and a Metropolis annealing proxy for large ones.
//!
//! The annealing Hamiltonian is `H(s) = A(s) H_init + B(s) H_target` with
//! `H_init = -sum_i X_i` (ground state: uniform superposition) and
//! `H_target = sum_(i,j) in E Z_i Z_j` (ground states: maximum cuts).
//! Nominal anneal time in microseconds is multiplied by `time_scale` to get
//! the dimensionless evolution time.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::graphs::GraphInstance;
use crate::hamiltonian::diagonal_cost_table;
use crate::qaoa::{sample, SampleSet, Statevector};
use crate::seeds::stream_rng;

/// Dimensionless time units per microsecond of nominal anneal time.
pub const DEFAULT_TIME_SCALE: f64 = 10.0;

/// Largest split-step used when the default step size is requested.
pub const DEFAULT_MAX_DT: f64 = 0.1;

/// Steps per anneal when the anneal is short enough that `max_dt` does not bind.
pub const DEFAULT_STEPS: f64 = 1000.0;

const NORM_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleShape {
    /// `A(s) = 1 - s`, `B(s) = s`.
    Linear,
    /// Piecewise-linear `(s, A, B)` knots, sorted by `s`, spanning `[0, 1]`.
    Tabulated { knots: Vec<(f64, f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub shape: ScheduleShape,
    pub anneal_time_us: f64,
    pub time_scale: f64,
}

impl AnnealSchedule {
    pub fn linear(anneal_time_us: f64) -> Self {
        AnnealSchedule {
            shape: ScheduleShape::Linear,
            anneal_time_us,
            time_scale: DEFAULT_TIME_SCALE,
        }
    }

    pub fn with_time_scale(mut self, time_scale: f64) -> Self {
        self.time_scale = time_scale;
        self
    }

    fn interpolate(&self, s: f64) -> (f64, f64) {
        match &self.shape {
            ScheduleShape::Linear => (1.0 - s, s),
            ScheduleShape::Tabulated { knots } => {
                let k = knots.partition_point(|k| k.0 <= s).clamp(1, knots.len() - 1);
                let (s0, a0, b0) = knots[k - 1];
                let (s1, a1, b1) = knots[k];
                let t = if s1 > s0 { ((s - s0) / (s1 - s0)).clamp(0.0, 1.0) } else { 0.0 };
                (a0 + t * (a1 - a0), b0 + t * (b1 - b0))
            }
        }
    }

    pub fn a(&self, s: f64) -> f64 {
        self.interpolate(s).0
    }

    pub fn b(&self, s: f64) -> f64 {
        self.interpolate(s).1
    }

    /// Dimensionless evolution time.
    pub fn duration(&self) -> f64 {
        self.anneal_time_us * self.time_scale
    }

    /// `min(duration / 1000, max_dt)`.
    pub fn default_dt(&self, max_dt: f64) -> f64 {
        (self.duration() / DEFAULT_STEPS).min(max_dt)
    }

    /// Checks the schedule starts transverse-dominated and ends
    /// problem-dominated by at least a factor of 10 each way.
    pub fn validate(&self) -> Result<()> {
        if !(self.anneal_time_us >= 0.0 && self.anneal_time_us.is_finite()) {
            return Err(Error::Config(format!("anneal time must be >= 0, got {}", self.anneal_time_us)));
        }
        if !(self.time_scale > 0.0 && self.time_scale.is_finite()) {
            return Err(Error::Config(format!("time scale must be > 0, got {}", self.time_scale)));
        }
        if let ScheduleShape::Tabulated { knots } = &self.shape {
            if knots.len() < 2 || knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
                return Err(Error::Config("tabulated schedule must have knots at s = 0 and s = 1".into()));
            }
            if knots.windows(2).any(|w| w[1].0 < w[0].0) {
                return Err(Error::Config("tabulated schedule knots must be sorted by s".into()));
            }
        }
        let (a0, b0) = self.interpolate(0.0);
        let (a1, b1) = self.interpolate(1.0);
        if a0 < 10.0 * b0 || b1 < 10.0 * a1 {
            return Err(Error::Config(format!(
                "schedule must satisfy A(0) >= 10 B(0) and B(1) >= 10 A(1); got A(0)={a0}, B(0)={b0}, A(1)={a1}, B(1)={b1}"
            )));
        }
        Ok(())
    }
}

/// Integrates the Schrödinger equation with a second-order split step:
/// half a diagonal step, a full transverse-field step, half a diagonal step,
/// with the schedule evaluated at the midpoint of each step.
pub fn evolve_schedule(g: &GraphInstance, schedule: &AnnealSchedule, dt: f64, limit: usize) -> Result<Statevector> {
    if g.num_nodes() > limit {
        return Err(Error::ResourceLimit {
            what: "annealing evolution",
            requested: g.num_nodes(),
            limit,
        });
    }
    let mut state = Statevector::uniform(g.num_nodes());
    let duration = schedule.duration();
    if duration <= 0.0 {
        return Ok(state);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("step size must be > 0, got {dt}")));
    }
    let table = diagonal_cost_table(g, limit)?;
    let m = g.num_edges();
    let steps = (duration / dt).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let mut phases = vec![Complex64::new(1.0, 0.0); m + 1];
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        let (a, b) = schedule.interpolate(s);
        for (c, p) in phases.iter_mut().enumerate() {
            let energy = m as f64 - 2.0 * c as f64;
            *p = Complex64::from_polar(1.0, -b * energy * h / 2.0);
        }
        state.apply_cut_phases(table.cut_sizes(), &phases);
        // exp(-i a h H_init) with H_init = -sum X is exp(+i a h X) per qubit
        state.apply_mixer(-a * h);
        state.apply_cut_phases(table.cut_sizes(), &phases);
    }
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::Integration { drift, dt: h });
    }
    Ok(state)
}

/// Anneals once and measures `reads` times.
pub fn anneal_and_sample(
    g: &GraphInstance,
    schedule: &AnnealSchedule,
    dt: f64,
    reads: u64,
    seed: u64,
    limit: usize,
) -> Result<SampleSet> {
    if reads == 0 {
        return Err(Error::Contract("need at least one read".into()));
    }
    let state = evolve_schedule(g, schedule, dt, limit)?;
    Ok(sample(&state, reads, seed))
}

/// Settings of the Metropolis annealing proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyParams {
    /// Monte Carlo sweeps per microsecond of nominal anneal time.
    pub sweeps_per_us: f64,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for ProxyParams {
    fn default() -> Self {
        ProxyParams {
            sweeps_per_us: 2.0,
            beta_start: 0.1,
            beta_end: 5.0,
        }
    }
}

impl ProxyParams {
    pub fn sweeps(&self, anneal_time_us: f64) -> usize {
        (anneal_time_us * self.sweeps_per_us).round().max(1.0) as usize
    }
}

/// Metropolis simulated annealing on the Ising encoding, one independent
/// chain per read (RNG stream `read` of `seed`) from a random start, with a
/// geometric inverse-temperature ramp. Returns each chain's final state.
pub fn classical_proxy_sample(
    g: &GraphInstance,
    anneal_time_us: f64,
    reads: u64,
    seed: u64,
    params: &ProxyParams,
) -> Result<SampleSet> {
    if reads == 0 {
        return Err(Error::Contract("need at least one read".into()));
    }
    let n = g.num_nodes();
    let adj = g.neighbors();
    let sweeps = params.sweeps(anneal_time_us);
    let betas: Vec<f64> = (0..sweeps)
        .map(|k| {
            if sweeps == 1 {
                params.beta_end
            } else {
                let t = k as f64 / (sweeps - 1) as f64;
                params.beta_start * (params.beta_end / params.beta_start).powf(t)
            }
        })
        .collect();
    let finals: Vec<Bitstring> = (0..reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = stream_rng(seed, read);
            let mut spins: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            for &beta in &betas {
                for i in 0..n {
                    let field: i32 = adj[i].iter().map(|&j| spins[j] as i32).sum();
                    let delta = -2 * spins[i] as i32 * field;
                    if delta <= 0 || rng.random::<f64>() < (-beta * delta as f64).exp() {
                        spins[i] = -spins[i];
                    }
                }
            }
            let bits: Vec<bool> = spins.iter().map(|&z| z < 0).collect();
            Bitstring::from_bools(&bits)
        })
        .collect();
    SampleSet::from_bitstrings(n, finals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{exact_max_cut, generate_3_regular};
    use crate::hamiltonian::DEFAULT_STATEVECTOR_LIMIT as LIMIT;

    fn edge() -> GraphInstance {
        GraphInstance::new(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn schedule_invariants() {
        AnnealSchedule::linear(1.0).validate().unwrap();
        let flat = AnnealSchedule {
            shape: ScheduleShape::Tabulated {
                knots: vec![(0.0, 1.0, 0.0), (1.0, 1.0, 0.0)],
            },
            anneal_time_us: 1.0,
            time_scale: 1.0,
        };
        assert!(flat.validate().is_err());
        assert!(AnnealSchedule::linear(-1.0).validate().is_err());
        let tab = AnnealSchedule {
            shape: ScheduleShape::Tabulated {
                knots: vec![(0.0, 1.0, 0.0), (0.5, 0.2, 0.3), (1.0, 0.0, 1.0)],
            },
            anneal_time_us: 1.0,
            time_scale: 1.0,
        };
        tab.validate().unwrap();
        assert!((tab.a(0.25) - 0.6).abs() < 1e-12 && (tab.b(0.75) - 0.65).abs() < 1e-12);
    }

    #[test]
    fn zero_time_gives_uniform_state() {
        let g = generate_3_regular(6, 0).unwrap();
        let s = evolve_schedule(&g, &AnnealSchedule::linear(0.0), 0.1, LIMIT).unwrap();
        assert_eq!(s, Statevector::uniform(6));
    }

    #[test]
    fn no_problem_term_keeps_distribution_uniform() {
        let g = generate_3_regular(6, 1).unwrap();
        let sched = AnnealSchedule {
            shape: ScheduleShape::Tabulated {
                knots: vec![(0.0, 1.0, 0.0), (1.0, 0.3, 0.0)],
            },
            anneal_time_us: 5.0,
            time_scale: 10.0,
        };
        let s = evolve_schedule(&g, &sched, 0.05, LIMIT).unwrap();
        for p in s.probabilities() {
            assert!((p - 1.0 / 64.0).abs() < 1e-10);
        }
    }

    #[test]
    fn long_single_edge_anneal_reaches_cut_subspace() {
        let sched = AnnealSchedule::linear(20.0);
        let s = evolve_schedule(&edge(), &sched, sched.default_dt(DEFAULT_MAX_DT), LIMIT).unwrap();
        let p = s.probabilities();
        assert!(p[1] + p[2] > 0.99, "overlap {}", p[1] + p[2]);
    }

    #[test]
    fn norm_is_preserved_at_default_step() {
        let g = generate_3_regular(8, 2).unwrap();
        let sched = AnnealSchedule::linear(4.0);
        let s = evolve_schedule(&g, &sched, sched.default_dt(DEFAULT_MAX_DT), LIMIT).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_step_and_large_graphs() {
        let g = generate_3_regular(6, 0).unwrap();
        assert!(evolve_schedule(&g, &AnnealSchedule::linear(1.0), 0.0, LIMIT).is_err());
        assert!(matches!(
            evolve_schedule(&g, &AnnealSchedule::linear(1.0), 0.1, 4),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn reads_are_counted() {
        let g = generate_3_regular(6, 0).unwrap();
        let s = anneal_and_sample(&g, &AnnealSchedule::linear(1.0), 0.01, 1000, 3, LIMIT).unwrap();
        assert_eq!(s.shots(), 1000);
        assert!(anneal_and_sample(&g, &AnnealSchedule::linear(1.0), 0.01, 0, 3, LIMIT).is_err());
    }

    #[test]
    fn proxy_finds_k4_optimum() {
        let g = GraphInstance::complete(4);
        let s = classical_proxy_sample(&g, 50.0, 50, 1, &ProxyParams::default()).unwrap();
        let best = s.counts().keys().map(|b| g.cut_size(b).unwrap()).max().unwrap();
        assert_eq!(best, 4);
    }

    #[test]
    fn proxy_single_read() {
        let g = generate_3_regular(10, 0).unwrap();
        let s = classical_proxy_sample(&g, 1.0, 1, 1, &ProxyParams::default()).unwrap();
        assert_eq!(s.shots(), 1);
        assert_eq!(s.counts().len(), 1);
    }

    #[test]
    fn proxy_quality_grows_with_sweeps() {
        let g = generate_3_regular(40, 3).unwrap();
        let params = ProxyParams {
            sweeps_per_us: 1.0,
            ..ProxyParams::default()
        };
        let mean_cut = |t: f64| {
            (0..20u64)
                .map(|seed| {
                    let s = classical_proxy_sample(&g, t, 20, seed, &params).unwrap();
                    s.counts().iter().map(|(b, &c)| g.cut_size(b).unwrap() * c).sum::<u64>() as f64 / 20.0
                })
                .sum::<f64>()
                / 20.0
        };
        let cuts: Vec<f64> = [1.0, 4.0, 16.0, 64.0].iter().map(|&t| mean_cut(t)).collect();
        assert!(cuts.windows(2).all(|w| w[1] >= w[0]), "{cuts:?}");
    }

    #[test]
    fn proxy_and_evolver_agree_on_best_cut() {
        for (n, seed) in [(6, 0), (8, 1), (10, 2), (12, 3)] {
            let g = generate_3_regular(n, seed).unwrap();
            let opt = exact_max_cut(&g, 24).size().unwrap();
            let best = |s: &SampleSet| s.counts().keys().map(|b| g.cut_size(b).unwrap()).max().unwrap();
            let proxy = classical_proxy_sample(&g, 64.0, 200, 4, &ProxyParams::default()).unwrap();
            let sched = AnnealSchedule::linear(16.0);
            let quantum = anneal_and_sample(&g, &sched, sched.default_dt(DEFAULT_MAX_DT), 200, 4, LIMIT).unwrap();
            assert_eq!(best(&proxy), opt);
            assert_eq!(best(&quantum), opt);
        }
    }
}
