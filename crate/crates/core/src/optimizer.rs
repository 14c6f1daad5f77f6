//! Derivative-free minimization over ansatz angles.
//!
//! One objective evaluation is one ansatz execution, so the iteration cap is
//! a cap on evaluations, not on simplex updates.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qaoa::AnsatzParams;
use crate::seeds::stream_rng;

/// Default cap on ansatz executions per restart.
pub const DEFAULT_MAX_ITERATIONS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub point: Vec<f64>,
    pub objective_value: f64,
    pub eval_index: usize,
}

/// Every evaluation in call order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MinimizerTrace {
    pub entries: Vec<TraceEntry>,
}

impl MinimizerTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lowest objective value; the earliest entry wins ties.
    pub fn best(&self) -> Option<&TraceEntry> {
        self.entries.iter().fold(None, |best: Option<&TraceEntry>, e| match best {
            Some(b) if b.objective_value <= e.objective_value => Some(b),
            _ => Some(e),
        })
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub trace: MinimizerTrace,
    /// True if the simplex collapsed before the evaluation budget ran out.
    pub converged: bool,
}

pub trait Minimizer {
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        initial: &[f64],
        max_evaluations: usize,
    ) -> Result<MinimizeOutcome>;
}

/// Nelder-Mead simplex with optional box bounds (points are projected onto
/// the box before evaluation).
#[derive(Debug, Clone)]
pub struct NelderMead {
    pub initial_step: f64,
    pub bounds: Option<Vec<(f64, f64)>>,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            initial_step: 0.5,
            bounds: None,
            f_tol: 1e-10,
            x_tol: 1e-8,
        }
    }
}

impl NelderMead {
    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = Some(bounds);
        self
    }

    fn project(&self, x: &mut [f64]) {
        if let Some(bounds) = &self.bounds {
            for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
                *v = v.clamp(lo, hi);
            }
        }
    }
}

struct Budget<'a> {
    objective: &'a mut dyn FnMut(&[f64]) -> f64,
    max: usize,
    trace: MinimizerTrace,
}

impl Budget<'_> {
    /// `Ok(None)` once the budget is spent.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.trace.len() >= self.max {
            return Ok(None);
        }
        let value = (self.objective)(x);
        let eval_index = self.trace.len();
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective { eval_index, value });
        }
        self.trace.entries.push(TraceEntry {
            point: x.to_vec(),
            objective_value: value,
            eval_index,
        });
        Ok(Some(value))
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl Minimizer for NelderMead {
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        initial: &[f64],
        max_evaluations: usize,
    ) -> Result<MinimizeOutcome> {
        if max_evaluations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if initial.is_empty() {
            return Err(Error::Contract("cannot minimize over zero parameters".into()));
        }
        let dim = initial.len();
        let mut budget = Budget {
            objective,
            max: max_evaluations,
            trace: MinimizerTrace::default(),
        };
        let converged = self.run(&mut budget, initial, dim)?;
        let trace = budget.trace;
        let best = trace.best().expect("at least one evaluation").clone();
        Ok(MinimizeOutcome {
            best: best.point,
            best_value: best.objective_value,
            trace,
            converged,
        })
    }
}

impl NelderMead {
    fn run(&self, budget: &mut Budget<'_>, initial: &[f64], dim: usize) -> Result<bool> {
        const REFLECT: f64 = 1.0;
        const EXPAND: f64 = 2.0;
        const CONTRACT: f64 = 0.5;
        const SHRINK: f64 = 0.5;

        let mut x0 = initial.to_vec();
        self.project(&mut x0);
        let Some(f0) = budget.eval(&x0)? else { return Ok(false) };
        let mut simplex = vec![(x0.clone(), f0)];
        for i in 0..dim {
            let mut x = x0.clone();
            x[i] += self.initial_step;
            self.project(&mut x);
            if x[i] == x0[i] {
                x[i] -= self.initial_step;
                self.project(&mut x);
            }
            let Some(f) = budget.eval(&x)? else { return Ok(false) };
            simplex.push((x, f));
        }

        loop {
            // stable sort keeps earlier vertices first among equal values
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best_x, best_f) = simplex[0].clone();
            let f_spread = simplex.iter().map(|v| (v.1 - best_f).abs()).fold(0.0, f64::max);
            let x_spread = simplex
                .iter()
                .flat_map(|v| v.0.iter().zip(&best_x).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if f_spread <= self.f_tol && x_spread <= self.x_tol || f_spread == 0.0 {
                return Ok(true);
            }

            let worst = simplex[dim].clone();
            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / dim as f64;
                }
            }

            let mut xr = lerp(&centroid, &worst.0, -REFLECT);
            self.project(&mut xr);
            let Some(fr) = budget.eval(&xr)? else { return Ok(false) };

            if fr < best_f {
                let mut xe = lerp(&centroid, &worst.0, -EXPAND);
                self.project(&mut xe);
                let Some(fe) = budget.eval(&xe)? else { return Ok(false) };
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let mut xc = lerp(&centroid, &xr, CONTRACT);
                self.project(&mut xc);
                let Some(fc) = budget.eval(&xc)? else { return Ok(false) };
                (xc, fc)
            } else {
                let mut xc = lerp(&centroid, &worst.0, CONTRACT);
                self.project(&mut xc);
                let Some(fc) = budget.eval(&xc)? else { return Ok(false) };
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                simplex[dim] = (xc, fc);
                continue;
            }
            for v in simplex.iter_mut().skip(1) {
                let mut x = lerp(&best_x, &v.0, SHRINK);
                self.project(&mut x);
                let Some(f) = budget.eval(&x)? else { return Ok(false) };
                *v = (x, f);
            }
        }
    }
}

/// Minimizes `objective` over ansatz angles starting from `initial`.
pub fn minimize(
    objective: &mut dyn FnMut(&AnsatzParams) -> f64,
    initial: &AnsatzParams,
    max_iterations: usize,
) -> Result<(AnsatzParams, MinimizerTrace)> {
    let mut flat_objective = |x: &[f64]| match AnsatzParams::from_flat(x) {
        Ok(p) => objective(&p),
        Err(_) => f64::NAN,
    };
    let out = NelderMead::default().minimize(&mut flat_objective, &initial.to_flat(), max_iterations)?;
    Ok((AnsatzParams::from_flat(&out.best)?, out.trace))
}

/// Mixer angles repeat with period pi, phase angles with period 2 pi.
pub const BETA_RANGE: (f64, f64) = (0.0, PI);
pub const GAMMA_RANGE: (f64, f64) = (0.0, 2.0 * PI);

/// Box bounds matching [`BETA_RANGE`] and [`GAMMA_RANGE`] for `rounds` rounds.
pub fn angle_bounds(rounds: usize) -> Vec<(f64, f64)> {
    std::iter::repeat_n(BETA_RANGE, rounds)
        .chain(std::iter::repeat_n(GAMMA_RANGE, rounds))
        .collect()
}

/// User-supplied angles per round count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedAngleEntry {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Where the numbers came from.
    pub source: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FixedAngleTable(pub BTreeMap<u32, FixedAngleEntry>);

impl FixedAngleTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AngleMode {
    /// Every angle set to 1.
    Default,
    /// Betas uniform in [0, pi), gammas uniform in [0, 2 pi).
    Random { seed: u64 },
    Fixed(FixedAngleTable),
}

pub fn initial_angles(rounds: usize, mode: &AngleMode) -> Result<AnsatzParams> {
    if rounds == 0 {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    match mode {
        AngleMode::Default => Ok(AnsatzParams::uniform(rounds, 1.0, 1.0)),
        AngleMode::Random { seed } => {
            let mut rng = stream_rng(*seed, 0);
            let betas = (0..rounds).map(|_| rng.random_range(BETA_RANGE.0..BETA_RANGE.1)).collect();
            let gammas = (0..rounds).map(|_| rng.random_range(GAMMA_RANGE.0..GAMMA_RANGE.1)).collect();
            AnsatzParams::new(betas, gammas)
        }
        AngleMode::Fixed(table) => {
            let entry = table
                .0
                .get(&(rounds as u32))
                .ok_or_else(|| Error::Config(format!("fixed-angle table has no entry for {rounds} rounds")))?;
            if entry.betas.len() != rounds || entry.gammas.len() != rounds {
                return Err(Error::Config(format!("fixed-angle entry for {rounds} rounds has the wrong length")));
            }
            AnsatzParams::new(entry.betas.clone(), entry.gammas.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(x: &[f64]) -> f64 {
        x.iter().map(|v| (v - 2.0).powi(2)).sum()
    }

    #[test]
    fn finds_quadratic_minimum() {
        for dim in [2, 4] {
            let mut f = quadratic;
            let out = NelderMead::default().minimize(&mut f, &vec![0.0; dim], 200).unwrap();
            assert!(out.trace.len() <= 200);
            for v in &out.best {
                assert!((v - 2.0).abs() < 1e-3, "dim {dim}: {:?}", out.best);
            }
        }
    }

    #[test]
    fn respects_evaluation_cap() {
        let mut f = quadratic;
        let out = NelderMead::default().minimize(&mut f, &[0.0, 0.0, 0.0, 0.0], 30).unwrap();
        assert_eq!(out.trace.len(), 30);
        let idx: Vec<usize> = out.trace.entries.iter().map(|e| e.eval_index).collect();
        assert!(idx.windows(2).all(|w| w[1] > w[0]));
        assert!(!out.converged);
    }

    #[test]
    fn constant_objective_keeps_initial_point() {
        let mut f = |_: &[f64]| 3.0;
        let out = NelderMead::default().minimize(&mut f, &[0.3, 0.7], 30).unwrap();
        assert_eq!(out.best, vec![0.3, 0.7]);
        assert!(out.converged);
    }

    #[test]
    fn non_finite_objective_aborts() {
        let mut calls = 0;
        let mut f = |_: &[f64]| {
            calls += 1;
            if calls == 3 {
                f64::NAN
            } else {
                1.0 / calls as f64
            }
        };
        let err = NelderMead::default().minimize(&mut f, &[0.0, 0.0], 30).unwrap_err();
        assert!(matches!(err, Error::NonFiniteObjective { eval_index: 2, .. }));
    }

    #[test]
    fn zero_budget_is_rejected() {
        let mut f = quadratic;
        assert!(NelderMead::default().minimize(&mut f, &[0.0], 0).is_err());
    }

    #[test]
    fn bounds_are_respected() {
        let mut f = quadratic;
        let nm = NelderMead::default().with_bounds(vec![(0.0, 1.5), (0.0, 1.5)]);
        let out = nm.minimize(&mut f, &[0.0, 0.0], 200).unwrap();
        for e in &out.trace.entries {
            assert!(e.point.iter().all(|v| (0.0..=1.5).contains(v)));
        }
        assert!(out.best.iter().all(|v| (v - 1.5).abs() < 1e-3));
    }

    #[test]
    fn deterministic_and_trace_consistent() {
        let run = || {
            let mut f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] + 1.0).powi(4) + x[0].sin();
            NelderMead::default().minimize(&mut f, &[1.0, 1.0], 60).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.trace, b.trace);
        for e in &a.trace.entries {
            let x = &e.point;
            assert_eq!(e.objective_value, (x[0] - 0.3).powi(2) + (x[1] + 1.0).powi(4) + x[0].sin());
        }
        assert_eq!(a.best_value, a.trace.best().unwrap().objective_value);
    }

    #[test]
    fn ansatz_wrapper_returns_params() {
        let mut f = |p: &AnsatzParams| (p.betas[0] - 0.5).powi(2) + (p.gammas[0] - 1.5).powi(2);
        let (best, trace) = minimize(&mut f, &AnsatzParams::uniform(1, 1.0, 1.0), 120).unwrap();
        assert!(trace.len() <= 120);
        assert!((best.betas[0] - 0.5).abs() < 1e-3 && (best.gammas[0] - 1.5).abs() < 1e-3);
    }

    #[test]
    fn initial_angle_modes() {
        let d = initial_angles(2, &AngleMode::Default).unwrap();
        assert_eq!((d.betas, d.gammas), (vec![1.0, 1.0], vec![1.0, 1.0]));

        let r1 = initial_angles(3, &AngleMode::Random { seed: 5 }).unwrap();
        assert_eq!(r1, initial_angles(3, &AngleMode::Random { seed: 5 }).unwrap());
        assert_ne!(r1, initial_angles(3, &AngleMode::Random { seed: 6 }).unwrap());
        assert!(r1.betas.iter().all(|b| (0.0..PI).contains(b)));
        assert!(r1.gammas.iter().all(|g| (0.0..2.0 * PI).contains(g)));

        let mut table = FixedAngleTable::default();
        table.0.insert(
            2,
            FixedAngleEntry {
                betas: vec![0.1, 0.2],
                gammas: vec![0.3, 0.4],
                source: "test".into(),
            },
        );
        let f = initial_angles(2, &AngleMode::Fixed(table.clone())).unwrap();
        assert_eq!((f.betas, f.gammas), (vec![0.1, 0.2], vec![0.3, 0.4]));
        assert!(matches!(initial_angles(3, &AngleMode::Fixed(table)), Err(Error::Config(_))));
    }

    #[test]
    fn fixed_table_file_format() {
        let json = r#"{ "1": {"betas": [0.4], "gammas": [0.6], "source": "hand-tuned"} }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("angles.json");
        std::fs::write(&path, json).unwrap();
        let t = FixedAngleTable::load(&path).unwrap();
        assert_eq!(t.0[&1].source, "hand-tuned");
    }
}
