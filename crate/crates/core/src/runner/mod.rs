//! Benchmark loops for both solvers.
//!
//! A run sweeps problem sizes (and optionally several instances per size).
//! Each `(size, instance)` group is independent: QAOA groups run restarts of
//! the minimizer loop with one record per ansatz execution, QA groups run an
//! anneal-time sweep per restart with one record per anneal time, and
//! Method-1 QAOA runs execute a fixed-angle ansatz once per grid point.
//! Groups run in parallel and their output is merged in sweep order, so the
//! metrics file does not depend on scheduling.

pub mod config;
pub mod records;

use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{AngleSource, AnnealRange, BenchmarkConfig, SizeRange, Solver};
pub use records::*;

use crate::annealer::{classical_proxy_sample, evolve_schedule, AnnealSchedule, ProxyParams};
use crate::error::{Error, Result};
use crate::graphs::{generate_3_regular, GraphInstance};
use crate::hamiltonian::{diagonal_cost_table, DiagonalCostTable};
use crate::metrics::{
    annealing_timing, gate_model_timing, quality_from_histogram, CutHistogram, DeviceProfile, QualityRecord,
    TimingAccumulator,
};
use crate::optimizer::{angle_bounds, initial_angles, AngleMode, FixedAngleTable, Minimizer, NelderMead};
use crate::qaoa::{
    circuit_resources, evolve_with_table, hellinger_fidelities, noisy_sample, sample, AnsatzParams, SampleSet, Statevector,
};
use crate::seeds::derive_seed;
use crate::{SCHEMA_VERSION, TOOL_VERSION};

const TAG_INSTANCE: u64 = 1;
const TAG_RESTART: u64 = 2;
const TAG_METHOD1: u64 = 3;
const TAG_REFERENCE: u64 = 4;

/// Seed of instance `instance` at `size` under master seed `master`.
pub fn instance_seed(master: u64, size: usize, instance: usize) -> u64 {
    derive_seed(master, &[TAG_INSTANCE, size as u64, instance as u64])
}

fn restart_seed(cfg: &BenchmarkConfig, size: usize, instance: usize, restart: usize) -> u64 {
    derive_seed(cfg.seed, &[TAG_RESTART, size as u64, instance as u64, restart as u64])
}

/// Shared, read-only inputs resolved once per run.
struct Context<'a> {
    cfg: &'a BenchmarkConfig,
    profile: DeviceProfile,
    fixed: Option<FixedAngleTable>,
}

impl Context<'_> {
    /// Restart 1 starts from the configured angle mode; later restarts start
    /// from random angles.
    fn angle_mode(&self, restart: usize, seed: u64) -> AngleMode {
        match (self.cfg.angles, restart) {
            (AngleSource::Default, 1) => AngleMode::Default,
            (AngleSource::Fixed, 1) => AngleMode::Fixed(self.fixed.clone().unwrap_or_default()),
            _ => AngleMode::Random { seed },
        }
    }
}

#[derive(Default)]
struct GroupOut {
    lines: Vec<MetricLine>,
    wallclock: Vec<WallclockLine>,
    instance: Option<(InstanceSeed, GraphInstance)>,
}

/// Runs the configured benchmark in memory.
pub fn execute(cfg: &BenchmarkConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let profile = DeviceProfile::resolve(cfg.profile_name())?;
    let fixed = match (&cfg.angles, &cfg.fixed_angles_path) {
        (AngleSource::Fixed, Some(path)) => Some(FixedAngleTable::load(path)?),
        _ => None,
    };
    let ctx = Context { cfg, profile, fixed };
    if cfg.solver == Solver::Qaoa {
        let rounds = if cfg.method == 1 { cfg.method1_rounds() } else { vec![cfg.rounds] };
        for p in rounds {
            initial_angles(p, &ctx.angle_mode(1, 0))?;
        }
    }

    let keys: Vec<(usize, usize)> = cfg
        .sizes
        .sizes()
        .into_iter()
        .flat_map(|n| (0..cfg.instances_per_size).map(move |k| (n, k)))
        .collect();
    let groups: Vec<GroupOut> = keys
        .par_iter()
        .map(|&(size, k)| {
            let mut out = GroupOut::default();
            let result = prepare_instance(cfg, size, k).and_then(|(key, g)| {
                out.instance = Some((key, g.clone()));
                match (cfg.solver, cfg.method) {
                    (Solver::Qaoa, 1) => qaoa_method1_group(&ctx, &g, k, &mut out),
                    (Solver::Qaoa, _) => qaoa_group(&ctx, &g, k, &mut out),
                    (Solver::Qa, _) => qa_group(&ctx, &g, k, &mut out),
                }
            });
            if let Err(e) = result {
                log::warn!("size {size} instance {k}: {e}");
                out.lines.push(MetricLine::Group(GroupRecord {
                    size,
                    instance: k,
                    best_restart: None,
                    quality: None,
                    error: Some(e.to_string()),
                }));
            }
            out
        })
        .collect();

    let mut run = RunOutput {
        lines: vec![MetricLine::Header {
            tool_version: TOOL_VERSION.to_string(),
            schema_version: SCHEMA_VERSION,
            config: Box::new(cfg.clone()),
        }],
        ..Default::default()
    };
    for g in groups {
        run.lines.extend(g.lines);
        run.wallclock.extend(g.wallclock);
        run.instances.extend(g.instance);
    }
    Ok(run)
}

pub fn run_qaoa_benchmark(cfg: &BenchmarkConfig) -> Result<RunOutput> {
    if cfg.solver != Solver::Qaoa || cfg.method != 2 {
        return Err(Error::Config("run_qaoa_benchmark needs solver qaoa, method 2".into()));
    }
    execute(cfg)
}

pub fn run_qa_benchmark(cfg: &BenchmarkConfig) -> Result<RunOutput> {
    if cfg.solver != Solver::Qa {
        return Err(Error::Config("run_qa_benchmark needs solver qa".into()));
    }
    execute(cfg)
}

pub fn run_method1_qaoa(cfg: &BenchmarkConfig) -> Result<RunOutput> {
    if cfg.solver != Solver::Qaoa || cfg.method != 1 {
        return Err(Error::Config("run_method1_qaoa needs solver qaoa, method 1".into()));
    }
    execute(cfg)
}

/// Executes `cfg` and writes the run directory.
pub fn run_to_dir(cfg: &BenchmarkConfig, dir: &Path) -> Result<RunOutput> {
    let started = unix_now();
    let out = execute(cfg)?;
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        instance_seeds: out.instance_seeds(),
        started_unix: started,
        finished_unix: unix_now(),
    };
    write_run(dir, &out, &manifest)?;
    Ok(out)
}

fn prepare_instance(cfg: &BenchmarkConfig, size: usize, k: usize) -> Result<(InstanceSeed, GraphInstance)> {
    let seed = instance_seed(cfg.seed, size, k);
    let mut g = generate_3_regular(size, seed)?;
    g.annotate_exact(cfg.exhaustion_limit);
    Ok((InstanceSeed { size, instance: k, seed }, g))
}

fn exact_optimum(table: &DiagonalCostTable) -> Result<u64> {
    match table.max_cut() {
        0 => Err(Error::DegenerateInstance("optimal cut is 0".into())),
        c => Ok(c as u64),
    }
}

/// Best record by objective; the earliest wins ties.
fn best_index(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Appends restart and group summaries for a group whose restarts produced
/// `restarts[r]` = (records, converged).
fn summarize(g: &GraphInstance, k: usize, restarts: &[(Vec<IterationRecord>, bool)], out: &mut GroupOut) {
    let size = g.num_nodes();
    let mut finals = Vec::new();
    for (r, (records, converged)) in restarts.iter().enumerate() {
        let Some(b) = best_index(records.iter().map(|rec| rec.objective_value)) else {
            continue;
        };
        let rec = &records[b];
        finals.push((r + 1, rec.objective_value, rec.quality));
        out.lines.push(MetricLine::Restart(RestartRecord {
            size,
            instance: k,
            restart: r + 1,
            best_iteration: rec.iteration,
            executions: records.len(),
            converged: *converged,
            final_objective: rec.objective_value,
            quality: rec.quality,
        }));
    }
    let best = best_index(finals.iter().map(|f| f.1)).map(|i| finals[i]);
    out.lines.push(MetricLine::Group(GroupRecord {
        size,
        instance: k,
        best_restart: best.map(|b| b.0),
        quality: best.map(|b| b.2),
        error: None,
    }));
}

fn score(cfg: &BenchmarkConfig, hist: &CutHistogram, optimal: u64) -> Result<(QualityRecord, f64)> {
    let q = quality_from_histogram(hist, optimal, cfg.alpha, cfg.eta)?;
    Ok((q, q.ratio(cfg.objective)))
}

fn qaoa_group(ctx: &Context, g: &GraphInstance, k: usize, out: &mut GroupOut) -> Result<()> {
    let cfg = ctx.cfg;
    let table = diagonal_cost_table(g, cfg.statevector_limit)?;
    let optimal = exact_optimum(&table)?;
    let restarts: Vec<(Vec<IterationRecord>, Vec<WallclockLine>, bool)> = (1..=cfg.max_restarts)
        .into_par_iter()
        .map(|r| qaoa_restart(ctx, g, &table, optimal, k, r))
        .collect::<Result<_>>()?;
    let mut summary = Vec::new();
    for (records, wall, converged) in restarts {
        out.lines.extend(records.iter().cloned().map(|r| MetricLine::Iteration(Box::new(r))));
        out.wallclock.extend(wall);
        summary.push((records, converged));
    }
    summarize(g, k, &summary, out);
    Ok(())
}

fn qaoa_restart(
    ctx: &Context,
    g: &GraphInstance,
    table: &DiagonalCostTable,
    optimal: u64,
    k: usize,
    restart: usize,
) -> Result<(Vec<IterationRecord>, Vec<WallclockLine>, bool)> {
    let cfg = ctx.cfg;
    let size = g.num_nodes();
    let seed = restart_seed(cfg, size, k, restart);
    let init = initial_angles(cfg.rounds, &ctx.angle_mode(restart, seed))?;
    let mut acc = TimingAccumulator::new();
    let mut records = Vec::new();
    let mut wall = Vec::new();
    let mut failure: Option<Error> = None;

    let mut objective = |x: &[f64]| -> f64 {
        let started = Instant::now();
        let iteration = records.len() + 1;
        let exec_seed = derive_seed(seed, &[iteration as u64]);
        let result = AnsatzParams::from_flat(x).and_then(|params| {
            let samples = match cfg.noise {
                Some(noise) if !noise.is_noiseless() => {
                    noisy_sample(g, &params, cfg.num_shots, noise, exec_seed, cfg.statevector_limit)?
                }
                _ => sample(&evolve_with_table(table, g.num_edges(), &params), cfg.num_shots, exec_seed),
            };
            let hist = CutHistogram::from_table(&samples, table)?;
            let (quality, value) = score(cfg, &hist, optimal)?;
            Ok((params, hist, quality, value))
        });
        match result {
            Ok((params, hist, quality, value)) => {
                records.push(IterationRecord {
                    solver: Solver::Qaoa,
                    size,
                    instance: k,
                    restart,
                    iteration,
                    anneal_time_us: None,
                    params: Some(params),
                    shots: cfg.num_shots,
                    backend: Backend::Statevector,
                    optimal_cut: optimal,
                    optimal_exact: true,
                    objective_value: value,
                    quality,
                    timing: acc.push(gate_model_timing(&ctx.profile, cfg.num_shots)),
                    seed: exec_seed,
                    cut_histogram: hist,
                });
                wall.push(WallclockLine {
                    size,
                    instance: k,
                    restart,
                    iteration,
                    seconds: started.elapsed().as_secs_f64(),
                });
                -value
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let minimizer = NelderMead {
        initial_step: cfg.initial_step,
        bounds: Some(angle_bounds(cfg.rounds)),
        ..NelderMead::default()
    };
    let outcome = minimizer.minimize(&mut objective, &init.to_flat(), cfg.max_iterations);
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = outcome?;
    Ok((records, wall, outcome.converged))
}

fn qaoa_method1_group(ctx: &Context, g: &GraphInstance, k: usize, out: &mut GroupOut) -> Result<()> {
    let cfg = ctx.cfg;
    let size = g.num_nodes();
    let table = diagonal_cost_table(g, cfg.statevector_limit)?;
    let optimal = exact_optimum(&table)?;
    let rounds = cfg.method1_rounds();
    let shots = cfg.method1_shots();
    let grid: Vec<(usize, u64)> = rounds.iter().flat_map(|&p| shots.iter().map(move |&s| (p, s))).collect();
    let records: Vec<(FidelityRecord, WallclockLine)> = grid
        .par_iter()
        .enumerate()
        .map(|(idx, &(p, n_shots))| {
            let started = Instant::now();
            let seed = derive_seed(cfg.seed, &[TAG_METHOD1, size as u64, k as u64, p as u64, n_shots]);
            let params = initial_angles(p, &ctx.angle_mode(1, derive_seed(seed, &[0])))?;
            let state = evolve_with_table(&table, g.num_edges(), &params);
            let ideal = state.probabilities();
            let noise = cfg.noise.filter(|n| !n.is_noiseless());
            let samples = match noise {
                Some(noise) => noisy_sample(g, &params, n_shots, noise, seed, cfg.statevector_limit)?,
                None => sample(&state, n_shots, seed),
            };
            let fidelity = hellinger_fidelities(&samples, &ideal)?;
            let hist = CutHistogram::from_table(&samples, &table)?;
            let (quality, _) = score(cfg, &hist, optimal)?;
            let record = FidelityRecord {
                size,
                instance: k,
                rounds: p,
                shots: n_shots,
                seed,
                params,
                noise,
                fidelity,
                resources: circuit_resources(g, p),
                optimal_cut: optimal,
                quality,
                cut_histogram: hist,
            };
            let wall = WallclockLine {
                size,
                instance: k,
                restart: 1,
                iteration: idx + 1,
                seconds: started.elapsed().as_secs_f64(),
            };
            Ok((record, wall))
        })
        .collect::<Result<_>>()?;
    for (rec, wall) in records {
        out.lines.push(MetricLine::Fidelity(Box::new(rec)));
        out.wallclock.push(wall);
    }
    Ok(())
}

fn qa_group(ctx: &Context, g: &GraphInstance, k: usize, out: &mut GroupOut) -> Result<()> {
    let cfg = ctx.cfg;
    let size = g.num_nodes();
    let times = cfg.anneal_times();
    let use_evolver = size <= cfg.anneal_evolver_limit;
    let proxy = ProxyParams {
        sweeps_per_us: cfg.proxy_sweeps_per_us,
        ..ProxyParams::default()
    };
    let schedule = |t: f64| AnnealSchedule::linear(t).with_time_scale(cfg.anneal_time_scale);

    // Closed-system evolution is deterministic, so each anneal time is
    // integrated once and every restart draws fresh reads from it.
    let evolve_secs = Mutex::new(vec![0.0; times.len()]);
    let states: Vec<Option<Statevector>> = if use_evolver {
        times
            .par_iter()
            .enumerate()
            .map(|(j, &t)| {
                let started = Instant::now();
                let s = schedule(t);
                s.validate()?;
                let state = evolve_schedule(g, &s, s.default_dt(cfg.anneal_max_dt), cfg.anneal_evolver_limit)?;
                evolve_secs.lock().unwrap()[j] = started.elapsed().as_secs_f64();
                Ok(Some(state))
            })
            .collect::<Result<_>>()?
    } else {
        vec![None; times.len()]
    };
    let evolve_secs = evolve_secs.into_inner().unwrap();

    let cells: Vec<(usize, usize)> = (1..=cfg.max_restarts)
        .flat_map(|r| (0..times.len()).map(move |j| (r, j)))
        .collect();
    let sampled: Vec<(SampleSet, u64, f64)> = cells
        .par_iter()
        .map(|&(r, j)| {
            let started = Instant::now();
            let seed = derive_seed(restart_seed(cfg, size, k, r), &[j as u64]);
            let samples = match &states[j] {
                Some(state) => sample(state, cfg.num_shots, seed),
                None => classical_proxy_sample(g, times[j], cfg.num_shots, seed, &proxy)?,
            };
            Ok((samples, seed, started.elapsed().as_secs_f64() + evolve_secs[j]))
        })
        .collect::<Result<_>>()?;

    let histograms: Vec<CutHistogram> = sampled
        .iter()
        .map(|(s, _, _)| CutHistogram::from_samples(s, g))
        .collect::<Result<_>>()?;
    let (optimal, exact) = match g.optimal_cut_size() {
        Some(c) => (c, true),
        None => {
            let best_sampled = histograms.iter().filter_map(|h| h.max_cut()).max().unwrap_or(0);
            let longest = times.iter().copied().fold(0.0, f64::max);
            let reference = classical_proxy_sample(g, 4.0 * longest, 64, derive_seed(cfg.seed, &[TAG_REFERENCE, size as u64, k as u64]), &proxy)?;
            let best_reference = reference.counts().keys().map(|b| g.cut_size(b)).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0);
            log::info!("size {size}: no exact optimum; using heuristic reference cut {}", best_sampled.max(best_reference));
            (best_sampled.max(best_reference), false)
        }
    };
    if optimal == 0 {
        return Err(Error::DegenerateInstance("optimal cut is 0".into()));
    }

    let backend = if use_evolver { Backend::Evolver } else { Backend::Proxy };
    let mut summary = Vec::new();
    let mut cell = 0;
    for r in 1..=cfg.max_restarts {
        let mut acc = TimingAccumulator::new();
        let mut records = Vec::new();
        for (j, &t) in times.iter().enumerate() {
            let (_, seed, secs) = &sampled[cell];
            let hist = histograms[cell].clone();
            cell += 1;
            let (quality, value) = score(cfg, &hist, optimal)?;
            let rec = IterationRecord {
                solver: Solver::Qa,
                size,
                instance: k,
                restart: r,
                iteration: j + 1,
                anneal_time_us: Some(t),
                params: None,
                shots: cfg.num_shots,
                backend,
                optimal_cut: optimal,
                optimal_exact: exact,
                objective_value: value,
                quality,
                timing: acc.push(annealing_timing(&ctx.profile, cfg.num_shots, t)),
                seed: *seed,
                cut_histogram: hist,
            };
            out.lines.push(MetricLine::Iteration(Box::new(rec.clone())));
            out.wallclock.push(WallclockLine {
                size,
                instance: k,
                restart: r,
                iteration: j + 1,
                seconds: *secs,
            });
            records.push(rec);
        }
        summary.push((records, true));
    }
    summarize(g, k, &summary, out);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_qaoa() -> BenchmarkConfig {
        BenchmarkConfig {
            sizes: SizeRange { min: 4, max: 6, step: 2 },
            max_iterations: 8,
            num_shots: 200,
            ..Default::default()
        }
    }

    #[test]
    fn qaoa_record_counts_follow_loop_structure() {
        let cfg = BenchmarkConfig {
            max_restarts: 2,
            ..small_qaoa()
        };
        let out = run_qaoa_benchmark(&cfg).unwrap();
        for n in [4, 6] {
            for r in 1..=2 {
                let recs: Vec<_> = out.iterations().filter(|x| x.size == n && x.restart == r).collect();
                assert!(!recs.is_empty() && recs.len() <= 8);
                let iters: Vec<usize> = recs.iter().map(|x| x.iteration).collect();
                assert_eq!(iters, (1..=recs.len()).collect::<Vec<_>>());
                assert!(recs.windows(2).all(|w| w[1].timing.cum_quantum > w[0].timing.cum_quantum));
            }
        }
        assert_eq!(out.groups().count(), 2);
        assert!(matches!(out.lines[0], MetricLine::Header { .. }));
        assert_eq!(out.wallclock.len(), out.iterations().count());
    }

    #[test]
    fn group_reports_best_restart() {
        let cfg = BenchmarkConfig {
            max_restarts: 4,
            sizes: SizeRange { min: 6, max: 6, step: 2 },
            ..small_qaoa()
        };
        let out = execute(&cfg).unwrap();
        let restarts: Vec<&RestartRecord> = out
            .lines
            .iter()
            .filter_map(|l| match l {
                MetricLine::Restart(r) => Some(r),
                _ => None,
            })
            .collect();
        assert_eq!(restarts.len(), 4);
        let best = restarts.iter().map(|r| r.final_objective).fold(f64::MIN, f64::max);
        let group = out.groups().next().unwrap();
        let chosen = restarts.iter().find(|r| Some(r.restart) == group.best_restart).unwrap();
        assert_eq!(chosen.final_objective, best);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = small_qaoa();
        let a = serde_json::to_string(&execute(&cfg).unwrap().lines).unwrap();
        let b = serde_json::to_string(&execute(&cfg).unwrap().lines).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_group_records_error_and_continues() {
        let cfg = BenchmarkConfig {
            sizes: SizeRange { min: 5, max: 6, step: 1 },
            max_iterations: 2,
            num_shots: 10,
            ..Default::default()
        };
        let out = execute(&cfg).unwrap();
        let groups: Vec<_> = out.groups().collect();
        assert!(groups[0].error.is_some());
        assert!(groups[1].error.is_none());
        assert!(out.iterations().all(|r| r.size == 6));
    }

    #[test]
    fn qa_sweep_has_one_record_per_anneal_time() {
        let cfg = BenchmarkConfig {
            solver: Solver::Qa,
            sizes: SizeRange { min: 4, max: 4, step: 2 },
            anneal: AnnealRange { min: 1.0, max: 8.0, factor: 2.0 },
            num_shots: 100,
            ..Default::default()
        };
        let out = run_qa_benchmark(&cfg).unwrap();
        let times: Vec<f64> = out.iterations().map(|r| r.anneal_time_us.unwrap()).collect();
        assert_eq!(times, vec![1.0, 2.0, 4.0, 8.0]);
        assert!(out.iterations().all(|r| r.backend == Backend::Evolver));
        let m1 = BenchmarkConfig { method: 1, ..cfg };
        assert_eq!(execute(&m1).unwrap().iterations().count(), 1);
    }

    #[test]
    fn large_qa_uses_proxy_with_heuristic_reference() {
        let cfg = BenchmarkConfig {
            solver: Solver::Qa,
            sizes: SizeRange { min: 30, max: 30, step: 2 },
            anneal: AnnealRange { min: 1.0, max: 4.0, factor: 2.0 },
            num_shots: 20,
            ..Default::default()
        };
        let out = execute(&cfg).unwrap();
        assert_eq!(out.iterations().count(), 3);
        for r in out.iterations() {
            assert_eq!(r.backend, Backend::Proxy);
            assert!(!r.optimal_exact);
            assert!(r.quality.best_measurement_ratio <= 1.0);
        }
    }

    #[test]
    fn method1_grid() {
        let cfg = BenchmarkConfig {
            method: 1,
            sizes: SizeRange { min: 6, max: 6, step: 2 },
            sweep_rounds: vec![1, 2, 3],
            sweep_shots: vec![100, 1000],
            ..Default::default()
        };
        let out = run_method1_qaoa(&cfg).unwrap();
        let recs: Vec<_> = out.fidelities().collect();
        assert_eq!(recs.len(), 6);
        for r in &recs {
            assert_eq!(r.resources.width, 6);
            assert!(r.fidelity.raw > 0.0 && r.fidelity.raw <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn writes_and_reads_run_directory() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = BenchmarkConfig {
            max_iterations: 3,
            ..small_qaoa()
        };
        let out = run_to_dir(&cfg, dir.path()).unwrap();
        let lines = read_metrics(dir.path()).unwrap();
        assert_eq!(lines, out.lines);
        assert_eq!(header_config(&lines), Some(&cfg));
        let manifest = read_manifest(dir.path()).unwrap();
        assert_eq!(manifest.instance_seeds.len(), 2);
        assert!(manifest.finished_unix >= manifest.started_unix);
        let g = GraphInstance::load(instance_path(dir.path(), 4, 0)).unwrap();
        assert_eq!(g.seed(), instance_seed(0, 4, 0));
    }
}
