//! Parameter-strategy analysis over QAOA runs: resource accounting,
//! per-instance virtual-best curves and resource-constrained parameter
//! recommendation from a train/test split of instances.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::svg::{num, SvgDoc};
use crate::report::{render, Format, Plot};
use crate::runner::{header_config, instance_seed, iterations, read_metrics, MetricLine, Solver};
use crate::seeds::stream_rng;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_GRID: &str = "log:1:1e6:25";

/// `restarts * iterations * shots`.
pub fn resource_of(restarts: u64, iterations: u64, shots: u64) -> u64 {
    restarts
        .checked_mul(iterations)
        .and_then(|v| v.checked_mul(shots))
        .expect("resource exceeds u64")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub restarts: u64,
    pub iterations: u64,
    pub shots: u64,
}

impl Triple {
    pub fn new(restarts: u64, iterations: u64, shots: u64) -> Self {
        Triple {
            restarts,
            iterations,
            shots,
        }
    }

    pub fn resource(&self) -> u64 {
        resource_of(self.restarts, self.iterations, self.shots)
    }

    /// Preference order among equal-quality triples: fewer shots, then fewer
    /// restarts, then fewer iterations.
    fn preference_key(&self) -> (u64, u64, u64) {
        (self.shots, self.restarts, self.iterations)
    }
}

/// A graph instance, identified across runs by its generator seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceKey {
    pub size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourcePoint {
    pub instance: InstanceKey,
    pub triple: Triple,
    pub resource: u64,
    pub quality: f64,
}

impl ResourcePoint {
    pub fn new(instance: InstanceKey, triple: Triple, quality: f64) -> Self {
        ResourcePoint {
            instance,
            triple,
            resource: triple.resource(),
            quality,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    #[default]
    Mean,
    Median,
}

impl Statistic {
    /// `None` on empty input.
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        if values.is_empty() {
            return None;
        }
        match self {
            Statistic::Mean => Some(values.iter().sum::<f64>() / values.len() as f64),
            Statistic::Median => {
                let mut v = values.to_vec();
                v.sort_by(f64::total_cmp);
                let m = v.len() / 2;
                Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
            }
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Statistic::Mean),
            "median" => Ok(Statistic::Median),
            other => Err(Error::parse("statistic", format!("unknown statistic `{other}`; expected mean or median"))),
        }
    }
}

/// Parses a resource grid: `log:A:B:N` (N log-spaced values), `lin:A:B:N`,
/// or a comma-separated list. Values are rounded to integers, deduplicated
/// and sorted.
pub fn parse_grid(spec: &str) -> Result<Vec<u64>> {
    let bad = |m: &str| Error::parse("grid", format!("`{spec}`: {m}"));
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad(&format!("`{s}` is not a number")))?;
        if v.is_finite() && v >= 1.0 {
            Ok(v)
        } else {
            Err(bad("grid values must be finite and at least 1"))
        }
    };
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let values: Vec<f64> = match parts.as_slice() {
        [kind @ ("log" | "lin"), a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| bad("point count must be a positive integer"))?;
            if n == 0 || b < a {
                return Err(bad("need at least one point and A <= B"));
            }
            (0..n)
                .map(|k| {
                    let t = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                    if *kind == "log" {
                        10f64.powf(a.log10() + t * (b.log10() - a.log10()))
                    } else {
                        a + t * (b - a)
                    }
                })
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(bad("expected log:A:B:N, lin:A:B:N or a comma-separated list")),
    };
    let grid: BTreeSet<u64> = values.into_iter().map(|v| v.round() as u64).collect();
    Ok(grid.into_iter().collect())
}

fn by_instance(points: &[ResourcePoint]) -> BTreeMap<InstanceKey, Vec<&ResourcePoint>> {
    let mut out: BTreeMap<InstanceKey, Vec<&ResourcePoint>> = BTreeMap::new();
    for p in points {
        out.entry(p.instance).or_default().push(p);
    }
    out
}

/// Best point with resource at most `r`; ties go to the preferred triple.
fn best_within<'a>(points: &[&'a ResourcePoint], r: u64) -> Option<&'a ResourcePoint> {
    points
        .iter()
        .copied()
        .filter(|p| p.resource <= r)
        .min_by(|a, b| b.quality.total_cmp(&a.quality).then(a.triple.preference_key().cmp(&b.triple.preference_key())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualBestCurve {
    pub instance: InstanceKey,
    /// Per grid value; `None` below the smallest observed resource.
    pub quality: Vec<Option<f64>>,
    pub triple: Vec<Option<Triple>>,
}

/// Per-instance upper envelope of quality over resource.
pub fn virtual_best(points: &[ResourcePoint], grid: &[u64]) -> Result<Vec<VirtualBestCurve>> {
    if grid.is_empty() {
        return Err(Error::Contract("virtual best needs a non-empty resource grid".into()));
    }
    if points.is_empty() {
        return Err(Error::Contract("virtual best needs at least one result point".into()));
    }
    let groups: Vec<(InstanceKey, Vec<&ResourcePoint>)> = by_instance(points).into_iter().collect();
    Ok(groups
        .par_iter()
        .map(|(key, pts)| {
            let best: Vec<Option<&ResourcePoint>> = grid.iter().map(|&r| best_within(pts, r)).collect();
            VirtualBestCurve {
                instance: *key,
                quality: best.iter().map(|b| b.map(|p| p.quality)).collect(),
                triple: best.iter().map(|b| b.map(|p| p.triple)).collect(),
            }
        })
        .collect())
}

/// Aggregates per-instance values at each grid index; defined only where
/// every instance is.
fn aggregate(curves: &[VirtualBestCurve], len: usize, stat: Statistic) -> Vec<Option<f64>> {
    (0..len)
        .map(|k| {
            let vals: Option<Vec<f64>> = curves.iter().map(|c| c.quality[k]).collect();
            vals.and_then(|v| stat.apply(&v))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub resource: u64,
    pub triple: Option<Triple>,
    pub train_quality: Option<f64>,
    /// Test quality at the recommended triple; `None` unless every test
    /// instance has a result for it.
    pub test_quality: Option<f64>,
    pub virtual_best_train: Option<f64>,
    pub virtual_best_test: Option<f64>,
    /// Per-parameter mean of the triples attaining each test instance's
    /// virtual best.
    pub virtual_best_params: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyAnalysis {
    pub statistic: Statistic,
    pub grid: Vec<u64>,
    pub train_instances: Vec<InstanceKey>,
    pub test_instances: Vec<InstanceKey>,
    pub recommendations: Vec<Recommendation>,
}

fn quality_table(points: &[ResourcePoint]) -> BTreeMap<Triple, BTreeMap<InstanceKey, f64>> {
    let mut out: BTreeMap<Triple, BTreeMap<InstanceKey, f64>> = BTreeMap::new();
    for p in points {
        let e = out.entry(p.triple).or_default().entry(p.instance).or_insert(f64::NEG_INFINITY);
        *e = e.max(p.quality);
    }
    out
}

/// For each grid value `r`, the triple with resource at most `r` that
/// maximizes the training statistic, evaluated on the test instances.
/// Candidate triples must have a result on every training instance.
pub fn recommend_params(train: &[ResourcePoint], test: &[ResourcePoint], grid: &[u64], stat: Statistic) -> Result<StrategyAnalysis> {
    let train_keys: BTreeSet<InstanceKey> = train.iter().map(|p| p.instance).collect();
    let test_keys: BTreeSet<InstanceKey> = test.iter().map(|p| p.instance).collect();
    if train_keys.is_empty() {
        return Err(Error::Contract("recommendation needs training results".into()));
    }
    if let Some(k) = train_keys.intersection(&test_keys).next() {
        return Err(Error::Contract(format!(
            "instance (size {}, seed {}) is in both the train and test sets",
            k.size, k.seed
        )));
    }
    let train_vb = virtual_best(train, grid)?;
    let test_vb = if test.is_empty() { Vec::new() } else { virtual_best(test, grid)? };
    let vb_train = aggregate(&train_vb, grid.len(), stat);
    let vb_test = if test_vb.is_empty() { vec![None; grid.len()] } else { aggregate(&test_vb, grid.len(), stat) };

    let train_table = quality_table(train);
    let test_table = quality_table(test);
    let candidates: Vec<(Triple, f64)> = train_table
        .iter()
        .filter(|(_, q)| q.len() == train_keys.len())
        .filter_map(|(t, q)| stat.apply(&q.values().copied().collect::<Vec<_>>()).map(|v| (*t, v)))
        .collect();

    let recommendations = grid
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let pick = candidates
                .iter()
                .filter(|(t, _)| t.resource() <= r)
                .min_by(|a, b| b.1.total_cmp(&a.1).then(a.0.preference_key().cmp(&b.0.preference_key())));
            let test_quality = pick.and_then(|(t, _)| {
                let q = test_table.get(t)?;
                if test_keys.is_empty() || q.len() != test_keys.len() {
                    return None;
                }
                stat.apply(&q.values().copied().collect::<Vec<_>>())
            });
            let vb_triples: Option<Vec<Triple>> = if test_vb.is_empty() { None } else { test_vb.iter().map(|c| c.triple[k]).collect() };
            let virtual_best_params = vb_triples.map(|ts| {
                let n = ts.len() as f64;
                [
                    ts.iter().map(|t| t.restarts as f64).sum::<f64>() / n,
                    ts.iter().map(|t| t.iterations as f64).sum::<f64>() / n,
                    ts.iter().map(|t| t.shots as f64).sum::<f64>() / n,
                ]
            });
            Recommendation {
                resource: r,
                triple: pick.map(|p| p.0),
                train_quality: pick.map(|p| p.1),
                test_quality,
                virtual_best_train: vb_train[k],
                virtual_best_test: vb_test[k],
                virtual_best_params,
            }
        })
        .collect();

    Ok(StrategyAnalysis {
        statistic: stat,
        grid: grid.to_vec(),
        train_instances: train_keys.into_iter().collect(),
        test_instances: test_keys.into_iter().collect(),
        recommendations,
    })
}

/// Seeded split of the distinct instances into train and test sets. Both
/// sets are non-empty whenever there are at least two instances.
pub fn split_instances(keys: &[InstanceKey], train_fraction: f64, seed: u64) -> Result<(Vec<InstanceKey>, Vec<InstanceKey>)> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::Config(format!("train fraction {train_fraction} must lie in (0, 1]")));
    }
    let mut keys: Vec<InstanceKey> = keys.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    keys.shuffle(&mut stream_rng(seed, 0));
    let n = keys.len();
    let mut n_train = (train_fraction * n as f64).round() as usize;
    if n >= 2 {
        n_train = n_train.clamp(1, n - 1);
    } else {
        n_train = n;
    }
    let test = keys.split_off(n_train);
    keys.sort();
    let mut test = test;
    test.sort();
    Ok((keys, test))
}

/// Points of one QAOA run: for every `r <= max_restarts` and
/// `i <= max_iterations`, the best objective value over the first `r`
/// restarts truncated to their first `i` executions.
pub fn points_from_run(lines: &[MetricLine]) -> Result<Vec<ResourcePoint>> {
    let cfg = header_config(lines).ok_or_else(|| Error::Contract("metrics lack a header line".into()))?;
    if cfg.solver != Solver::Qaoa || cfg.method != 2 {
        return Err(Error::Config("strategy analysis needs method-2 QAOA runs".into()));
    }
    // (size, instance) -> restart -> objective per iteration
    let mut table: BTreeMap<(usize, usize), BTreeMap<usize, BTreeMap<usize, f64>>> = BTreeMap::new();
    for r in iterations(lines) {
        table
            .entry((r.size, r.instance))
            .or_default()
            .entry(r.restart)
            .or_default()
            .insert(r.iteration, r.objective_value);
    }
    let max_r = cfg.max_restarts as u64;
    let max_i = cfg.max_iterations as u64;
    let mut points = Vec::new();
    for ((size, k), restarts) in table {
        let key = InstanceKey {
            size,
            seed: instance_seed(cfg.seed, size, k),
        };
        // prefix[restart][i-1] = best objective within the first i executions
        let prefix: Vec<Vec<f64>> = (1..=max_r as usize)
            .map(|restart| {
                let vals = restarts.get(&restart);
                let mut best = f64::NEG_INFINITY;
                (1..=max_i as usize)
                    .map(|i| {
                        if let Some(v) = vals.and_then(|m| m.get(&i)) {
                            best = best.max(*v);
                        }
                        best
                    })
                    .collect()
            })
            .collect();
        for i in 1..=max_i {
            let mut best = f64::NEG_INFINITY;
            for r in 1..=max_r {
                best = best.max(prefix[(r - 1) as usize][(i - 1) as usize]);
                if best.is_finite() {
                    points.push(ResourcePoint::new(key, Triple::new(r, i, cfg.num_shots), best));
                }
            }
        }
    }
    Ok(points)
}

/// Quality-versus-resource curves: recommended test, virtual-best test and
/// virtual-best train.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PerformanceProfile<'a> {
    pub analysis: &'a StrategyAnalysis,
}

/// Recommended parameter values against resource, with the virtual-best
/// parameter means alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ParameterTraces<'a> {
    pub analysis: &'a StrategyAnalysis,
}

const LEFT: f64 = 70.0;
const PLOT_W: f64 = 600.0;
const PLOT_H: f64 = 300.0;
const TOP: f64 = 40.0;

/// Log-x line chart over the resource grid.
fn line_chart(title: &str, y_label: &str, grid: &[u64], series: &[(&str, &str, Vec<Option<f64>>)], log_y: bool) -> String {
    let mut d = SvgDoc::new(LEFT + PLOT_W + 160.0, TOP + PLOT_H + 60.0);
    d.text(LEFT + PLOT_W / 2.0, 20.0, 14.0, "middle", title);
    let lx = |r: u64| (r.max(1) as f64).log10();
    let (x_lo, x_hi) = match (grid.first(), grid.last()) {
        (Some(&a), Some(&b)) if b > a => (lx(a), lx(b)),
        (Some(&a), _) => (lx(a), lx(a) + 1.0),
        _ => (0.0, 1.0),
    };
    let ty = |v: f64| if log_y { v.max(1.0).log10() } else { v };
    let ys: Vec<f64> = series.iter().flat_map(|s| s.2.iter().flatten().map(|&v| ty(v))).collect();
    let y_lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let y_hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (y_lo, y_hi) = if ys.is_empty() {
        (0.0, 1.0)
    } else if y_hi > y_lo {
        (y_lo, y_hi)
    } else {
        (y_lo - 0.5, y_hi + 0.5)
    };
    let base = TOP + PLOT_H;
    let x_of = |r: u64| LEFT + PLOT_W * (lx(r) - x_lo) / (x_hi - x_lo);
    let y_of = |v: f64| base - PLOT_H * (ty(v) - y_lo) / (y_hi - y_lo);
    d.line(LEFT, TOP, LEFT, base, "#000000", 1.0);
    d.line(LEFT, base, LEFT + PLOT_W, base, "#000000", 1.0);
    for k in 0..=4 {
        let v = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let y = base - PLOT_H * k as f64 / 4.0;
        let label = if log_y { num(10f64.powf(v)) } else { num(v) };
        d.text(LEFT - 6.0, y + 3.0, 9.0, "end", &label);
    }
    for decade in (x_lo.floor() as i32)..=(x_hi.ceil() as i32) {
        let x = LEFT + PLOT_W * (decade as f64 - x_lo) / (x_hi - x_lo);
        if (LEFT..=LEFT + PLOT_W + 0.01).contains(&x) {
            d.line(x, base, x, base + 4.0, "#000000", 1.0);
            d.text(x, base + 16.0, 9.0, "middle", &format!("1e{decade}"));
        }
    }
    d.text(LEFT + PLOT_W / 2.0, base + 32.0, 11.0, "middle", "resource (restarts x iterations x shots)");
    d.text(LEFT - 40.0, TOP - 8.0, 11.0, "start", y_label);
    for (j, (name, color, vals)) in series.iter().enumerate() {
        // undefined grid values split the trace
        let mut run: Vec<(f64, f64)> = Vec::new();
        for (&r, v) in grid.iter().zip(vals) {
            match v {
                Some(v) => run.push((x_of(r), y_of(*v))),
                None => {
                    if run.len() > 1 {
                        d.polyline(&run, color);
                    }
                    run.clear();
                }
            }
        }
        if run.len() > 1 {
            d.polyline(&run, color);
        } else if let Some(&(x, y)) = run.first() {
            d.rect(x - 2.0, y - 2.0, 4.0, 4.0, color, None);
        }
        let ly = TOP + 14.0 * j as f64;
        d.line(LEFT + PLOT_W + 10.0, ly, LEFT + PLOT_W + 30.0, ly, color, 2.0);
        d.text(LEFT + PLOT_W + 34.0, ly + 3.0, 10.0, "start", name);
    }
    d.finish()
}

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Plot for PerformanceProfile<'_> {
    fn kind(&self) -> &'static str {
        "performance"
    }

    fn is_empty(&self) -> bool {
        self.analysis.recommendations.iter().all(|r| r.triple.is_none())
    }

    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .analysis
            .recommendations
            .iter()
            .map(|r| {
                vec![
                    r.resource.to_string(),
                    opt_cell(r.train_quality),
                    opt_cell(r.test_quality),
                    opt_cell(r.virtual_best_train),
                    opt_cell(r.virtual_best_test),
                ]
            })
            .collect();
        (
            vec!["resource", "recommended_train", "recommended_test", "virtual_best_train", "virtual_best_test"],
            rows,
        )
    }

    fn svg(&self) -> String {
        let recs = &self.analysis.recommendations;
        line_chart(
            "Quality vs resource",
            "quality",
            &self.analysis.grid,
            &[
                ("recommended (test)", "#3b528b", recs.iter().map(|r| r.test_quality).collect()),
                ("virtual best (test)", "#e7298a", recs.iter().map(|r| r.virtual_best_test).collect()),
                ("virtual best (train)", "#5ec962", recs.iter().map(|r| r.virtual_best_train).collect()),
            ],
            false,
        )
    }
}

impl Plot for ParameterTraces<'_> {
    fn kind(&self) -> &'static str {
        "parameters"
    }

    fn is_empty(&self) -> bool {
        self.analysis.recommendations.iter().all(|r| r.triple.is_none())
    }

    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .analysis
            .recommendations
            .iter()
            .map(|r| {
                let vb = r.virtual_best_params;
                vec![
                    r.resource.to_string(),
                    opt_cell(r.triple.map(|t| t.restarts)),
                    opt_cell(r.triple.map(|t| t.iterations)),
                    opt_cell(r.triple.map(|t| t.shots)),
                    opt_cell(vb.map(|v| v[0])),
                    opt_cell(vb.map(|v| v[1])),
                    opt_cell(vb.map(|v| v[2])),
                ]
            })
            .collect();
        (
            vec![
                "resource",
                "restarts",
                "iterations",
                "shots",
                "virtual_best_restarts",
                "virtual_best_iterations",
                "virtual_best_shots",
            ],
            rows,
        )
    }

    fn svg(&self) -> String {
        let recs = &self.analysis.recommendations;
        let field = |f: fn(&Triple) -> u64| recs.iter().map(|r| r.triple.as_ref().map(|t| f(t) as f64)).collect();
        let vb = |k: usize| recs.iter().map(|r| r.virtual_best_params.map(|v| v[k])).collect();
        line_chart(
            "Recommended parameters vs resource",
            "value (log)",
            &self.analysis.grid,
            &[
                ("restarts", "#440154", field(|t| t.restarts)),
                ("iterations", "#21918c", field(|t| t.iterations)),
                ("shots", "#fde725", field(|t| t.shots)),
                ("restarts (vb)", "#8c6bb1", vb(0)),
                ("iterations (vb)", "#66c2a4", vb(1)),
                ("shots (vb)", "#fe9929", vb(2)),
            ],
            true,
        )
    }
}

#[derive(Debug, Clone)]
pub struct StrategyOptions {
    pub train_fraction: f64,
    pub seed: u64,
    pub grid: Vec<u64>,
    pub statistic: Statistic,
    pub formats: Vec<Format>,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            train_fraction: DEFAULT_TRAIN_FRACTION,
            seed: 0,
            grid: parse_grid(DEFAULT_GRID).expect("default grid parses"),
            statistic: Statistic::Mean,
            formats: vec![Format::Svg, Format::Json],
        }
    }
}

/// Full analysis over a set of run directories.
pub fn analyze_runs(run_dirs: &[PathBuf], opts: &StrategyOptions) -> Result<StrategyAnalysis> {
    let per_run: Vec<Vec<ResourcePoint>> = run_dirs
        .par_iter()
        .map(|dir| read_metrics(dir).and_then(|lines| points_from_run(&lines)))
        .collect::<Result<_>>()?;
    let points: Vec<ResourcePoint> = per_run.into_iter().flatten().collect();
    let keys: Vec<InstanceKey> = points.iter().map(|p| p.instance).collect();
    let (train_keys, _) = split_instances(&keys, opts.train_fraction, opts.seed)?;
    let train_set: BTreeSet<InstanceKey> = train_keys.into_iter().collect();
    let (train, test): (Vec<ResourcePoint>, Vec<ResourcePoint>) = points.into_iter().partition(|p| train_set.contains(&p.instance));
    recommend_params(&train, &test, &opts.grid, opts.statistic)
}

/// Writes the performance profile and the parameter traces into `out_dir`.
pub fn write_strategy(analysis: &StrategyAnalysis, out_dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in formats {
        let perf = out_dir.join(format!("performance.{}", f.extension()));
        render(&PerformanceProfile { analysis }, *f, &perf)?;
        let params = out_dir.join(format!("parameters.{}", f.extension()));
        render(&ParameterTraces { analysis }, *f, &params)?;
        written.extend([perf, params]);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(seed: u64) -> InstanceKey {
        InstanceKey { size: 8, seed }
    }

    #[test]
    fn resource_arithmetic() {
        assert_eq!(resource_of(10, 30, 50), 15_000);
        assert_eq!(resource_of(1, 1, 1), 1);
        assert_eq!(resource_of(1, 30, 1000), 30_000);
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("log:1:1e6:25").unwrap();
        assert_eq!(g.first(), Some(&1));
        assert_eq!(g.last(), Some(&1_000_000));
        assert_eq!(g.len(), 25);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(parse_grid("lin:10:50:5").unwrap(), vec![10, 20, 30, 40, 50]);
        assert_eq!(parse_grid("100,10,10").unwrap(), vec![10, 100]);
        for bad in ["log:1:10", "log:10:1:5", "log:0:10:5", "lin:1:5:0", "x"] {
            assert!(parse_grid(bad).unwrap_err().is_config(), "{bad}");
        }
    }

    #[test]
    fn single_point_is_a_step() {
        let p = ResourcePoint::new(key(1), Triple::new(1, 10, 10), 0.7);
        let vb = virtual_best(&[p], &[1, 99, 100, 1000]).unwrap();
        assert_eq!(vb[0].quality, vec![None, None, Some(0.7), Some(0.7)]);
        assert!(virtual_best(&[p], &[]).is_err());
    }

    #[test]
    fn one_triple_is_recommended_wherever_feasible() {
        let t = Triple::new(2, 5, 10);
        let train = [ResourcePoint::new(key(1), t, 0.8)];
        let test = [ResourcePoint::new(key(2), t, 0.6)];
        let a = recommend_params(&train, &test, &[50, 100, 1000], Statistic::Mean).unwrap();
        assert_eq!(a.recommendations[0].triple, None);
        assert_eq!(a.recommendations[1].triple, Some(t));
        assert_eq!(a.recommendations[2].test_quality, Some(0.6));
        assert!(recommend_params(&train, &train, &[100], Statistic::Mean).is_err());
    }

    #[test]
    fn ties_prefer_fewer_shots_then_restarts() {
        let pts: Vec<ResourcePoint> = [Triple::new(1, 10, 100), Triple::new(10, 10, 10), Triple::new(2, 50, 10)]
            .into_iter()
            .map(|t| ResourcePoint::new(key(1), t, 0.9))
            .collect();
        let a = recommend_params(&pts, &[], &[1000], Statistic::Mean).unwrap();
        assert_eq!(a.recommendations[0].triple, Some(Triple::new(2, 50, 10)));
    }

    #[test]
    fn statistics() {
        assert_eq!(Statistic::Mean.apply(&[1.0, 2.0, 6.0]), Some(3.0));
        assert_eq!(Statistic::Median.apply(&[6.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(Statistic::Median.apply(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(Statistic::Mean.apply(&[]), None);
    }

    #[test]
    fn split_is_seeded_and_disjoint() {
        let keys: Vec<InstanceKey> = (0..10).map(key).collect();
        let (a, b) = split_instances(&keys, 0.8, 3).unwrap();
        assert_eq!((a.len(), b.len()), (8, 2));
        assert_eq!(split_instances(&keys, 0.8, 3).unwrap(), (a.clone(), b.clone()));
        assert!(a.iter().all(|k| !b.contains(k)));
        let (a, b) = split_instances(&keys[..2], 1.0, 0).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        assert!(split_instances(&keys, 0.0, 0).is_err());
    }

    #[test]
    fn points_from_a_real_run() {
        let cfg = crate::runner::BenchmarkConfig {
            sizes: crate::runner::SizeRange::parse("4").unwrap(),
            max_restarts: 2,
            max_iterations: 4,
            num_shots: 50,
            ..Default::default()
        };
        let out = crate::runner::execute(&cfg).unwrap();
        let pts = points_from_run(&out.lines).unwrap();
        assert_eq!(pts.len(), 8);
        let at = |r, i| pts.iter().find(|p| p.triple == Triple::new(r, i, 50)).unwrap().quality;
        assert!(at(2, 4) >= at(1, 4) && at(1, 4) >= at(1, 1));
        let group = out.groups().next().unwrap();
        let best = crate::report::final_records(&out.iterations().cloned().collect::<Vec<_>>())[0].objective_value;
        assert_eq!(at(2, 4), best);
        assert!(group.quality.is_some());
    }

    fn arb_points() -> impl Strategy<Value = Vec<ResourcePoint>> {
        prop::collection::vec((0u64..6, 1u64..5, 1u64..8, 1u64..200, 0.0f64..1.0), 1..60).prop_map(|v| {
            v.into_iter()
                .map(|(s, r, i, shots, q)| ResourcePoint::new(key(s), Triple::new(r, i, shots), q))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn virtual_best_is_monotone(points in arb_points()) {
            let grid = parse_grid("log:1:1e4:30").unwrap();
            for c in virtual_best(&points, &grid).unwrap() {
                let defined: Vec<f64> = c.quality.iter().flatten().copied().collect();
                prop_assert!(defined.windows(2).all(|w| w[0] <= w[1]));
                // once defined, stays defined
                let first = c.quality.iter().position(Option::is_some).unwrap_or(grid.len());
                prop_assert!(c.quality[first..].iter().all(Option::is_some));
            }
        }

        #[test]
        fn recommendation_never_beats_virtual_best(points in arb_points(), stat in prop_oneof![Just(Statistic::Mean), Just(Statistic::Median)]) {
            let (train, test): (Vec<_>, Vec<_>) = points.into_iter().partition(|p| p.instance.seed % 2 == 0);
            prop_assume!(!train.is_empty());
            let grid = parse_grid("log:1:1e4:30").unwrap();
            let a = recommend_params(&train, &test, &grid, stat).unwrap();
            for r in &a.recommendations {
                if let (Some(t), Some(v)) = (r.test_quality, r.virtual_best_test) {
                    prop_assert!(t <= v);
                }
                if let (Some(t), Some(v)) = (r.train_quality, r.virtual_best_train) {
                    prop_assert!(t <= v);
                }
                if let Some(t) = r.triple {
                    prop_assert!(t.resource() <= r.resource);
                }
            }
        }
    }

    #[test]
    fn renders_both_plots() {
        let t = Triple::new(1, 2, 3);
        let a = recommend_params(
            &[ResourcePoint::new(key(1), t, 0.5)],
            &[ResourcePoint::new(key(2), t, 0.4)],
            &[1, 10, 100],
            Statistic::Mean,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_strategy(&a, dir.path(), &[Format::Svg, Format::Csv, Format::Json]).unwrap();
        assert_eq!(files.len(), 6);
        assert!(files.iter().all(|f| f.exists()));
    }
}
