//! Plot data for the five report families and their SVG, CSV and JSON
//! renderings.
//!
//! Every builder is a pure function of metric records, and every renderer
//! writes numbers in a fixed format, so re-running a report over the same run
//! directory reproduces its files byte for byte.

pub mod svg;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::graphs::GraphInstance;
use crate::hamiltonian::diagonal_cost_table;
use crate::metrics::{distribution_stats, optimality_gap, Ratio};
use crate::runner::{instance_path, iterations, read_metrics, FidelityRecord, IterationRecord, MetricLine, Solver};
use crate::seeds::stream_rng;
use crate::SCHEMA_VERSION;
use svg::{colormap, num, SvgDoc};

/// Color scale for QAOA ratios.
pub const QAOA_COLOR_RANGE: (f64, f64) = (0.0, 1.0);
/// Color scale for QA ratios, which cluster near 1.
pub const QA_COLOR_RANGE: (f64, f64) = (0.9, 1.0);

pub const VIOLIN_BINS: usize = 50;
const SAMPLED_BASELINE_SHOTS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeField {
    Quantum,
    Elapsed,
    Classical,
}

impl TimeField {
    pub const ALL: [TimeField; 3] = [TimeField::Quantum, TimeField::Elapsed, TimeField::Classical];

    pub fn name(self) -> &'static str {
        match self {
            TimeField::Quantum => "quantum",
            TimeField::Elapsed => "elapsed",
            TimeField::Classical => "classical",
        }
    }

    fn of(self, r: &IterationRecord) -> f64 {
        match self {
            TimeField::Quantum => r.timing.t_quantum,
            TimeField::Elapsed => r.timing.t_elapsed_quantum,
            TimeField::Classical => r.timing.t_classical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Stacked,
    Overlaid,
}

/// Records grouped as `(size, instance) -> restart -> records`, each list in
/// iteration order.
type Series<'a> = BTreeMap<(usize, usize), BTreeMap<usize, Vec<&'a IterationRecord>>>;

fn series(records: &[IterationRecord]) -> Series<'_> {
    let mut out: Series = BTreeMap::new();
    for r in records {
        out.entry((r.size, r.instance)).or_default().entry(r.restart).or_default().push(r);
    }
    for restarts in out.values_mut() {
        for recs in restarts.values_mut() {
            recs.sort_by_key(|r| r.iteration);
        }
    }
    out
}

/// Index of the largest objective; the earliest wins ties.
fn best_of<'a>(recs: impl IntoIterator<Item = &'a IterationRecord>) -> Option<&'a IterationRecord> {
    recs.into_iter().fold(None, |best: Option<&IterationRecord>, r| match best {
        Some(b) if b.objective_value >= r.objective_value => Some(b),
        _ => Some(r),
    })
}

/// Per `(size, instance)`: the best restart's records, chosen by the
/// restart's best objective value.
pub fn best_series(records: &[IterationRecord]) -> Vec<((usize, usize), usize, Vec<&IterationRecord>)> {
    series(records)
        .into_iter()
        .filter_map(|(key, restarts)| {
            let mut best: Option<(usize, f64)> = None;
            for (&r, recs) in &restarts {
                if let Some(b) = best_of(recs.iter().copied()) {
                    if best.is_none_or(|(_, v)| b.objective_value > v) {
                        best = Some((r, b.objective_value));
                    }
                }
            }
            best.map(|(r, _)| (key, r, restarts[&r].clone()))
        })
        .collect()
}

/// Per `(size, instance)`: the final output, i.e. the best-objective record
/// of the best restart.
pub fn final_records(records: &[IterationRecord]) -> Vec<&IterationRecord> {
    best_series(records)
        .into_iter()
        .filter_map(|(_, _, recs)| best_of(recs))
        .collect()
}

fn single_solver(records: &[IterationRecord]) -> Result<Option<Solver>> {
    let mut solver = None;
    for r in records {
        match solver {
            None => solver = Some(r.solver),
            Some(s) if s != r.solver => return Err(Error::MixedSolvers),
            _ => {}
        }
    }
    Ok(solver)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaRect {
    pub iteration: usize,
    pub anneal_time_us: Option<f64>,
    pub x_start: f64,
    pub width: f64,
    pub color_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaRow {
    pub size: usize,
    pub instance: usize,
    pub restart: usize,
    pub rects: Vec<AreaRect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaPlotData {
    pub solver: Option<Solver>,
    pub layout: Layout,
    pub time_field: TimeField,
    pub ratio: Ratio,
    pub color_range: (f64, f64),
    pub rows: Vec<AreaRow>,
}

/// One row per `(size, instance)` from its best restart. QAOA rows stack
/// rectangles end to end; QA rows overlay them from 0.
pub fn area_plot_data(records: &[IterationRecord], time_field: TimeField, ratio: Ratio) -> Result<AreaPlotData> {
    let solver = single_solver(records)?;
    let layout = match solver {
        Some(Solver::Qa) => Layout::Overlaid,
        _ => Layout::Stacked,
    };
    let rows = best_series(records)
        .into_iter()
        .map(|((size, instance), restart, recs)| {
            let mut x = 0.0;
            let rects = recs
                .iter()
                .map(|r| {
                    let width = time_field.of(r).max(0.0);
                    let rect = AreaRect {
                        iteration: r.iteration,
                        anneal_time_us: r.anneal_time_us,
                        x_start: if layout == Layout::Stacked { x } else { 0.0 },
                        width,
                        color_value: r.quality.ratio(ratio).clamp(0.0, 1.0),
                    };
                    x += width;
                    rect
                })
                .collect();
            AreaRow {
                size,
                instance,
                restart,
                rects,
            }
        })
        .collect();
    Ok(AreaPlotData {
        solver,
        layout,
        time_field,
        ratio,
        color_range: match solver {
            Some(Solver::Qa) => QA_COLOR_RANGE,
            _ => QAOA_COLOR_RANGE,
        },
        rows,
    })
}

/// Optimality gaps in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBars {
    pub ar: f64,
    pub cvar: f64,
    pub gibbs: f64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptgapEntry {
    pub size: usize,
    pub instance: usize,
    pub shots: u64,
    pub gaps: GapBars,
    /// Quartiles of the per-shot normalized gap `1 - cut / optimal`.
    pub quartiles: [f64; 3],
    /// Shot counts of the normalized gap in equal bins over `[0, 1]`.
    pub violin: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptgapSummary {
    pub entries: Vec<OptgapEntry>,
}

pub fn optgap_summary_data(records: &[IterationRecord]) -> Result<OptgapSummary> {
    let mut entries = Vec::new();
    for r in final_records(records) {
        let dist = distribution_stats(&r.cut_histogram, r.optimal_cut)?;
        let mut violin = vec![0u64; VIOLIN_BINS];
        for &(gap, c) in &dist.values {
            violin[((gap * VIOLIN_BINS as f64).floor() as usize).min(VIOLIN_BINS - 1)] += c;
        }
        let q = &r.quality;
        entries.push(OptgapEntry {
            size: r.size,
            instance: r.instance,
            shots: r.cut_histogram.total(),
            gaps: GapBars {
                ar: optimality_gap(q.approximation_ratio),
                cvar: optimality_gap(q.cvar_ratio),
                gibbs: optimality_gap(q.gibbs_ratio),
                best: optimality_gap(q.best_measurement_ratio),
            },
            quartiles: dist.quartiles,
            violin,
        });
    }
    Ok(OptgapSummary { entries })
}

/// Cut positions `ratio * optimal` of the four metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricMarkers {
    pub ar: f64,
    pub cvar: f64,
    pub gibbs: f64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutsizeData {
    pub size: usize,
    pub instance: usize,
    pub optimal_cut: u64,
    pub shots: u64,
    /// `(cut, shot count)`.
    pub empirical: Vec<(u64, u64)>,
    /// `(cut, probability)` under uniformly random bitstrings.
    pub baseline: Vec<(u64, f64)>,
    /// False when the baseline was estimated by sampling.
    pub baseline_exact: bool,
    pub markers: MetricMarkers,
}

/// Uniform-random cut-size law: exact from the cost table up to
/// `exact_limit` nodes, sampled beyond.
pub fn random_cut_baseline(g: &GraphInstance, exact_limit: usize) -> Result<(Vec<(u64, f64)>, bool)> {
    if g.num_nodes() <= exact_limit {
        let counts = diagonal_cost_table(g, exact_limit)?.cut_counts();
        let total = (1u64 << g.num_nodes()) as f64;
        let law = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(cut, &c)| (cut as u64, c as f64 / total))
            .collect();
        return Ok((law, true));
    }
    let mut rng = stream_rng(g.seed(), 0);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..SAMPLED_BASELINE_SHOTS {
        let bits: Vec<bool> = (0..g.num_nodes()).map(|_| rng.random()).collect();
        *counts.entry(g.cut_size(&Bitstring::from_bools(&bits))?).or_insert(0) += 1;
    }
    let law = counts
        .into_iter()
        .map(|(cut, c)| (cut, c as f64 / SAMPLED_BASELINE_SHOTS as f64))
        .collect();
    Ok((law, false))
}

pub fn cutsize_distribution_data(record: &IterationRecord, g: &GraphInstance, exact_limit: usize) -> Result<CutsizeData> {
    if g.num_nodes() != record.size {
        return Err(Error::Contract(format!(
            "record is for size {} but the instance has {} nodes",
            record.size,
            g.num_nodes()
        )));
    }
    let (baseline, baseline_exact) = random_cut_baseline(g, exact_limit)?;
    let opt = record.optimal_cut as f64;
    let q = &record.quality;
    Ok(CutsizeData {
        size: record.size,
        instance: record.instance,
        optimal_cut: record.optimal_cut,
        shots: record.cut_histogram.total(),
        empirical: record.cut_histogram.iter().collect(),
        baseline,
        baseline_exact,
        markers: MetricMarkers {
            ar: q.approximation_ratio * opt,
            cvar: q.cvar_ratio * opt,
            gibbs: q.gibbs_ratio * opt,
            best: q.best_measurement_ratio * opt,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumetricCell {
    pub width: usize,
    pub depth: usize,
    pub mean_normalized_fidelity: f64,
    pub count: usize,
}

/// Square region of widths and depths up to `log2(QV)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QvBackdrop {
    pub quantum_volume: u64,
    pub max_width: usize,
    pub max_depth: usize,
}

impl QvBackdrop {
    pub fn new(quantum_volume: u64) -> Self {
        let side = if quantum_volume == 0 { 0 } else { quantum_volume.ilog2() as usize };
        QvBackdrop {
            quantum_volume,
            max_width: side,
            max_depth: side,
        }
    }

    pub fn covers(&self, width: usize, depth: usize) -> bool {
        width <= self.max_width && depth <= self.max_depth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumetricData {
    pub cells: Vec<VolumetricCell>,
    pub backdrop: Option<QvBackdrop>,
}

pub fn volumetric_data(records: &[FidelityRecord], quantum_volume: Option<u64>) -> VolumetricData {
    let mut acc: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = acc.entry((r.resources.width, r.resources.algorithmic_depth)).or_insert((0.0, 0));
        e.0 += r.fidelity.normalized;
        e.1 += 1;
    }
    VolumetricData {
        cells: acc
            .into_iter()
            .map(|((width, depth), (sum, count))| VolumetricCell {
                width,
                depth,
                mean_normalized_fidelity: (sum / count as f64).clamp(0.0, 1.0),
                count,
            })
            .collect(),
        backdrop: quantum_volume.map(QvBackdrop::new),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Area,
    Optgap,
    Cutsize,
    Volumetric,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [PlotKind::Area, PlotKind::Optgap, PlotKind::Cutsize, PlotKind::Volumetric];
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "area" => Ok(PlotKind::Area),
            "optgap" => Ok(PlotKind::Optgap),
            "cutsize" => Ok(PlotKind::Cutsize),
            "volumetric" => Ok(PlotKind::Volumetric),
            other => Err(Error::parse("plots", format!("unknown plot `{other}`; expected area, optgap, cutsize or volumetric"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svg" => Ok(Format::Svg),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::parse("format", format!("unknown format `{other}`; expected svg, csv or json"))),
        }
    }
}

/// A renderable plot.
pub trait Plot: Serialize {
    fn kind(&self) -> &'static str;
    fn is_empty(&self) -> bool;
    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>);
    fn svg(&self) -> String;
}

fn cell<T: Display>(v: T) -> String {
    v.to_string()
}

fn opt_cell<T: Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct Document<'a, P> {
    schema_version: u32,
    plot: &'a str,
    data: &'a P,
}

/// Writes `plot` to `path` in `format`. Empty plots still produce a valid
/// document.
pub fn render<P: Plot>(plot: &P, format: Format, path: &Path) -> Result<()> {
    if plot.is_empty() {
        log::warn!("{}: no records to plot; writing an empty {} document", path.display(), plot.kind());
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    match format {
        Format::Svg => std::fs::write(path, plot.svg()).map_err(|e| Error::io(path, e)),
        Format::Json => {
            let doc = Document {
                schema_version: SCHEMA_VERSION,
                plot: plot.kind(),
                data: plot,
            };
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::json(path, e))?;
            std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
        }
        Format::Csv => {
            let csv_err = |source| Error::Csv {
                path: path.to_path_buf(),
                source,
            };
            let (header, rows) = plot.csv();
            let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
            w.write_record(&header).map_err(csv_err)?;
            for row in rows {
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
    }
}

const LEFT: f64 = 70.0;
const PLOT_W: f64 = 640.0;
const TOP: f64 = 40.0;

impl Plot for AreaPlotData {
    fn kind(&self) -> &'static str {
        "area"
    }

    fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .rows
            .iter()
            .flat_map(|row| {
                row.rects.iter().map(move |r| {
                    vec![
                        cell(row.size),
                        cell(row.instance),
                        cell(row.restart),
                        cell(r.iteration),
                        opt_cell(r.anneal_time_us),
                        cell(r.x_start),
                        cell(r.width),
                        cell(r.color_value),
                    ]
                })
            })
            .collect();
        (
            vec!["size", "instance", "restart", "iteration", "anneal_time_us", "x_start", "width", "color_value"],
            rows,
        )
    }

    fn svg(&self) -> String {
        let row_h = 24.0;
        let height = TOP + row_h * self.rows.len().max(1) as f64 + 80.0;
        let mut d = SvgDoc::new(LEFT + PLOT_W + 30.0, height);
        let x_max = self
            .rows
            .iter()
            .flat_map(|r| r.rects.iter().map(|x| x.x_start + x.width))
            .fold(0.0, f64::max);
        let scale = if x_max > 0.0 { PLOT_W / x_max } else { 0.0 };
        let (lo, hi) = self.color_range;
        d.text(
            LEFT + PLOT_W / 2.0,
            20.0,
            14.0,
            "middle",
            &format!("Area plot: {} ratio vs cumulative {} time", self.ratio.name(), self.time_field.name()),
        );
        for (i, row) in self.rows.iter().enumerate() {
            let y = TOP + i as f64 * row_h;
            d.text(LEFT - 8.0, y + row_h * 0.65, 11.0, "end", &format!("n={}", row.size));
            // Overlaid rectangles go widest first so shorter executions stay visible.
            let mut rects: Vec<&AreaRect> = row.rects.iter().collect();
            if self.layout == Layout::Overlaid {
                rects.sort_by(|a, b| b.width.total_cmp(&a.width));
            }
            for r in rects {
                d.rect(
                    LEFT + r.x_start * scale,
                    y + 2.0,
                    r.width * scale,
                    row_h - 4.0,
                    &colormap(r.color_value, lo, hi),
                    Some("#ffffff"),
                );
            }
        }
        let axis_y = TOP + row_h * self.rows.len() as f64 + 4.0;
        d.line(LEFT, axis_y, LEFT + PLOT_W, axis_y, "#000000", 1.0);
        for k in 0..=4 {
            let x = LEFT + PLOT_W * k as f64 / 4.0;
            d.line(x, axis_y, x, axis_y + 4.0, "#000000", 1.0);
            d.text(x, axis_y + 16.0, 10.0, "middle", &num(x_max * k as f64 / 4.0));
        }
        d.text(LEFT + PLOT_W / 2.0, axis_y + 30.0, 11.0, "middle", "seconds");
        d.colorbar(LEFT, axis_y + 40.0, 200.0, lo, hi, self.ratio.name());
        d.finish()
    }
}

impl Plot for OptgapSummary {
    fn kind(&self) -> &'static str {
        "optgap"
    }

    fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .entries
            .iter()
            .map(|e| {
                let mut row = vec![
                    cell(e.size),
                    cell(e.instance),
                    cell(e.shots),
                    cell(e.gaps.ar),
                    cell(e.gaps.cvar),
                    cell(e.gaps.gibbs),
                    cell(e.gaps.best),
                    cell(e.quartiles[0]),
                    cell(e.quartiles[1]),
                    cell(e.quartiles[2]),
                ];
                row.push(e.violin.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
                row
            })
            .collect();
        (
            vec![
                "size", "instance", "shots", "gap_ar", "gap_cvar", "gap_gibbs", "gap_best", "q1", "q2", "q3", "violin",
            ],
            rows,
        )
    }

    fn svg(&self) -> String {
        let plot_h = 300.0;
        let group_w = if self.entries.is_empty() { PLOT_W } else { PLOT_W / self.entries.len() as f64 };
        let mut d = SvgDoc::new(LEFT + PLOT_W + 30.0, TOP + plot_h + 70.0);
        d.text(LEFT + PLOT_W / 2.0, 20.0, 14.0, "middle", "Optimality gaps (%) with per-shot gap distribution");
        let base = TOP + plot_h;
        let y_of = |pct: f64| base - plot_h * (pct / 100.0).clamp(0.0, 1.0);
        for k in 0..=4 {
            let pct = 25.0 * k as f64;
            d.line(LEFT - 4.0, y_of(pct), LEFT, y_of(pct), "#000000", 1.0);
            d.text(LEFT - 8.0, y_of(pct) + 3.0, 10.0, "end", &num(pct));
        }
        d.line(LEFT, TOP, LEFT, base, "#000000", 1.0);
        d.line(LEFT, base, LEFT + PLOT_W, base, "#000000", 1.0);
        let colors = ["#3b528b", "#21918c", "#5ec962", "#fde725"];
        for (i, e) in self.entries.iter().enumerate() {
            let x0 = LEFT + i as f64 * group_w;
            let bar_w = group_w * 0.12;
            let gaps = [e.gaps.ar, e.gaps.cvar, e.gaps.gibbs, e.gaps.best];
            for (j, g) in gaps.iter().enumerate() {
                let x = x0 + group_w * 0.05 + j as f64 * bar_w;
                d.rect(x, y_of(*g), bar_w * 0.9, base - y_of(*g), colors[j], None);
            }
            // half violin of the normalized per-shot gap, scaled to 100%
            let vx = x0 + group_w * 0.6;
            let peak = e.violin.iter().copied().max().unwrap_or(0).max(1) as f64;
            let bin_h = plot_h / VIOLIN_BINS as f64;
            for (b, &c) in e.violin.iter().enumerate() {
                if c > 0 {
                    let w = group_w * 0.35 * c as f64 / peak;
                    d.rect(vx, base - (b + 1) as f64 * bin_h, w, bin_h, "#e7298a", None);
                }
            }
            for q in e.quartiles {
                let y = y_of(q * 100.0);
                d.line(vx - 4.0, y, vx + group_w * 0.35, y, "#000000", 1.0);
            }
            d.text(x0 + group_w / 2.0, base + 16.0, 10.0, "middle", &format!("n={}", e.size));
        }
        for (j, name) in ["ar", "cvar", "gibbs", "best"].iter().enumerate() {
            let x = LEFT + j as f64 * 80.0;
            d.rect(x, base + 34.0, 10.0, 10.0, colors[j], None);
            d.text(x + 14.0, base + 43.0, 10.0, "start", name);
        }
        d.finish()
    }
}

impl Plot for CutsizeData {
    fn kind(&self) -> &'static str {
        "cutsize"
    }

    fn is_empty(&self) -> bool {
        self.shots == 0
    }

    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let emp: BTreeMap<u64, u64> = self.empirical.iter().copied().collect();
        let base: BTreeMap<u64, f64> = self.baseline.iter().copied().collect();
        let cuts: std::collections::BTreeSet<u64> = emp.keys().chain(base.keys()).copied().collect();
        let rows = cuts
            .into_iter()
            .map(|c| {
                vec![
                    cell(c),
                    cell(emp.get(&c).copied().unwrap_or(0)),
                    cell(emp.get(&c).copied().unwrap_or(0) as f64 / self.shots.max(1) as f64),
                    cell(base.get(&c).copied().unwrap_or(0.0)),
                ]
            })
            .collect();
        (vec!["cut", "count", "probability", "baseline_probability"], rows)
    }

    fn svg(&self) -> String {
        let plot_h = 260.0;
        let mut d = SvgDoc::new(LEFT + PLOT_W + 30.0, TOP + plot_h + 60.0);
        let title = format!(
            "Cut-size distribution, n={} (optimum {}){}",
            self.size,
            self.optimal_cut,
            if self.baseline_exact { "" } else { ", sampled baseline" }
        );
        d.text(LEFT + PLOT_W / 2.0, 20.0, 14.0, "middle", &title);
        let max_cut = self.optimal_cut.max(self.empirical.last().map(|e| e.0).unwrap_or(0)).max(1) as f64;
        let x_of = |c: f64| LEFT + PLOT_W * c / max_cut;
        let emp_p: Vec<(u64, f64)> = self.empirical.iter().map(|&(c, n)| (c, n as f64 / self.shots.max(1) as f64)).collect();
        let p_max = emp_p.iter().chain(&self.baseline).map(|e| e.1).fold(0.0, f64::max).max(1e-12);
        let base = TOP + plot_h;
        let y_of = |p: f64| base - plot_h * p / p_max;
        let bar_w = PLOT_W / (max_cut + 1.0) * 0.8;
        for &(c, p) in &emp_p {
            d.rect(x_of(c as f64) - bar_w / 2.0, y_of(p), bar_w, base - y_of(p), "#3b528b", None);
        }
        let pts: Vec<(f64, f64)> = self.baseline.iter().map(|&(c, p)| (x_of(c as f64), y_of(p))).collect();
        d.polyline(&pts, "#e7298a");
        let m = &self.markers;
        for (name, v, color) in [("ar", m.ar, "#000000"), ("cvar", m.cvar, "#21918c"), ("gibbs", m.gibbs, "#5ec962"), ("best", m.best, "#b8a200")] {
            d.line(x_of(v), TOP, x_of(v), base, color, 1.5);
            d.text(x_of(v) + 2.0, TOP + 10.0, 9.0, "start", name);
        }
        d.line(LEFT, base, LEFT + PLOT_W, base, "#000000", 1.0);
        for c in 0..=max_cut as u64 {
            if max_cut <= 40.0 || c % 5 == 0 {
                d.text(x_of(c as f64), base + 14.0, 9.0, "middle", &c.to_string());
            }
        }
        d.text(LEFT + PLOT_W / 2.0, base + 32.0, 11.0, "middle", "cut size");
        d.finish()
    }
}

impl Plot for VolumetricData {
    fn kind(&self) -> &'static str {
        "volumetric"
    }

    fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn csv(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .cells
            .iter()
            .map(|c| vec![cell(c.width), cell(c.depth), cell(c.mean_normalized_fidelity), cell(c.count)])
            .collect();
        (vec!["width", "depth", "mean_normalized_fidelity", "count"], rows)
    }

    fn svg(&self) -> String {
        let plot_h = 360.0;
        let mut d = SvgDoc::new(LEFT + PLOT_W + 30.0, TOP + plot_h + 80.0);
        d.text(LEFT + PLOT_W / 2.0, 20.0, 14.0, "middle", "Volumetric fidelity (width x depth)");
        let w_max = self.cells.iter().map(|c| c.width).chain(self.backdrop.map(|b| b.max_width)).max().unwrap_or(1).max(1) as f64 + 1.0;
        let d_max = self.cells.iter().map(|c| c.depth).chain(self.backdrop.map(|b| b.max_depth)).max().unwrap_or(1).max(1) as f64 + 1.0;
        let base = TOP + plot_h;
        let x_of = |w: f64| LEFT + PLOT_W * w / w_max;
        let y_of = |dep: f64| base - plot_h * dep / d_max;
        if let Some(b) = self.backdrop {
            d.rect(x_of(0.0), y_of(b.max_depth as f64 + 0.5), x_of(b.max_width as f64 + 0.5) - LEFT, base - y_of(b.max_depth as f64 + 0.5), "#bbbbbb", None);
        }
        let cw = (PLOT_W / w_max * 0.8).min(24.0);
        let ch = (plot_h / d_max * 0.8).clamp(4.0, 24.0);
        for c in &self.cells {
            d.rect(
                x_of(c.width as f64) - cw / 2.0,
                y_of(c.depth as f64) - ch / 2.0,
                cw,
                ch,
                &colormap(c.mean_normalized_fidelity, 0.0, 1.0),
                Some("#000000"),
            );
        }
        d.line(LEFT, TOP, LEFT, base, "#000000", 1.0);
        d.line(LEFT, base, LEFT + PLOT_W, base, "#000000", 1.0);
        d.text(LEFT + PLOT_W / 2.0, base + 30.0, 11.0, "middle", "circuit width (qubits)");
        d.text(LEFT - 40.0, TOP + plot_h / 2.0, 11.0, "middle", "depth");
        for k in 0..=4 {
            let w = w_max * k as f64 / 4.0;
            d.text(x_of(w), base + 14.0, 9.0, "middle", &num(w));
            let dep = d_max * k as f64 / 4.0;
            d.text(LEFT - 6.0, y_of(dep) + 3.0, 9.0, "end", &num(dep));
        }
        d.colorbar(LEFT, base + 42.0, 200.0, 0.0, 1.0, "normalized fidelity");
        d.finish()
    }
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub plots: Vec<PlotKind>,
    pub formats: Vec<Format>,
    /// Ratio that colors the area plots.
    pub ratio: Ratio,
    pub quantum_volume: Option<u64>,
    pub exact_baseline_limit: usize,
    pub qaoa_color_range: (f64, f64),
    pub qa_color_range: (f64, f64),
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            plots: PlotKind::ALL.to_vec(),
            formats: vec![Format::Svg, Format::Json],
            ratio: Ratio::Ar,
            quantum_volume: Some(32),
            exact_baseline_limit: 20,
            qaoa_color_range: QAOA_COLOR_RANGE,
            qa_color_range: QA_COLOR_RANGE,
        }
    }
}

fn emit<P: Plot>(plot: &P, stem: &str, opts: &ReportOptions, out_dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    for &f in &opts.formats {
        let path = out_dir.join(format!("{stem}.{}", f.extension()));
        render(plot, f, &path)?;
        written.push(path);
    }
    Ok(())
}

/// Renders the requested plots of one run directory into `out_dir`.
pub fn generate_report(run_dir: &Path, out_dir: &Path, opts: &ReportOptions) -> Result<Vec<PathBuf>> {
    let lines = read_metrics(run_dir)?;
    report_from_lines(&lines, run_dir, out_dir, opts)
}

pub fn report_from_lines(lines: &[MetricLine], run_dir: &Path, out_dir: &Path, opts: &ReportOptions) -> Result<Vec<PathBuf>> {
    let records: Vec<IterationRecord> = iterations(lines).cloned().collect();
    let fidelities: Vec<FidelityRecord> = lines
        .iter()
        .filter_map(|l| match l {
            MetricLine::Fidelity(f) => Some(f.as_ref().clone()),
            _ => None,
        })
        .collect();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut plots = opts.plots.clone();
    plots.sort();
    plots.dedup();
    for kind in plots {
        match kind {
            PlotKind::Area => {
                for t in TimeField::ALL {
                    let mut data = area_plot_data(&records, t, opts.ratio)?;
                    data.color_range = match data.solver {
                        Some(Solver::Qa) => opts.qa_color_range,
                        _ => opts.qaoa_color_range,
                    };
                    emit(&data, &format!("area_{}", t.name()), opts, out_dir, &mut written)?;
                }
            }
            PlotKind::Optgap => emit(&optgap_summary_data(&records)?, "optgap", opts, out_dir, &mut written)?,
            PlotKind::Cutsize => {
                let finals = final_records(&records);
                if finals.is_empty() {
                    log::warn!("no iteration records; skipping cut-size plots");
                }
                for r in finals {
                    let g = GraphInstance::load(instance_path(run_dir, r.size, r.instance))?;
                    let data = cutsize_distribution_data(r, &g, opts.exact_baseline_limit)?;
                    emit(&data, &format!("cutsize_n{}_i{}", r.size, r.instance), opts, out_dir, &mut written)?;
                }
            }
            PlotKind::Volumetric => {
                emit(&volumetric_data(&fidelities, opts.quantum_volume), "volumetric", opts, out_dir, &mut written)?;
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{quality_from_histogram, CutHistogram, TimingAccumulator, TimingBreakdown};
    use crate::qaoa::{CircuitResources, Fidelity};
    use crate::runner::Backend;

    fn record(solver: Solver, size: usize, restart: usize, iteration: usize, cuts: &[(u64, u64)], t: f64, acc: &mut TimingAccumulator) -> IterationRecord {
        let hist = CutHistogram::from_counts(cuts.iter().copied());
        let quality = quality_from_histogram(&hist, 10, 0.1, 0.5).unwrap();
        IterationRecord {
            solver,
            size,
            instance: 0,
            restart,
            iteration,
            anneal_time_us: (solver == Solver::Qa).then_some(iteration as f64),
            params: None,
            shots: hist.total(),
            backend: Backend::Statevector,
            optimal_cut: 10,
            optimal_exact: true,
            objective_value: quality.approximation_ratio,
            quality,
            timing: acc.push(TimingBreakdown {
                t_quantum: t,
                t_elapsed_quantum: 2.0 * t,
                t_classical: 0.1,
                ..Default::default()
            }),
            seed: 0,
            cut_histogram: hist,
        }
    }

    fn run(solver: Solver) -> Vec<IterationRecord> {
        let mut out = Vec::new();
        for size in [4, 6] {
            for restart in 1..=2 {
                let mut acc = TimingAccumulator::new();
                for it in 1..=5 {
                    let good = (it + restart) as u64;
                    out.push(record(solver, size, restart, it, &[(good, 30), (3, 70)], 0.5 + it as f64, &mut acc));
                }
            }
        }
        out
    }

    #[test]
    fn stacked_rows_abut_and_sum_to_cumulative_time() {
        let recs = run(Solver::Qaoa);
        let data = area_plot_data(&recs, TimeField::Quantum, Ratio::Ar).unwrap();
        assert_eq!(data.layout, Layout::Stacked);
        assert_eq!(data.rows.len(), 2);
        for row in &data.rows {
            for w in row.rects.windows(2) {
                assert_eq!(w[1].x_start, w[0].x_start + w[0].width);
            }
            let last = recs
                .iter()
                .filter(|r| r.size == row.size && r.restart == row.restart)
                .map(|r| r.timing.cum_quantum)
                .fold(0.0, f64::max);
            let total = row.rects.last().map(|r| r.x_start + r.width).unwrap();
            assert_eq!(total, last);
        }
    }

    #[test]
    fn qa_rows_overlay() {
        let data = area_plot_data(&run(Solver::Qa), TimeField::Quantum, Ratio::Ar).unwrap();
        assert_eq!(data.layout, Layout::Overlaid);
        assert_eq!(data.color_range, QA_COLOR_RANGE);
        assert!(data.rows.iter().flat_map(|r| &r.rects).all(|r| r.x_start == 0.0));
    }

    #[test]
    fn ratio_selector_only_recolors() {
        let recs = run(Solver::Qaoa);
        let a = area_plot_data(&recs, TimeField::Quantum, Ratio::Ar).unwrap();
        let b = area_plot_data(&recs, TimeField::Quantum, Ratio::Best).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            for (x, y) in ra.rects.iter().zip(&rb.rects) {
                assert_eq!((x.x_start, x.width), (y.x_start, y.width));
            }
        }
        assert_ne!(a, b);
    }

    #[test]
    fn mixed_solvers_rejected() {
        let mut recs = run(Solver::Qaoa);
        recs.extend(run(Solver::Qa));
        assert!(matches!(area_plot_data(&recs, TimeField::Quantum, Ratio::Ar), Err(Error::MixedSolvers)));
    }

    #[test]
    fn best_restart_and_final_record() {
        let recs = run(Solver::Qaoa);
        // restart 2 reaches cut 7 at iteration 5, the best objective overall
        let finals = final_records(&recs);
        assert_eq!(finals.len(), 2);
        assert!(finals.iter().all(|r| r.restart == 2 && r.iteration == 5));
    }

    #[test]
    fn optgap_data_follows_metric_ordering_and_quartiles() {
        let recs = run(Solver::Qaoa);
        let s = optgap_summary_data(&recs).unwrap();
        for (e, r) in s.entries.iter().zip(final_records(&recs)) {
            assert!(e.gaps.best <= e.gaps.cvar && e.gaps.cvar <= e.gaps.ar);
            assert_eq!(e.quartiles, distribution_stats(&r.cut_histogram, 10).unwrap().quartiles);
            assert_eq!(e.violin.iter().sum::<u64>(), 100);
            assert_eq!(e.violin.len(), VIOLIN_BINS);
        }
        let all_opt = vec![record(Solver::Qaoa, 4, 1, 1, &[(10, 50)], 1.0, &mut TimingAccumulator::new())];
        let s = optgap_summary_data(&all_opt).unwrap();
        assert_eq!(s.entries[0].gaps.ar, 0.0);
        assert_eq!(s.entries[0].gaps.best, 0.0);
        assert_eq!(s.entries[0].quartiles, [0.0; 3]);
        assert_eq!(s.entries[0].violin[0], 50);
    }

    #[test]
    fn cutsize_baselines() {
        let edge = GraphInstance::new(2, [(0, 1)]).unwrap();
        let (law, exact) = random_cut_baseline(&edge, 20).unwrap();
        assert!(exact);
        assert_eq!(law, vec![(0, 0.5), (1, 0.5)]);
        let g = crate::graphs::generate_3_regular(10, 2).unwrap();
        let (sampled, exact) = random_cut_baseline(&g, 4).unwrap();
        assert!(!exact);
        let (truth, _) = random_cut_baseline(&g, 20).unwrap();
        let truth: BTreeMap<u64, f64> = truth.into_iter().collect();
        for (c, p) in sampled {
            assert!((p - truth[&c]).abs() < 0.01);
        }
    }

    #[test]
    fn cutsize_markers_and_totals() {
        let g = crate::graphs::generate_3_regular(8, 1).unwrap();
        let mut acc = TimingAccumulator::new();
        let mut r = record(Solver::Qaoa, 8, 1, 1, &[(6, 10), (8, 20), (9, 5)], 1.0, &mut acc);
        r.optimal_cut = 10;
        let data = cutsize_distribution_data(&r, &g, 20).unwrap();
        assert_eq!(data.empirical.iter().map(|e| e.1).sum::<u64>(), data.shots);
        let m = data.markers;
        assert!(m.best >= m.cvar && m.cvar >= m.gibbs && m.gibbs >= m.ar);
        assert!((data.baseline.iter().map(|b| b.1).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    fn fid(width: usize, depth: usize, f: f64) -> FidelityRecord {
        let hist = CutHistogram::from_counts([(3, 1)]);
        FidelityRecord {
            size: width,
            instance: 0,
            rounds: 1,
            shots: 1,
            seed: 0,
            params: crate::qaoa::AnsatzParams::uniform(1, 1.0, 1.0),
            noise: None,
            fidelity: Fidelity { raw: f, normalized: f },
            resources: CircuitResources {
                width,
                two_qubit_gate_count: 0,
                one_qubit_gate_count: 0,
                mixer_gate_count: 0,
                algorithmic_depth: depth,
            },
            optimal_cut: 3,
            quality: quality_from_histogram(&hist, 3, 0.1, 0.5).unwrap(),
            cut_histogram: hist,
        }
    }

    #[test]
    fn volumetric_cells() {
        let v = volumetric_data(&[fid(4, 7, 0.8)], None);
        assert_eq!(v.cells, vec![VolumetricCell { width: 4, depth: 7, mean_normalized_fidelity: 0.8, count: 1 }]);
        let v = volumetric_data(&[fid(4, 7, 0.8), fid(4, 7, 0.4), fid(6, 9, 0.1)], Some(32));
        assert_eq!(v.cells.len(), 2);
        assert!((v.cells[0].mean_normalized_fidelity - 0.6).abs() < 1e-15);
        let b = v.backdrop.unwrap();
        assert_eq!((b.max_width, b.max_depth), (5, 5));
        assert!(b.covers(5, 5) && !b.covers(6, 5) && !b.covers(5, 6));
    }

    #[test]
    fn renders_are_deterministic_and_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let data = area_plot_data(&run(Solver::Qaoa), TimeField::Quantum, Ratio::Ar).unwrap();
        let a = dir.path().join("a.svg");
        let b = dir.path().join("b.svg");
        render(&data, Format::Svg, &a).unwrap();
        render(&data, Format::Svg, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

        let c = dir.path().join("a.csv");
        render(&data, Format::Csv, &c).unwrap();
        let mut reader = csv::Reader::from_path(&c).unwrap();
        let rects: Vec<&AreaRect> = data.rows.iter().flat_map(|r| &r.rects).collect();
        let mut n = 0;
        for (row, rect) in reader.records().zip(&rects) {
            let row = row.unwrap();
            assert_eq!(row[5].parse::<f64>().unwrap(), rect.x_start);
            assert_eq!(row[6].parse::<f64>().unwrap(), rect.width);
            assert_eq!(row[7].parse::<f64>().unwrap(), rect.color_value);
            n += 1;
        }
        assert_eq!(n, rects.len());

        let j = dir.path().join("a.json");
        render(&data, Format::Json, &j).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["plot"], "area");
    }

    #[test]
    fn empty_records_give_valid_documents() {
        let dir = tempfile::tempdir().unwrap();
        let data = area_plot_data(&[], TimeField::Quantum, Ratio::Ar).unwrap();
        assert!(data.is_empty());
        for f in [Format::Svg, Format::Csv, Format::Json] {
            render(&data, f, &dir.path().join(format!("e.{}", f.extension()))).unwrap();
        }
        let svg = std::fs::read_to_string(dir.path().join("e.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(optgap_summary_data(&[]).unwrap().is_empty());
        assert!(volumetric_data(&[], Some(32)).is_empty());
    }

    #[test]
    fn parses_selectors() {
        assert_eq!("Area".parse::<PlotKind>().unwrap(), PlotKind::Area);
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("pie".parse::<PlotKind>().unwrap_err().is_config());
    }
}
