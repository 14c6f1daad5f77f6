//! `qopt-bench` command-line entry point.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! run fails at runtime.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qopt_bench::graphs::generate_3_regular;
use qopt_bench::metrics::Ratio;
use qopt_bench::qaoa::NoiseModel;
use qopt_bench::report::{generate_report, Format, PlotKind, ReportOptions};
use qopt_bench::runner::{instance_path, instance_seed, run_to_dir, AngleSource, AnnealRange, BenchmarkConfig, SizeRange, Solver};
use qopt_bench::strategy::{analyze_runs, parse_grid, write_strategy, Statistic, StrategyOptions, DEFAULT_GRID};

/// Environment variable that overrides the master seed.
const SEED_ENV: &str = "QOPT_BENCH_SEED";

#[derive(Parser, Debug)]
#[command(name = "qopt-bench", version, about = "Benchmark QAOA and quantum annealing on Max-Cut at desk scale")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Only warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate and store random 3-regular instances with exact optima.
    GenInstances(GenArgs),
    /// Run a benchmark and write its run directory.
    Run(Box<RunArgs>),
    /// Render plots from a run directory.
    Report(ReportArgs),
    /// Parameter-strategy analysis over one or more QAOA runs.
    Strategy(StrategyArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Size sweep: `A..B:S`, `A..B` (step 2) or `A`.
    #[arg(long, default_value = "4..12:2")]
    sizes: String,
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest size solved exactly.
    #[arg(long, default_value_t = qopt_bench::graphs::DEFAULT_EXHAUSTION_LIMIT)]
    exhaustion_limit: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// qaoa or qa.
    #[arg(long)]
    solver: Option<String>,
    /// 1: single execution per grid point; 2: iterative loop or anneal sweep.
    #[arg(long)]
    method: Option<u8>,
    /// Size sweep: `A..B:S`, `A..B` (step 2) or `A`.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Ratio the minimizer maximizes: ar, cvar, gibbs or best.
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// default, random or fixed.
    #[arg(long)]
    angles: Option<String>,
    /// Fixed-angle table for `--angles fixed`.
    #[arg(long)]
    angle_table: Option<PathBuf>,
    /// Anneal-time sweep in microseconds: `A..BxF`.
    #[arg(long)]
    anneal: Option<String>,
    /// Device profile preset or JSON file.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// none, qv32, or `P1,P2` depolarizing probabilities.
    #[arg(long)]
    noise: Option<String>,
    /// Method-1 rounds grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    sweep_rounds: Option<Vec<usize>>,
    /// Method-1 shots grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    sweep_shots: Option<Vec<u64>>,
    /// Write the resolved config to this file and exit without running.
    #[arg(long)]
    dump_config: Option<PathBuf>,
    #[arg(long, required_unless_present = "dump_config")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    run: PathBuf,
    /// Comma-separated: area, optgap, cutsize, volumetric.
    #[arg(long, value_delimiter = ',', default_value = "area,optgap,cutsize,volumetric")]
    plots: Vec<String>,
    /// Comma-separated: svg, csv, json.
    #[arg(long, value_delimiter = ',', default_value = "svg,json")]
    format: Vec<String>,
    /// Ratio that colors area plots.
    #[arg(long, default_value = "ar")]
    ratio: String,
    /// Quantum volume of the volumetric backdrop, or `none`.
    #[arg(long, default_value = "32")]
    qv: String,
    /// Color scale `LO,HI` of QAOA area plots.
    #[arg(long, default_value = "0,1")]
    qaoa_color_range: String,
    /// Color scale `LO,HI` of QA area plots.
    #[arg(long, default_value = "0.9,1")]
    qa_color_range: String,
    /// Output directory (default: RUN/report).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StrategyArgs {
    #[arg(long, num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    /// Training fraction of instances.
    #[arg(long, default_value_t = qopt_bench::strategy::DEFAULT_TRAIN_FRACTION)]
    split: f64,
    #[arg(long, default_value = DEFAULT_GRID)]
    grid: String,
    /// Seed of the train/test split.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// mean or median.
    #[arg(long, default_value = "mean")]
    statistic: String,
    #[arg(long, value_delimiter = ',', default_value = "svg,json")]
    format: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

/// A failure tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<qopt_bench::Error> for Failure {
    fn from(e: qopt_bench::Error) -> Self {
        Failure {
            code: if e.is_config() { 1 } else { 2 },
            error: e.into(),
        }
    }
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: error.into() }
}

fn runtime(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: error.into() }
}

fn parse<T: std::str::FromStr<Err = qopt_bench::Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(usage)
}

fn parse_list<T: std::str::FromStr<Err = qopt_bench::Error>>(items: &[String]) -> Result<Vec<T>, Failure> {
    items.iter().map(|s| parse(s)).collect()
}

fn parse_noise(s: &str) -> Result<Option<NoiseModel>, Failure> {
    match s.trim().to_ascii_lowercase().as_str() {
        "none" | "off" => Ok(None),
        "qv32" => Ok(Some(NoiseModel::qv32_preset())),
        other => {
            let parts: Vec<&str> = other.split(',').collect();
            let [p1, p2] = parts.as_slice() else {
                return Err(usage(anyhow::anyhow!("--noise expects none, qv32 or P1,P2, got `{s}`")));
            };
            let p = |v: &str| v.trim().parse::<f64>().map_err(|_| usage(anyhow::anyhow!("--noise: `{v}` is not a number")));
            Ok(Some(NoiseModel::new(p(p1)?, p(p2)?)?))
        }
    }
}

/// Defaults, then the config file, then flags, then the seed variable.
fn resolve_config(args: &RunArgs, env_seed: Option<String>) -> Result<BenchmarkConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => BenchmarkConfig::load(path)?,
        None => BenchmarkConfig::default(),
    };
    if let Some(s) = &args.solver {
        cfg.solver = parse::<Solver>(s)?;
    }
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if let Some(s) = &args.sizes {
        cfg.sizes = SizeRange::parse(s)?;
    }
    if let Some(v) = args.instances {
        cfg.instances_per_size = v;
    }
    if let Some(v) = args.restarts {
        cfg.max_restarts = v;
    }
    if let Some(v) = args.shots {
        cfg.num_shots = v;
    }
    if let Some(v) = args.rounds {
        cfg.rounds = v;
    }
    if let Some(v) = args.iterations {
        cfg.max_iterations = v;
    }
    if let Some(s) = &args.objective {
        cfg.objective = parse::<Ratio>(s)?;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(s) = &args.angles {
        cfg.angles = parse::<AngleSource>(s)?;
    }
    if let Some(p) = &args.angle_table {
        cfg.fixed_angles_path = Some(p.clone());
    }
    if let Some(s) = &args.anneal {
        cfg.anneal = AnnealRange::parse(s)?;
    }
    if let Some(p) = &args.profile {
        cfg.profile = Some(p.clone());
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(s) = &args.noise {
        cfg.noise = parse_noise(s)?;
    }
    if let Some(v) = &args.sweep_rounds {
        cfg.sweep_rounds = v.clone();
    }
    if let Some(v) = &args.sweep_shots {
        cfg.sweep_shots = v.clone();
    }
    if let Some(s) = env_seed.filter(|s| !s.trim().is_empty()) {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| usage(anyhow::anyhow!("{SEED_ENV}=`{s}` is not an unsigned integer")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let sizes = SizeRange::parse(&args.sizes)?;
    sizes.validate()?;
    if args.instances == 0 {
        return Err(usage(anyhow::anyhow!("--instances must be >= 1")));
    }
    let mut count = 0;
    for n in sizes.sizes() {
        for k in 0..args.instances {
            let mut g = generate_3_regular(n, instance_seed(args.seed, n, k))?;
            let opt = g.annotate_exact(args.exhaustion_limit);
            g.store(instance_path(&args.out, n, k))?;
            log::info!("n={n} instance {k}: optimum {}", opt.size().map_or("unknown".into(), |c| c.to_string()));
            count += 1;
        }
    }
    println!("wrote {count} instances under {}", args.out.join(qopt_bench::runner::INSTANCE_DIR).display());
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let cfg = resolve_config(args, std::env::var(SEED_ENV).ok())?;
    if let Some(path) = &args.dump_config {
        let text = serde_json::to_string_pretty(&cfg).map_err(runtime)?;
        std::fs::write(path, text + "\n")
            .map_err(|e| runtime(anyhow::anyhow!("{}: {e}", path.display())))?;
        return Ok(());
    }
    let out = args.out.as_deref().expect("clap requires --out without --dump-config");
    log::info!(
        "running {:?} method {} on sizes {:?} (seed {})",
        cfg.solver,
        cfg.method,
        cfg.sizes.sizes(),
        cfg.seed
    );
    let run = run_to_dir(&cfg, out)?;
    for g in run.groups() {
        match (&g.quality, &g.error) {
            (Some(q), _) => log::info!(
                "n={} instance {}: AR {:.4}, best {:.4}",
                g.size,
                g.instance,
                q.approximation_ratio,
                q.best_measurement_ratio
            ),
            (None, Some(e)) => log::warn!("n={} instance {} failed: {e}", g.size, g.instance),
            _ => {}
        }
    }
    println!("{}", out.display());
    Ok(())
}

fn parse_range(flag: &str, s: &str) -> Result<(f64, f64), Failure> {
    let bad = || usage(anyhow::anyhow!("--{flag} expects LO,HI with LO < HI, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

fn cmd_report(args: &ReportArgs) -> Result<(), Failure> {
    let opts = ReportOptions {
        plots: parse_list::<PlotKind>(&args.plots)?,
        formats: parse_list::<Format>(&args.format)?,
        ratio: parse(&args.ratio)?,
        quantum_volume: match args.qv.trim() {
            "none" => None,
            v => Some(v.parse().map_err(|_| usage(anyhow::anyhow!("--qv expects an integer or none, got `{v}`")))?),
        },
        qaoa_color_range: parse_range("qaoa-color-range", &args.qaoa_color_range)?,
        qa_color_range: parse_range("qa-color-range", &args.qa_color_range)?,
        ..Default::default()
    };
    let out = args.out.clone().unwrap_or_else(|| args.run.join("report"));
    let files = generate_report(&args.run, &out, &opts)?;
    log::info!("wrote {} files", files.len());
    println!("{}", out.display());
    Ok(())
}

fn cmd_strategy(args: &StrategyArgs) -> Result<(), Failure> {
    let opts = StrategyOptions {
        train_fraction: args.split,
        seed: args.seed,
        grid: parse_grid(&args.grid)?,
        statistic: parse::<Statistic>(&args.statistic)?,
        formats: parse_list::<Format>(&args.format)?,
    };
    let analysis = analyze_runs(&args.runs, &opts)?;
    log::info!(
        "{} train and {} test instances",
        analysis.train_instances.len(),
        analysis.test_instances.len()
    );
    write_strategy(&analysis, &args.out, &opts.formats)?;
    println!("{}", args.out.display());
    Ok(())
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => "warn",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(usage(anyhow::anyhow!("--jobs must be >= 1")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(runtime)?;
    }
    match &cli.command {
        Command::GenInstances(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Report(a) => cmd_report(a),
        Command::Strategy(a) => cmd_strategy(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose, cli.quiet);
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
