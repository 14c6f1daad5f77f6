use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qopt-bench"));
    c.env_remove("QOPT_BENCH_SEED").env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_lists_subcommands_and_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["gen-instances", "run", "report", "strategy"] {
        assert!(text.contains(sub), "{sub} missing from help:\n{text}");
    }
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_1() {
    let o = run(&["run", "--bogus"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&run(&[])), 1);
}

#[test]
fn inverted_size_range_exits_1_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "--sizes", "8..4", "--out", p(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("8"));
}

#[test]
fn missing_run_directory_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["report", "--run", p(&dir.path().join("absent"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn run_then_report_writes_svgs_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("run");
    let o = run(&[
        "--jobs", "2", "run", "--sizes", "4..8:2", "--solver", "qaoa", "--iterations", "8", "--shots", "200", "--out", p(&runs),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["metrics.jsonl", "wallclock.jsonl", "manifest.json"] {
        assert!(runs.join(f).exists(), "{f}");
    }

    let r1 = dir.path().join("r1");
    let r2 = dir.path().join("r2");
    for out in [&r1, &r2] {
        let o = run(&["report", "--run", p(&runs), "--format", "svg,csv,json", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let svgs: Vec<_> = std::fs::read_dir(&r1)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|f| f.extension().is_some_and(|e| e == "svg"))
        .collect();
    // three area plots, optgap, three cut-size plots, volumetric
    assert_eq!(svgs.len(), 8, "{svgs:?}");
    for f in &svgs {
        let other = r2.join(f.file_name().unwrap());
        assert_eq!(std::fs::read(f).unwrap(), std::fs::read(other).unwrap(), "{}", f.display());
    }
}

#[test]
fn precedence_defaults_file_flags_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"num_shots": 300, "rounds": 3, "seed": 11}"#).unwrap();
    let dump = dir.path().join("resolved.json");
    let resolved = |envseed: Option<&str>| {
        let mut c = bin();
        c.args(["run", "--config", p(&cfg), "--rounds", "5", "--dump-config", p(&dump)]);
        if let Some(s) = envseed {
            c.env("QOPT_BENCH_SEED", s);
        }
        let o = c.output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(&dump).unwrap()).unwrap()
    };
    let v = resolved(None);
    assert_eq!(v["max_iterations"], 30);
    assert_eq!(v["num_shots"], 300);
    assert_eq!(v["rounds"], 5);
    assert_eq!(v["seed"], 11);
    assert_eq!(resolved(Some("42"))["seed"], 42);
}

#[test]
fn unknown_config_field_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"shots": 300}"#).unwrap();
    let o = run(&["run", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(code(&o), 1);
}

#[test]
fn gen_instances_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen-instances", "--sizes", "4..6", "--instances", "2", "--out", p(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let n = std::fs::read_dir(dir.path().join("instances")).unwrap().count();
    assert_eq!(n, 4);
    assert_eq!(code(&run(&["gen-instances", "--sizes", "5", "--out", p(dir.path())])), 1);
}

#[test]
fn strategy_over_two_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (k, shots) in ["50", "200"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let o = run(&[
            "run", "--sizes", "4..6", "--instances", "3", "--restarts", "2", "--iterations", "5", "--shots", shots, "--out", p(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(out);
    }
    let out = dir.path().join("strategy");
    let o = run(&[
        "strategy", "--runs", p(&runs[0]), p(&runs[1]), "--grid", "log:1:1e4:9", "--format", "json,svg", "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["performance.json", "performance.svg", "parameters.json", "parameters.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("performance.json")).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["data"]["test_instances"].as_array().unwrap().len(), 1);
}
