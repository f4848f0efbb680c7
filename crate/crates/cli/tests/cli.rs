use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractal-lab"))
        .args(args)
        .env_remove("FRACTAL_LAB_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn cantor_then_dim_prints_the_slope() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("c.json");
    let out = run(&["cantor", "--base", "3", "--kept", "0,2", "--depth", "20", "--out", p(&set)]);
    assert!(out.status.success());
    let out = run(&["dim", "--set", p(&set), "--lo", "5", "--hi", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l == "slope 0.630930"), "{}", stdout(&out));
}

#[test]
fn binary_and_json_sets_agree() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let bin = dir.path().join("c.bin");
    assert!(run(&["cantor", "--depth", "8", "--out", p(&json)]).status.success());
    assert!(run(&["cantor", "--depth", "8", "--out", p(&bin)]).status.success());
    assert_eq!(std::fs::read(&json).unwrap()[0], b'{');
    assert_ne!(std::fs::read(&bin).unwrap()[0], b'{');
    let a = run(&["dim", "--set", p(&json)]);
    let b = run(&["dim", "--set", p(&bin)]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn dim_writes_estimate_csv() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("c.bin");
    let est = dir.path().join("est.csv");
    assert!(run(&["cantor", "--depth", "10", "--out", p(&set)]).status.success());
    assert!(run(&["dim", "--set", p(&set), "--out", p(&est)]).status.success());
    let text = std::fs::read_to_string(&est).unwrap();
    assert!(text.starts_with("level_lo,level_hi,slope,intercept,rms_residual\n"));
}

#[test]
fn frostman_reports_unit_constant_on_cantor() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("c.json");
    let cells = dir.path().join("cells.csv");
    let measure = dir.path().join("m.json");
    assert!(run(&["cantor", "--depth", "10", "--out", p(&set)]).status.success());
    let alpha = (2f64.ln() / 3f64.ln()).to_string();
    let out = run(&[
        "frostman", "--set", p(&set), "--alpha", &alpha, "--out", p(&measure), "--cells", p(&cells),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("frostman_constant 1.000000"));
    assert!(std::fs::read_to_string(&cells).unwrap().starts_with("level,cell_index,mass\n"));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&measure).unwrap()).unwrap();
    assert!(v["frostman_constant"].is_number());
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["dim", "--set", p(&missing)]).status.code(), Some(1));
    let set = dir.path().join("c.json");
    assert!(run(&["cantor", "--depth", "4", "--out", p(&set)]).status.success());
    assert_eq!(run(&["frostman", "--set", p(&set), "--alpha", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["cantor", "--kept", "0,7", "--depth", "4", "--out", p(&set)]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["dim"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["experiment", "--config", "x.json", "--kind", "perkins", "--out", "o"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["experiment", "--out", "o"]).status.code(), Some(2));
}

#[test]
fn walk_records_seed_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    let stats = dir.path().join("s.csv");
    assert!(run(&["walk", "--steps-log2", "10", "--seed", "9", "--out", p(&a), "--stats", p(&stats)])
        .status
        .success());
    assert!(run(&["walk", "--steps-log2", "10", "--seed", "9", "--out", p(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&stats).unwrap();
    assert!(text.starts_with("replica,seed,statistic,value\n"));
    assert!(text.lines().skip(1).all(|l| l.starts_with("0,9,")));
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let out = run(&["walk", "--steps-log2", "6"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let seed = err.lines().find_map(|l| l.strip_prefix("seed: ")).expect("seed printed");
    assert!(seed.parse::<u64>().is_ok());
}

#[test]
fn smoke_experiments_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["zero-set-dim", "doubling", "perkins", "levy-identity", "cantor-exact"] {
        let a = dir.path().join(format!("{kind}-a"));
        let b = dir.path().join(format!("{kind}-b"));
        for (out, jobs) in [(&a, "1"), (&b, "3")] {
            let res = run(&["experiment", "--kind", kind, "--seed", "5", "--smoke", "--jobs", jobs, "--out", p(out)]);
            assert!(res.status.success(), "{kind}: {}", String::from_utf8_lossy(&res.stderr));
        }
        let name = kind.replace('-', "_");
        for ext in ["csv", "json"] {
            let fa = std::fs::read(a.join(format!("{name}.{ext}"))).unwrap();
            let fb = std::fs::read(b.join(format!("{name}.{ext}"))).unwrap();
            assert_eq!(fa, fb, "{kind}.{ext}");
        }
    }
}

#[test]
fn experiment_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"kind":"zero_set_dim","steps_log2":10,"replicas":3,"master_seed":11}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let res = run(&["experiment", "--config", p(&cfg), "--out", p(&out_dir)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("zero_set_dim.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["master_seed"], 11);
    let csv = std::fs::read_to_string(out_dir.join("zero_set_dim.csv")).unwrap();
    assert!(csv.starts_with("replica,seed,flag,stat_name,value\n"));

    std::fs::write(&cfg, r#"{"kind":"nonsense","replicas":1,"master_seed":1}"#).unwrap();
    let res = run(&["experiment", "--config", p(&cfg), "--out", p(&out_dir)]);
    assert_eq!(res.status.code(), Some(1));
}
