use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discord-optics"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().unwrap()
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, r#"{"grid": {"n": 48}, "noise": {"seed": 11}}"#).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn oracle_prints_both_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oracle", "0.25", "0.25", "0.25", "0.25"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["analytic"].as_f64().unwrap().abs() <= 1e-9);
    assert!(v["oracle"].as_f64().unwrap().abs() <= 1e-9);

    let out = run(&["oracle", "0.17", "0.83", "0", "0"], dir.path());
    assert!(json(&out)["abs_diff"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["oracle", "0.9", "0.2", "-0.1", "0"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["oracle", "1", "0"], dir.path()).status.code(),
        Some(2)
    );
    let cfg = small_config(dir.path());
    assert_eq!(
        run(&["--config", &cfg, "sweep", "--values", ""], dir.path())
            .status
            .code(),
        Some(2)
    );
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"lambda0": 0.3, "target_discord": 0.1}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["--config", "bad.json", "run"], dir.path())
            .status
            .code(),
        Some(2)
    );
    std::fs::write(dir.path().join("typo.json"), r#"{"lamda0": 0.3}"#).unwrap();
    assert_eq!(
        run(&["--config", "typo.json", "run"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn run_then_recover_reproduces_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = run(
        &["--config", &cfg, "--out", "r", "run", "--lambda0", "0.38"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let record = json(&out);
    let rec = run(
        &[
            "recover",
            "r/measured.pgm",
            "r/basis_psi.pgm",
            "r/basis_phi.pgm",
        ],
        dir.path(),
    );
    assert!(rec.status.success());
    let r = json(&rec);
    let diff = r["lambda0_rec"].as_f64().unwrap() - record["lambda0_rec"].as_f64().unwrap();
    assert!(diff.abs() <= 1e-12);

    let same = run(
        &[
            "recover",
            "r/measured.pgm",
            "r/basis_psi.pgm",
            "r/basis_psi.pgm",
        ],
        dir.path(),
    );
    assert_eq!(same.status.code(), Some(5));
    let missing = run(
        &[
            "recover",
            "r/nothing.pgm",
            "r/basis_psi.pgm",
            "r/basis_phi.pgm",
        ],
        dir.path(),
    );
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn target_discord_zero_sets_balanced_arms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = run(
        &["--config", &cfg, "--out", "z", "run", "--discord", "0"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(json(&out)["lambda0_set"].as_f64(), Some(0.5));
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = run(
        &["--config", &cfg, "--out", "a", "--seed", "1", "run"],
        dir.path(),
    );
    let b = run(
        &["--config", &cfg, "--out", "b", "--seed", "2", "run"],
        dir.path(),
    );
    assert_eq!(json(&a)["seed"].as_u64(), Some(1));
    assert_eq!(json(&b)["seed"].as_u64(), Some(2));
    assert_ne!(
        std::fs::read(dir.path().join("a/measured.pgm")).unwrap(),
        std::fs::read(dir.path().join("b/measured.pgm")).unwrap()
    );
}

#[test]
fn unwritable_output_exits_with_three_and_leaves_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    std::fs::write(dir.path().join("blocker"), b"").unwrap();
    let out = run(
        &["--config", &cfg, "--out", "blocker/modes", "modes"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("blocker/modes").exists());
}

#[test]
fn sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = run(
        &[
            "--config",
            &cfg,
            "--out",
            "s",
            "sweep",
            "--values",
            "0.1,0",
            "--num-seeds",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with(
        "required_discord,lambda0_set,lambda0_rec,discord_measured,residual,seed\n0,"
    ));
    let summary = json(&out);
    assert_eq!(summary["seeds"], serde_json::json!([11, 12]));
}
