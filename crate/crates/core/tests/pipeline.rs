use discord_optics::bench::NoiseModel;
use discord_optics::pipeline::commands::{cmd_recover, cmd_run, SWEEP_CSV_HEADER};
use discord_optics::pipeline::pgm::{read_capture, sidecar_path, Pgm};
use discord_optics::pipeline::{cmd_modes, cmd_sweep, BasisSource, ExperimentConfig};
use discord_optics::Error;

fn config(dir: &std::path::Path, json: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_json(json).unwrap();
    c.output_dir = dir.to_path_buf();
    c
}

#[test]
fn empty_json_is_the_default_config() {
    assert_eq!(
        ExperimentConfig::from_json("{}").unwrap(),
        ExperimentConfig::default()
    );
}

#[test]
fn run_artifacts_feed_recover() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let c = config(
        &out,
        r#"{"grid": {"n": 64}, "lambda0": 0.17, "noise": {"seed": 4}}"#,
    );
    let (record, files) = cmd_run(&c).unwrap();
    assert_eq!(files.last().unwrap().file_name().unwrap(), "record.jsonl");
    let line = std::fs::read_to_string(out.join("record.jsonl")).unwrap();
    assert_eq!(line.lines().count(), 1);
    let parsed: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(parsed["lambda0_rec"].as_f64().unwrap(), record.lambda0_rec);

    let (m, p, q) = (
        out.join("measured.pgm"),
        out.join("basis_psi.pgm"),
        out.join("basis_phi.pgm"),
    );
    let r = cmd_recover(&m, &p, &q).unwrap();
    assert!((r.lambda0_rec - record.lambda0_rec).abs() <= 1e-12);
    let swapped = cmd_recover(&m, &q, &p).unwrap();
    assert!((swapped.lambda0_rec - (1.0 - r.lambda0_rec)).abs() <= 1e-12);
    assert!(matches!(
        cmd_recover(&m, &p, &p),
        Err(Error::DegenerateBasis { .. })
    ));
}

#[test]
fn recover_rejects_mismatched_images() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    cmd_run(&config(&a, r#"{"grid": {"n": 64}}"#)).unwrap();
    cmd_run(&config(&b, r#"{"grid": {"n": 32}}"#)).unwrap();
    let err = cmd_recover(
        &a.join("measured.pgm"),
        &b.join("basis_psi.pgm"),
        &a.join("basis_phi.pgm"),
    )
    .unwrap_err();
    assert_eq!(err.exit_code(), 4);
    let err = cmd_recover(
        &dir.path().join("missing.pgm"),
        &a.join("basis_psi.pgm"),
        &a.join("basis_phi.pgm"),
    )
    .unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn recover_works_without_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let (record, _) = cmd_run(&config(&out, r#"{"grid": {"n": 64}, "lambda0": 0.64}"#)).unwrap();
    for stem in ["measured", "basis_psi", "basis_phi"] {
        std::fs::remove_file(sidecar_path(&out.join(format!("{stem}.pgm")))).unwrap();
    }
    let r = cmd_recover(
        &out.join("measured.pgm"),
        &out.join("basis_psi.pgm"),
        &out.join("basis_phi.pgm"),
    )
    .unwrap();
    assert!((r.lambda0_rec - record.lambda0_rec).abs() <= 1e-12);
}

#[test]
fn modes_writes_images_sidecars_and_gram() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("modes");
    let files = cmd_modes(&config(&out, r#"{"grid": {"n": 64}}"#)).unwrap();
    assert_eq!(files.len(), 7);
    let gram: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("gram.json")).unwrap()).unwrap();
    assert!(gram["max_off_diagonal"].as_f64().unwrap() <= 1e-3);
    let img = Pgm::read(&out.join("psi_analytic.pgm")).unwrap();
    assert_eq!((img.width, img.height, img.maxval), (64, 64, 65535));
    let ccd = read_capture(&out.join("phi_ccd.pgm")).unwrap();
    assert_eq!(ccd.grid().n(), 64);
}

#[test]
fn failed_write_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let err = cmd_modes(&config(&blocker.join("sub"), r#"{"grid": {"n": 32}}"#)).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn sweep_csv_has_fixed_header_and_sorted_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let mut c = config(&out, r#"{"grid": {"n": 32}}"#);
    c.noise = NoiseModel::noiseless();
    c.basis_source = BasisSource::Analytic;
    let (summary, _) = cmd_sweep(&c, &[0.05, 0.0], &[3, 1]).unwrap();
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
    let keys: Vec<(String, String)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[5].to_owned())
        })
        .collect();
    assert_eq!(
        keys,
        [("0", "1"), ("0", "3"), ("0.05", "1"), ("0.05", "3")]
            .map(|(a, b)| (a.to_owned(), b.to_owned()))
    );
    assert!(!text.contains('\r'));
    assert_eq!(summary.per_value.len(), 2);
    assert!(summary.failures.is_empty());
}
