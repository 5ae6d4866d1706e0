//! The command-line operations, as library functions returning their
//! results; the binary only parses arguments and prints.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{run_experiment, Bench, RunOutcome, RunRecord};
use super::output::OutputSet;
use super::pgm::{ccd_to_pgm, map_to_pgm, metadata_json, read_capture};
use crate::bench::{normalize_image, CCDImage};
use crate::discord::{analytic_discord, oracle_discord, BellSpectrum};
use crate::error::{Error, Result};
use crate::fields::{gram_matrix, identity_deviation, lg_basis};
use crate::recovery::recover_fraction;

/// Required discord values used when a sweep is given none.
pub fn default_sweep_values() -> Vec<f64> {
    (0..=10).map(|k| f64::from(k) / 100.0).collect()
}

pub const SWEEP_CSV_HEADER: &str =
    "required_discord,lambda0_set,lambda0_rec,discord_measured,residual,seed";

pub const DEFAULT_ORACLE_GRID: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub n: usize,
    pub half_extent: f64,
    pub modes: Vec<[i64; 2]>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
    pub max_diagonal_deviation: f64,
    pub max_off_diagonal: f64,
}

fn to_json_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_capture(out: &mut OutputSet, stem: &str, img: &CCDImage<f64>) -> Result<()> {
    out.write(&format!("{stem}.pgm"), &ccd_to_pgm(img).encode())?;
    out.write(&format!("{stem}.json"), &metadata_json(&img.metadata)?)?;
    Ok(())
}

pub fn gram_report(config: &ExperimentConfig) -> Result<GramReport> {
    let grid = config.grid_spec()?;
    let modes = lg_basis(&grid)?;
    let gram = gram_matrix(&modes)?;
    let (diag, off) = identity_deviation(&gram);
    Ok(GramReport {
        n: grid.n(),
        half_extent: grid.half_extent(),
        modes: crate::fields::ModeIndex::ALL
            .iter()
            .map(|m| [i64::from(m.p()), i64::from(m.ell())])
            .collect(),
        real: gram
            .iter()
            .map(|r| r.iter().map(|c| c.re).collect())
            .collect(),
        imag: gram
            .iter()
            .map(|r| r.iter().map(|c| c.im).collect())
            .collect(),
        max_diagonal_deviation: diag,
        max_off_diagonal: off,
    })
}

/// Analytic and captured |ψ⁺|², |φ⁺|² images plus the LG Gram matrix.
pub fn cmd_modes(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let bench = Bench::new(config)?;
    let report = gram_report(config)?;
    let (psi_ccd, phi_ccd) = bench.capture_bases(&config.noise)?;
    let maxval = config.noise.max_count();

    let mut out = OutputSet::create(&config.output_dir)?;
    out.write(
        "psi_analytic.pgm",
        &map_to_pgm(&bench.psi_intensity, maxval).encode(),
    )?;
    out.write(
        "phi_analytic.pgm",
        &map_to_pgm(&bench.phi_intensity, maxval).encode(),
    )?;
    write_capture(&mut out, "psi_ccd", &psi_ccd)?;
    write_capture(&mut out, "phi_ccd", &phi_ccd)?;
    out.write("gram.json", &to_json_pretty(&report)?)?;
    Ok(out.commit())
}

/// Mean of the captured frames, rounded back to counts.
fn averaged_frame(frames: &[CCDImage<f64>]) -> Result<CCDImage<f64>> {
    if frames.len() == 1 {
        return Ok(frames[0].clone());
    }
    let first = &frames[0];
    let k = frames.len() as f64;
    let counts = (0..first.counts().len())
        .map(|i| {
            let sum: f64 = frames.iter().map(|f| f64::from(f.counts()[i])).sum();
            (sum / k).round() as u16
        })
        .collect();
    CCDImage::from_counts(*first.grid(), counts, first.metadata.clone())
}

/// Full pipeline; writes the basis captures, the measured, expected and
/// recovered profiles, then `record.jsonl`.
pub fn cmd_run(config: &ExperimentConfig) -> Result<(RunRecord, Vec<PathBuf>)> {
    config.validate()?;
    let bench = Bench::new(config)?;
    let outcome = run_experiment(config, &bench)?;
    let files = write_run(config, &outcome)?;
    Ok((outcome.record, files))
}

fn write_run(config: &ExperimentConfig, outcome: &RunOutcome) -> Result<Vec<PathBuf>> {
    let maxval = config.noise.max_count();
    let mut out = OutputSet::create(&config.output_dir)?;
    write_capture(&mut out, "basis_psi", &outcome.basis_psi)?;
    write_capture(&mut out, "basis_phi", &outcome.basis_phi)?;
    write_capture(&mut out, "measured", &averaged_frame(&outcome.frames)?)?;
    out.write(
        "expected.pgm",
        &map_to_pgm(&outcome.expected, maxval).encode(),
    )?;
    out.write(
        "recovered.pgm",
        &map_to_pgm(&outcome.recovered, maxval).encode(),
    )?;
    out.write("record.jsonl", &to_json_line(&outcome.record)?)?;
    Ok(out.commit())
}

/// One sweep row; failed rows keep their coordinates and carry the error.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub required_discord: f64,
    pub seed: u64,
    pub outcome: std::result::Result<RunRecord, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepValueSummary {
    pub required_discord: f64,
    pub runs: usize,
    pub failures: usize,
    pub mean_abs_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepFailure {
    pub required_discord: f64,
    pub seed: u64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub seeds: Vec<u64>,
    pub per_value: Vec<SweepValueSummary>,
    /// Mean |D_measured − D_required| over every successful row.
    pub overall_mean_abs_error: Option<f64>,
    pub failures: Vec<SweepFailure>,
}

/// Runs every (value, seed) pair; rows are ordered by (required_discord, seed).
pub fn sweep_rows(
    config: &ExperimentConfig,
    values: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidInput(
            "sweep needs at least one discord value".into(),
        ));
    }
    if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidInput(format!(
            "discord value {bad} outside [0, 1]"
        )));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one seed".into()));
    }
    config.validate()?;
    let bench = Bench::new(config)?;
    let mut rows = Vec::with_capacity(values.len() * seeds.len());
    for &d in values {
        for &seed in seeds {
            let mut row_config = config.with_target_discord(d);
            row_config.noise.seed = seed;
            let outcome = run_experiment(&row_config, &bench)
                .map(|o| o.record)
                .map_err(|e| e.to_string());
            rows.push(SweepRow {
                required_discord: d,
                seed,
                outcome,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.required_discord
            .total_cmp(&b.required_discord)
            .then(a.seed.cmp(&b.seed))
    });
    Ok(rows)
}

pub fn sweep_summary(rows: &[SweepRow]) -> SweepSummary {
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let mut per_value: Vec<SweepValueSummary> = Vec::new();
    let mut all_errors = Vec::new();
    for row in rows {
        if per_value.last().map(|v| v.required_discord) != Some(row.required_discord) {
            per_value.push(SweepValueSummary {
                required_discord: row.required_discord,
                runs: 0,
                failures: 0,
                mean_abs_error: None,
            });
        }
        let entry = per_value.last_mut().expect("just pushed");
        entry.runs += 1;
        match &row.outcome {
            Ok(rec) => {
                let err = (rec.discord_measured - row.required_discord).abs();
                let done = (entry.runs - entry.failures - 1) as f64;
                let prev = entry.mean_abs_error.unwrap_or(0.0);
                entry.mean_abs_error = Some((prev * done + err) / (done + 1.0));
                all_errors.push(err);
            }
            Err(_) => entry.failures += 1,
        }
    }
    let failures = rows
        .iter()
        .filter_map(|r| {
            r.outcome.as_ref().err().map(|e| SweepFailure {
                required_discord: r.required_discord,
                seed: r.seed,
                error: e.clone(),
            })
        })
        .collect();
    SweepSummary {
        seeds,
        per_value,
        overall_mean_abs_error: if all_errors.is_empty() {
            None
        } else {
            Some(all_errors.iter().sum::<f64>() / all_errors.len() as f64)
        },
        failures,
    }
}

/// CSV with the fixed header; failed rows leave the measured columns empty.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv encoding failed: {e}"));
    w.write_record(SWEEP_CSV_HEADER.split(','))
        .map_err(csv_err)?;
    for row in rows {
        let fields = match &row.outcome {
            Ok(r) => [
                row.required_discord.to_string(),
                r.lambda0_set.to_string(),
                r.lambda0_rec.to_string(),
                r.discord_measured.to_string(),
                r.residual.to_string(),
                row.seed.to_string(),
            ],
            Err(_) => [
                row.required_discord.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                row.seed.to_string(),
            ],
        };
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv encoding failed: {e}")))
}

/// Writes `sweep.csv` and `sweep_summary.json`.
pub fn cmd_sweep(
    config: &ExperimentConfig,
    values: &[f64],
    seeds: &[u64],
) -> Result<(SweepSummary, Vec<PathBuf>)> {
    let rows = sweep_rows(config, values, seeds)?;
    let summary = sweep_summary(&rows);
    let mut out = OutputSet::create(&config.output_dir)?;
    out.write("sweep.csv", &sweep_csv(&rows)?)?;
    out.write("sweep_summary.json", &to_json_pretty(&summary)?)?;
    Ok((summary, out.commit()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub lambda0_rec: f64,
    pub lambda1_rec: f64,
    pub residual: f64,
    pub discord_measured: f64,
}

/// Recovery from three image files on disk.
pub fn cmd_recover(measured: &Path, basis_psi: &Path, basis_phi: &Path) -> Result<RecoveryReport> {
    let m = read_capture(measured)?;
    let p = read_capture(basis_psi)?;
    let q = read_capture(basis_phi)?;
    for (path, img) in [(basis_psi, &p), (basis_phi, &q)] {
        if img.grid().n() != m.grid().n() {
            return Err(Error::ShapeMismatch(format!(
                "{} is {}x{}, measured image is {}x{}",
                path.display(),
                img.grid().n(),
                img.grid().n(),
                m.grid().n(),
                m.grid().n()
            )));
        }
        if img.grid() != m.grid() {
            return Err(Error::ShapeMismatch(format!(
                "{} was captured on a different grid",
                path.display()
            )));
        }
    }
    let r = recover_fraction(
        &normalize_image(&m)?,
        &normalize_image(&p)?,
        &normalize_image(&q)?,
    )?;
    Ok(RecoveryReport {
        lambda0_rec: r.lambda0_rec,
        lambda1_rec: r.lambda1_rec,
        residual: r.residual,
        discord_measured: r.discord_measured.value(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub analytic: f64,
    pub oracle: f64,
    pub abs_diff: f64,
}

pub fn cmd_oracle(lambdas: [f64; 4], grid_n: usize) -> Result<OracleReport> {
    let s = BellSpectrum::from_array(lambdas)?;
    let analytic = analytic_discord(&s).value();
    let oracle = oracle_discord(&s, grid_n)?.value();
    Ok(OracleReport {
        analytic,
        oracle,
        abs_diff: (analytic - oracle).abs(),
    })
}
