//! Sweeps, shot-convergence studies and testbed scenarios, with their
//! on-disk artifacts: `metrics.csv`, `runs.jsonl` and `manifest.json`.

mod config;

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{
    hardware_like, preset_experiment_1, preset_experiment_2, preset_qmr2_scenarios, ExperimentConfig,
    Qmr2Scenario, DEFAULT_GRID, DEFAULT_SHOT_GRID, EXP1_SEED, EXP2_SEED, QMR2_NOISE_LEVELS, QMR2_SEED,
};

use crate::classical::{condorcet_winner, pairwise_expectations, CondorcetOutcome};
use crate::error::{Error, Result};
use crate::metrics::{flip_rate_normalized, winner_agreement, MetricsSummary};
use crate::noise::{run_batch, BatchResult, NoiseConfig, RunRecord};
use crate::qmr2::{csv_error, run_qmr2, Qmr2Histogram};
use crate::rng::{derive_seed, TAG_GRID};

pub const METRICS_FILE: &str = "metrics.csv";
pub const RUNS_FILE: &str = "runs.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SHOTS_FILE: &str = "shot_convergence.csv";

/// Batch a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatchKind {
    Noisy,
    Baseline,
}

/// One line of `runs.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLine {
    pub grid_index: usize,
    pub noise_p: f64,
    pub batch: BatchKind,
    #[serde(flatten)]
    pub record: RunRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub started: String,
    pub finished: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub reference: CondorcetOutcome,
    pub rows: Vec<MetricsSummary>,
    pub batches: Vec<BatchResult>,
}

fn noise_for(config: &ExperimentConfig, p: f64, cell: u64) -> NoiseConfig {
    NoiseConfig {
        readout_p: p,
        invalid_policy: config.invalid_policy,
        mode: config.mode,
        seed: derive_seed(config.seed, TAG_GRID, cell),
    }
}

/// Condorcet winner of the classical expected tallies.
pub fn classical_reference(config: &ExperimentConfig) -> Result<CondorcetOutcome> {
    Ok(condorcet_winner(&pairwise_expectations(&config.build_profile()?)?))
}

pub fn summarize(
    batch: &BatchResult,
    reference: CondorcetOutcome,
    noise_p: f64,
    shots: usize,
) -> Result<MetricsSummary> {
    let winners = batch.winners();
    let flips = flip_rate_normalized(&winners, &batch.baseline_winners())?;
    let js_mean = batch.noisy.iter().map(|r| r.js_vs_baseline).sum::<f64>() / batch.noisy.len() as f64;
    Ok(MetricsSummary {
        noise_p,
        gamma_win: winner_agreement(&winners, reference.winner)?,
        gamma_run: flips.gamma_run,
        gamma_0: flips.gamma_0,
        flip_rate_norm: flips.flip_rate_norm,
        js_mean,
        n: batch.noisy.len(),
        shots,
    })
}

/// Runs one batch per grid point without touching the filesystem.
pub fn compute_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    let profile = config.build_profile()?;
    let reference = classical_reference(config)?;
    let mut rows = Vec::with_capacity(config.noise_grid.len());
    let mut batches = Vec::with_capacity(config.noise_grid.len());
    for (g, &p) in config.noise_grid.iter().enumerate() {
        let noise = noise_for(config, p, g as u64);
        let batch = run_batch(&profile, config.shots, config.runs, &noise, &config.qmr, config.js_baseline)?;
        rows.push(summarize(&batch, reference, p, config.shots)?);
        batches.push(batch);
    }
    Ok(SweepReport {
        reference,
        rows,
        batches,
    })
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn write_manifest(dir: &Path, command: &str, config: &impl Serialize, files: &[&str], started: String) -> Result<()> {
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config: serde_json::to_value(config)?,
        files: files.iter().map(|f| f.to_string()).collect(),
        started,
        finished: now(),
    };
    let mut f = BufWriter::new(File::create(dir.join(MANIFEST_FILE))?);
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

/// Runs the sweep and writes `metrics.csv`, `runs.jsonl` and `manifest.json`
/// into `out`.
pub fn run_sweep(config: &ExperimentConfig, out: &Path) -> Result<SweepReport> {
    let started = now();
    let report = compute_sweep(config)?;
    fs::create_dir_all(out)?;
    write_rows(&out.join(METRICS_FILE), &report.rows)?;
    let mut runs = BufWriter::new(File::create(out.join(RUNS_FILE))?);
    for (g, batch) in report.batches.iter().enumerate() {
        let p = config.noise_grid[g];
        let lines = batch
            .noisy
            .iter()
            .map(|r| (BatchKind::Noisy, r))
            .chain(batch.baseline.iter().map(|r| (BatchKind::Baseline, r)));
        for (kind, record) in lines {
            let line = RunLine {
                grid_index: g,
                noise_p: p,
                batch: kind,
                record: record.clone(),
            };
            serde_json::to_writer(&mut runs, &line)?;
            runs.write_all(b"\n")?;
        }
    }
    runs.flush()?;
    write_manifest(out, "qmr sweep", config, &[METRICS_FILE, RUNS_FILE], started)?;
    Ok(report)
}

/// One cell of the shot-convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotCell {
    pub shots: usize,
    pub noise_p: f64,
    pub gamma_win: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

/// Winner agreement for every (shots, noise) pair.
pub fn compute_shot_convergence(config: &ExperimentConfig, shot_grid: &[usize]) -> Result<Vec<ShotCell>> {
    config.validate()?;
    if shot_grid.is_empty() {
        return Err(Error::config("shot_grid", "grid is empty"));
    }
    if let Some(i) = shot_grid.iter().position(|&s| s == 0) {
        return Err(Error::config(format!("shot_grid[{i}]"), "must be at least 1"));
    }
    let profile = config.build_profile()?;
    let reference = classical_reference(config)?;
    let mut cells = Vec::new();
    for (si, &shots) in shot_grid.iter().enumerate() {
        for (g, &p) in config.noise_grid.iter().enumerate() {
            let cell = (si * config.noise_grid.len() + g) as u64;
            let noise = noise_for(config, p, cell);
            let batch = run_batch(&profile, shots, config.runs, &noise, &config.qmr, config.js_baseline)?;
            cells.push(ShotCell {
                shots,
                noise_p: p,
                gamma_win: winner_agreement(&batch.winners(), reference.winner)?,
                n: config.runs,
            });
        }
    }
    Ok(cells)
}

pub fn run_shot_convergence(config: &ExperimentConfig, shot_grid: &[usize], out: &Path) -> Result<Vec<ShotCell>> {
    let started = now();
    let cells = compute_shot_convergence(config, shot_grid)?;
    fs::create_dir_all(out)?;
    write_rows(&out.join(SHOTS_FILE), &cells)?;
    write_manifest(out, "qmr shots", config, &[SHOTS_FILE], started)?;
    Ok(cells)
}

/// Histogram of one testbed scenario together with its name.
#[derive(Debug, Clone, PartialEq)]
pub struct Qmr2Report {
    pub name: String,
    pub histogram: Qmr2Histogram,
}

/// Runs every scenario and writes `qmr2_<name>.csv` per scenario.
pub fn run_qmr2_scenarios(scenarios: &[Qmr2Scenario], out: &Path) -> Result<Vec<Qmr2Report>> {
    let started = now();
    if scenarios.is_empty() {
        return Err(Error::config("scenarios", "no scenarios given"));
    }
    for (i, s) in scenarios.iter().enumerate() {
        s.config.validate().map_err(|e| match e {
            Error::Config { path, message } => Error::config(format!("scenarios[{i}].{path}"), message),
            other => other,
        })?;
    }
    let reports = scenarios
        .iter()
        .map(|s| {
            Ok(Qmr2Report {
                name: s.name.clone(),
                histogram: run_qmr2(&s.config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    for r in &reports {
        let name = format!("qmr2_{}.csv", r.name);
        r.histogram.write_csv(BufWriter::new(File::create(out.join(&name))?))?;
        files.push(name);
    }
    let names: Vec<&str> = files.iter().map(String::as_str).collect();
    write_manifest(out, "qmr2 run", &scenarios, &names, started)?;
    Ok(reports)
}

/// Rebuilds the metrics rows of a sweep directory from `runs.jsonl` and the
/// config echoed in `manifest.json`.
pub fn report(dir: &Path) -> Result<Vec<MetricsSummary>> {
    let manifest: RunManifest = serde_json::from_reader(BufReader::new(File::open(dir.join(MANIFEST_FILE))?))?;
    let config: ExperimentConfig = serde_json::from_value(manifest.config)?;
    let reference = classical_reference(&config)?;
    let mut noisy: Vec<Vec<RunRecord>> = vec![Vec::new(); config.noise_grid.len()];
    let mut baseline: Vec<Vec<RunRecord>> = vec![Vec::new(); config.noise_grid.len()];
    for (n, line) in BufReader::new(File::open(dir.join(RUNS_FILE))?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let run: RunLine = serde_json::from_str(&line)
            .map_err(|e| Error::config(format!("{RUNS_FILE}:{}", n + 1), e.to_string()))?;
        if run.grid_index >= config.noise_grid.len() {
            return Err(Error::config(
                format!("{RUNS_FILE}:{}", n + 1),
                format!("grid index {} out of range", run.grid_index),
            ));
        }
        match run.batch {
            BatchKind::Noisy => noisy[run.grid_index].push(run.record),
            BatchKind::Baseline => baseline[run.grid_index].push(run.record),
        }
    }
    let mut rows = Vec::new();
    for (g, (mut n, mut b)) in noisy.into_iter().zip(baseline).enumerate() {
        n.sort_by_key(|r| r.run_index);
        b.sort_by_key(|r| r.run_index);
        let shots = n.first().map_or(config.shots, |r| r.shots);
        let batch = BatchResult {
            baseline_distribution: crate::distribution::RankingDistribution::uniform(config.m)?,
            noisy: n,
            baseline: b,
        };
        rows.push(summarize(&batch, reference, config.noise_grid[g], shots)?);
    }
    Ok(rows)
}

/// Writes re-reduced rows to `path` as CSV.
pub fn write_metrics(rows: &[MetricsSummary], path: &Path) -> Result<()> {
    write_rows(path, rows)
}

/// Resolves the output directory: explicit flag, then `QMRLAB_OUT`, then the
/// config value, then `default`.
pub fn resolve_output_dir(flag: Option<PathBuf>, config: Option<&Path>, default: &str) -> PathBuf {
    flag.or_else(|| std::env::var_os("QMRLAB_OUT").map(PathBuf::from))
        .or_else(|| config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(default))
}
