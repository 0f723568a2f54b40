use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmrlab::classical::{condorcet_winner, pairwise_expectations};
use qmrlab::experiment::{
    self, preset_experiment_1, preset_experiment_2, preset_qmr2_scenarios, ExperimentConfig, Qmr2Scenario,
    QMR2_SEED,
};
use qmrlab::preference::{alternative_label, RankingSpace};
use qmrlab::qmr::{qmr_aggregate, winner_from_distribution};
use qmrlab::qmr2::Qmr2Config;
use qmrlab::{Error, Result};

#[derive(Parser)]
#[command(name = "qmrlab", version, about = "Quantum majority rule voting experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config document
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides QMRLAB_OUT and the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Built-in configuration used when no --config is given
    #[arg(long, global = true, value_enum)]
    preset: Option<Preset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Exp1,
    Exp2,
    Qmr2,
}

#[derive(Subcommand)]
enum Command {
    /// Expected pairwise tallies and the classical Condorcet winner
    Classical,
    /// Quantum majority rule: analytic distribution and noisy sweeps
    #[command(subcommand)]
    Qmr(QmrCommand),
    /// Entangled-voter mini-round testbed
    #[command(subcommand)]
    Qmr2(Qmr2Command),
    /// Recompute metrics.csv from runs.jsonl in the output directory
    Report,
}

#[derive(Subcommand)]
enum QmrCommand {
    /// Exact societal distribution and its winner
    Analytic,
    /// Noisy sweep over the config's noise grid
    Sweep,
    /// Winner agreement as a function of shot count
    Shots {
        /// Comma-separated shot counts; defaults to the config's shot grid
        #[arg(long, value_delimiter = ',')]
        shots: Option<Vec<usize>>,
    },
}

#[derive(Subcommand)]
enum Qmr2Command {
    /// Run a testbed config, or every preset scenario
    Run {
        /// Voters per matched block in the preset scenarios
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::from)
}

fn experiment_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match (&common.config, common.preset) {
        (Some(path), _) => ExperimentConfig::from_json(&read(path)?)?,
        (None, Some(Preset::Exp2)) => preset_experiment_2(),
        (None, Some(Preset::Qmr2)) => {
            return Err(Error::config("preset", "qmr2 is a testbed preset; use `qmr2 run`"))
        }
        (None, _) => preset_experiment_1(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, config: Option<&Path>, default: &str) -> PathBuf {
    experiment::resolve_output_dir(common.out.clone(), config, default)
}

fn classical(common: &Common) -> Result<()> {
    let cfg = experiment_config(common)?;
    let tally = pairwise_expectations(&cfg.build_profile()?)?;
    for a in 0..cfg.m {
        for b in 0..cfg.m {
            if a != b {
                println!(
                    "E[{} > {}] = {}",
                    alternative_label(a),
                    alternative_label(b),
                    tally.expected(a, b)
                );
            }
        }
    }
    println!("winner: {}", condorcet_winner(&tally).label());
    Ok(())
}

fn analytic(common: &Common) -> Result<()> {
    let cfg = experiment_config(common)?;
    let rho = qmr_aggregate(&cfg.build_profile()?, &cfg.qmr)?;
    let space = RankingSpace::get(cfg.m);
    for (r, p) in rho.probs().iter().enumerate() {
        println!("{} {:>6} {p}", r, space.label(r));
    }
    println!("winner: {}", winner_from_distribution(&rho).label());
    Ok(())
}

fn sweep(common: &Common) -> Result<()> {
    let cfg = experiment_config(common)?;
    let out = out_dir(common, cfg.output_dir.as_deref(), "out");
    let report = experiment::run_sweep(&cfg, &out)?;
    println!("reference winner: {}", report.reference.label());
    println!("noise_p gamma_win flip_rate_norm js_mean");
    for row in &report.rows {
        println!(
            "{:<7} {:<9.3} {:<14.3} {:.4}",
            row.noise_p, row.gamma_win, row.flip_rate_norm, row.js_mean
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn shots(common: &Common, grid: Option<Vec<usize>>) -> Result<()> {
    let cfg = experiment_config(common)?;
    let grid = grid.unwrap_or_else(|| cfg.shot_grid.clone());
    let out = out_dir(common, cfg.output_dir.as_deref(), "out");
    let cells = experiment::run_shot_convergence(&cfg, &grid, &out)?;
    for c in &cells {
        println!("shots={} p={} gamma_win={:.3}", c.shots, c.noise_p, c.gamma_win);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn qmr2(common: &Common, k: usize, iterations: usize) -> Result<()> {
    let scenarios = match &common.config {
        Some(path) => {
            let text = read(path)?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let mut config: Qmr2Config = serde_path_to_error::deserialize(de)
                .map_err(|e| Error::Config {
                    path: e.path().to_string(),
                    message: e.inner().to_string(),
                })?;
            if let Some(seed) = common.seed {
                config.seed = seed;
            }
            let name = path
                .file_stem()
                .map_or_else(|| "config".to_string(), |s| s.to_string_lossy().into_owned());
            vec![Qmr2Scenario { name, config }]
        }
        None => preset_qmr2_scenarios(k, iterations, common.seed.unwrap_or(QMR2_SEED)),
    };
    let out = out_dir(common, None, "out");
    for r in experiment::run_qmr2_scenarios(&scenarios, &out)? {
        let h = &r.histogram;
        println!(
            "{:<22} draws={:<6} discard_fraction={:.3}",
            r.name,
            h.draws(),
            h.discard_fraction()
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn report(common: &Common) -> Result<()> {
    let out = out_dir(common, None, "out");
    let rows = experiment::report(&out)?;
    let path = out.join(experiment::METRICS_FILE);
    experiment::write_metrics(&rows, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classical => classical(&cli.common),
        Command::Qmr(QmrCommand::Analytic) => analytic(&cli.common),
        Command::Qmr(QmrCommand::Sweep) => sweep(&cli.common),
        Command::Qmr(QmrCommand::Shots { shots: grid }) => shots(&cli.common, grid),
        Command::Qmr2(Qmr2Command::Run { k, iterations }) => qmr2(&cli.common, k, iterations),
        Command::Report => report(&cli.common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
