//! Experiment configuration documents and the shipped presets.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::distribution::Profile;
use crate::error::{Error, Result};
use crate::noise::{JsBaseline, Mode};
use crate::preference::{factorial, MAX_ALTERNATIVES};
use crate::qmr::QmrParams;
use crate::qmr2::{BlockKind, InvalidPolicy, Qmr2Config, Tally, VoterBlockSpec};

pub const DEFAULT_GRID: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const DEFAULT_SHOT_GRID: [usize; 6] = [50, 100, 500, 1000, 5000, 10_000];
pub const EXP1_SEED: u64 = 0x5EED_0001;
pub const EXP2_SEED: u64 = 0x5EED_0002;
pub const QMR2_SEED: u64 = 0x5EED_0003;

/// A noisy sweep over one voter profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub m: usize,
    /// One probability vector over the `m!` rankings per voter.
    pub profile: Vec<Vec<f64>>,
    #[serde(default)]
    pub qmr: QmrParams,
    pub noise_grid: Vec<f64>,
    #[serde(default = "default_shot_grid")]
    pub shot_grid: Vec<usize>,
    pub shots: usize,
    pub runs: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub invalid_policy: InvalidPolicy,
    #[serde(default)]
    pub js_baseline: JsBaseline,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_shot_grid() -> Vec<usize> {
    DEFAULT_SHOT_GRID.to_vec()
}

fn point_masses(m: usize, rankings: &[usize]) -> Vec<Vec<f64>> {
    rankings
        .iter()
        .map(|&r| {
            let mut v = vec![0.0; factorial(m)];
            v[r] = 1.0;
            v
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses a JSON document; errors carry the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ALTERNATIVES).contains(&self.m) {
            return Err(Error::config(
                "m",
                format!("must be in 1..={MAX_ALTERNATIVES}, got {}", self.m),
            ));
        }
        self.build_profile()?;
        if self.noise_grid.is_empty() {
            return Err(Error::config("noise_grid", "grid is empty"));
        }
        for (i, p) in self.noise_grid.iter().enumerate() {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::config(
                    format!("noise_grid[{i}]"),
                    format!("{p} is outside [0, 1]"),
                ));
            }
        }
        if let Some(i) = self.shot_grid.iter().position(|&s| s == 0) {
            return Err(Error::config(format!("shot_grid[{i}]"), "must be at least 1"));
        }
        if self.shots == 0 {
            return Err(Error::config("shots", "must be at least 1"));
        }
        if self.runs < 2 {
            return Err(Error::config("runs", "flip rates need at least 2 runs"));
        }
        if !(self.qmr.delta >= 0.0 && self.qmr.delta <= 1.0) {
            return Err(Error::config("qmr.delta", format!("{} is outside [0, 1]", self.qmr.delta)));
        }
        if self.qmr.epsilon.is_nan() || self.qmr.epsilon < 0.0 {
            return Err(Error::config("qmr.epsilon", format!("{} is negative", self.qmr.epsilon)));
        }
        Ok(())
    }

    pub fn build_profile(&self) -> Result<Profile> {
        Profile::from_vectors(self.m, self.profile.clone()).map_err(|e| match e {
            Error::Unnormalized { context, sum } => {
                Error::config(context, format!("probabilities sum to {sum}, expected 1"))
            }
            Error::InvalidProbability {
                context,
                index,
                value,
            } => Error::config(format!("{context}[{index}]"), format!("{value} is outside [0, 1]")),
            Error::DimensionMismatch { expected, found } => Error::config(
                "profile",
                format!("each voter needs {expected} probabilities, found {found}"),
            ),
            Error::EmptyInput(_) => Error::config("profile", "at least one voter is required"),
            other => other,
        })
    }
}

fn preset(name: &str, rankings: &[usize], seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        m: 3,
        profile: point_masses(3, rankings),
        qmr: QmrParams::with_delta(0.0),
        noise_grid: DEFAULT_GRID.to_vec(),
        shot_grid: default_shot_grid(),
        shots: 500,
        runs: 100,
        mode: Mode::Profile,
        invalid_policy: InvalidPolicy::Discard,
        js_baseline: JsBaseline::Pooled,
        seed,
        output_dir: None,
    }
}

/// Five voters with point masses on ACB, BAC, BCA, CAB, CBA.
pub fn preset_experiment_1() -> ExperimentConfig {
    preset("exp1", &[1, 2, 3, 4, 5], EXP1_SEED)
}

/// Two voters on ABC, two on ACB, one on BAC.
pub fn preset_experiment_2() -> ExperimentConfig {
    preset("exp2", &[0, 0, 1, 1, 2], EXP2_SEED)
}

/// Few shots and few runs, as on a shared device.
pub fn hardware_like(mut base: ExperimentConfig) -> ExperimentConfig {
    base.name = format!("{}-hardware", base.name);
    base.shots = 50;
    base.runs = 10;
    base
}

pub const QMR2_NOISE_LEVELS: [f64; 4] = [0.0, 0.1, 0.3, 0.5];

/// Named testbed scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qmr2Scenario {
    pub name: String,
    pub config: Qmr2Config,
}

/// GHZ, separable, random and 1:1 mixed populations at every noise level,
/// with `k` matched voters (and `k` random ones in the mixed scenarios).
pub fn preset_qmr2_scenarios(k: usize, iterations: usize, seed: u64) -> Vec<Qmr2Scenario> {
    let block = |kind| VoterBlockSpec {
        kind,
        size: k,
        base_ranking: 0,
    };
    let populations: [(&str, Vec<VoterBlockSpec>); 5] = [
        ("ghz", vec![block(BlockKind::Ghz)]),
        ("separable", vec![block(BlockKind::Separable)]),
        ("random", vec![block(BlockKind::Random)]),
        ("ghz_mixed", vec![block(BlockKind::Ghz), block(BlockKind::Random)]),
        ("separable_mixed", vec![block(BlockKind::Separable), block(BlockKind::Random)]),
    ];
    let mut out = Vec::new();
    for (name, blocks) in populations {
        for (j, &p) in QMR2_NOISE_LEVELS.iter().enumerate() {
            out.push(Qmr2Scenario {
                name: format!("{name}_p{p}"),
                config: Qmr2Config {
                    m: 3,
                    blocks: blocks.clone(),
                    iterations,
                    bitflip_p: p,
                    invalid_policy: InvalidPolicy::Discard,
                    tally: Tally::Ranking,
                    seed: crate::rng::derive_seed(seed, crate::rng::TAG_QMR2, j as u64),
                },
            });
        }
    }
    out
}
