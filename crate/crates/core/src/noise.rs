//! Shot-based emulation of the measurement stage under symmetric readout
//! noise.
//!
//! In `Profile` mode every shot reads one ballot register per voter through
//! the noisy channel; the empirical per-voter frequencies are then aggregated
//! with [`qmr_aggregate`]. In `Societal` mode shots are drawn from the
//! analytic societal distribution and read through a single noisy register.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::CondorcetOutcome;
use crate::distribution::{Profile, RankingDistribution};
use crate::error::{Error, Result};
use crate::metrics::js_divergence;
use crate::preference::{factorial, QubitLabel, RankingIndex};
use crate::qmr::{distribution_digraph, qmr_aggregate, tarjan_scc, winner_from_distribution, QmrParams};
use crate::qmr2::{apply_bitflip, decode_with_policy, InvalidPolicy};
use crate::rng::{derived_rng, TAG_BASELINE, TAG_NOISY};

/// Re-draw budget per voter and shot in profile mode.
pub const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Societal,
    #[default]
    Profile,
}

/// Distribution each run is compared against for the JS metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsBaseline {
    /// Mean of all noiseless baseline runs of the batch.
    #[default]
    Pooled,
    /// Noiseless run with the same run index.
    Paired,
    /// Exact societal distribution.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub readout_p: f64,
    pub invalid_policy: InvalidPolicy,
    pub mode: Mode,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.readout_p) {
            return Err(Error::Domain(format!(
                "readout_p must be in [0, 1], got {}",
                self.readout_p
            )));
        }
        Ok(())
    }
}

/// Empirical distribution of one run plus the share of discarded reads.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub empirical: RankingDistribution,
    pub discard_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub shots: usize,
    pub empirical: RankingDistribution,
    pub winner: CondorcetOutcome,
    pub scc_summary: Vec<usize>,
    pub js_vs_baseline: f64,
    pub discard_fraction: f64,
}

fn read_register<R: Rng + ?Sized>(r: usize, m: usize, noise: &NoiseConfig, rng: &mut R) -> Option<usize> {
    let label = apply_bitflip(QubitLabel::from_index(RankingIndex(r), m), noise.readout_p, rng);
    decode_with_policy(label, noise.invalid_policy, m).map(|i| i.0)
}

fn sampler(d: &RankingDistribution) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(d.probs()).map_err(|e| Error::Degenerate(e.to_string()))
}

/// Samples the societal register `shots` times through the noisy readout.
pub fn sample_societal<R: Rng + ?Sized>(
    rho_soc: &RankingDistribution,
    shots: usize,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Sample> {
    noise.validate()?;
    let m = rho_soc.m();
    let draw = sampler(rho_soc)?;
    let mut counts = vec![0u64; factorial(m)];
    let mut discarded = 0usize;
    for _ in 0..shots {
        let r = draw.sample(rng);
        match read_register(r, m, noise, rng) {
            Some(i) => counts[i] += 1,
            None => discarded += 1,
        }
    }
    Ok(Sample {
        empirical: RankingDistribution::from_counts(m, &counts)?,
        discard_fraction: discarded as f64 / shots.max(1) as f64,
    })
}

/// Samples every voter register per shot, then aggregates the empirical profile.
pub fn sample_profile<R: Rng + ?Sized>(
    profile: &Profile,
    shots: usize,
    noise: &NoiseConfig,
    rng: &mut R,
    qmr_params: &QmrParams,
) -> Result<Sample> {
    let (empirical_profile, discard_fraction) = sample_profile_counts(profile, shots, noise, rng)?;
    Ok(Sample {
        empirical: qmr_aggregate(&empirical_profile, qmr_params)?,
        discard_fraction,
    })
}

/// The empirical per-voter profile behind [`sample_profile`].
pub fn sample_profile_counts<R: Rng + ?Sized>(
    profile: &Profile,
    shots: usize,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<(Profile, f64)> {
    noise.validate()?;
    if shots == 0 {
        return Err(Error::EmptySample);
    }
    let m = profile.m();
    let draws = profile
        .voters()
        .iter()
        .map(sampler)
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![vec![0u64; factorial(m)]; profile.n()];
    let mut reads = 0usize;
    let mut discarded = 0usize;
    for _ in 0..shots {
        for (voter, draw) in draws.iter().enumerate() {
            let mut attempts = 0;
            loop {
                if attempts == MAX_REDRAWS {
                    return Err(Error::RedrawLimit {
                        voter,
                        attempts,
                    });
                }
                attempts += 1;
                reads += 1;
                let r = draw.sample(rng);
                match read_register(r, m, noise, rng) {
                    Some(i) => {
                        counts[voter][i] += 1;
                        break;
                    }
                    None => discarded += 1,
                }
            }
        }
    }
    let voters = counts
        .iter()
        .map(|c| RankingDistribution::from_counts(m, c))
        .collect::<Result<Vec<_>>>()?;
    Ok((Profile::new(m, voters)?, discarded as f64 / reads as f64))
}

/// Noisy runs and their paired noiseless baseline runs.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub noisy: Vec<RunRecord>,
    pub baseline: Vec<RunRecord>,
    /// Distribution the JS column of the noisy runs was measured against
    /// (for `Paired` this is the pooled baseline, kept for reference).
    pub baseline_distribution: RankingDistribution,
}

impl BatchResult {
    pub fn winners(&self) -> Vec<Option<crate::preference::Alternative>> {
        self.noisy.iter().map(|r| r.winner.winner).collect()
    }

    pub fn baseline_winners(&self) -> Vec<Option<crate::preference::Alternative>> {
        self.baseline.iter().map(|r| r.winner.winner).collect()
    }
}

fn one_run(
    profile: &Profile,
    rho_soc: Option<&RankingDistribution>,
    shots: usize,
    noise: &NoiseConfig,
    qmr_params: &QmrParams,
    tag: u64,
    run_index: usize,
) -> Result<RunRecord> {
    let mut rng = derived_rng(noise.seed, tag, run_index as u64);
    let sample = match (noise.mode, rho_soc) {
        (Mode::Societal, Some(rho)) => sample_societal(rho, shots, noise, &mut rng)?,
        _ => sample_profile(profile, shots, noise, &mut rng, qmr_params)?,
    };
    let graph = distribution_digraph(&sample.empirical, qmr_params.epsilon)?;
    Ok(RunRecord {
        run_index,
        shots,
        winner: winner_from_distribution(&sample.empirical),
        scc_summary: tarjan_scc(graph.adjacency()).sizes(),
        empirical: sample.empirical,
        js_vs_baseline: 0.0,
        discard_fraction: sample.discard_fraction,
    })
}

fn mean_distribution(records: &[RunRecord]) -> Result<RankingDistribution> {
    let m = records[0].empirical.m();
    let mut acc = vec![0.0; factorial(m)];
    for r in records {
        for (a, x) in acc.iter_mut().zip(r.empirical.probs()) {
            *a += x;
        }
    }
    RankingDistribution::from_weights(m, acc)
}

/// Runs `runs` noisy and `runs` noiseless emulations, each on its own RNG
/// stream, and fills in the JS column against the chosen baseline.
pub fn run_batch(
    profile: &Profile,
    shots: usize,
    runs: usize,
    noise: &NoiseConfig,
    qmr_params: &QmrParams,
    js_baseline: JsBaseline,
) -> Result<BatchResult> {
    noise.validate()?;
    if runs < 2 {
        return Err(Error::Bound {
            what: "runs per batch",
            value: runs,
            min: 2,
            max: usize::MAX,
        });
    }
    if shots == 0 {
        return Err(Error::Bound {
            what: "shots",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let needs_analytic = noise.mode == Mode::Societal || js_baseline == JsBaseline::Analytic;
    let rho_soc = if needs_analytic {
        Some(qmr_aggregate(profile, qmr_params)?)
    } else {
        None
    };
    let clean = NoiseConfig {
        readout_p: 0.0,
        ..*noise
    };
    let jobs: Vec<(bool, usize)> = (0..runs)
        .map(|i| (true, i))
        .chain((0..runs).map(|i| (false, i)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(is_noisy, i)| {
            if is_noisy {
                one_run(profile, rho_soc.as_ref(), shots, noise, qmr_params, TAG_NOISY, i)
            } else {
                one_run(profile, rho_soc.as_ref(), shots, &clean, qmr_params, TAG_BASELINE, i)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut baseline = records.split_off(runs);
    let mut noisy = records;

    let pooled = mean_distribution(&baseline)?;
    for (i, rec) in noisy.iter_mut().enumerate() {
        let reference = match js_baseline {
            JsBaseline::Pooled => &pooled,
            JsBaseline::Paired => &baseline[i].empirical,
            JsBaseline::Analytic => rho_soc.as_ref().expect("analytic baseline computed"),
        };
        rec.js_vs_baseline = js_divergence(&rec.empirical, reference)?;
    }
    for rec in baseline.iter_mut() {
        let reference = match js_baseline {
            JsBaseline::Analytic => rho_soc.as_ref().expect("analytic baseline computed"),
            _ => &pooled,
        };
        rec.js_vs_baseline = js_divergence(&rec.empirical, reference)?;
    }
    let baseline_distribution = match js_baseline {
        JsBaseline::Analytic => rho_soc.expect("analytic baseline computed"),
        _ => pooled,
    };
    Ok(BatchResult {
        noisy,
        baseline,
        baseline_distribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn noise(p: f64, policy: InvalidPolicy, mode: Mode) -> NoiseConfig {
        NoiseConfig {
            readout_p: p,
            invalid_policy: policy,
            mode,
            seed: 11,
        }
    }

    #[test]
    fn noiseless_societal_is_multinomial() {
        let rho = RankingDistribution::new(3, vec![0.1, 0.2, 0.3, 0.15, 0.05, 0.2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = sample_societal(&rho, 100_000, &noise(0.0, InvalidPolicy::Discard, Mode::Societal), &mut rng).unwrap();
        assert!(s.empirical.total_variation(&rho) < 0.01);
        assert_eq!(s.discard_fraction, 0.0);
    }

    #[test]
    fn point_mass_readout_survival() {
        let rho = RankingDistribution::point_mass(3, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = 0.2;
        let s = sample_societal(&rho, 100_000, &noise(p, InvalidPolicy::Modulo, Mode::Societal), &mut rng).unwrap();
        // 000 survives w.p. (1-p)^3; 110 also maps to 0 under modulo
        let expect = (1.0 - p).powi(3) + p * p * (1.0 - p);
        let sigma = (expect * (1.0 - expect) / 1e5).sqrt();
        assert!((s.empirical.get(0) - expect).abs() < 4.0 * sigma);
    }

    #[test]
    fn all_discarded_is_empty_sample() {
        // ACB = 001 always reads as 110 at p = 1
        let rho = RankingDistribution::point_mass(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = sample_societal(&rho, 10, &noise(1.0, InvalidPolicy::Discard, Mode::Societal), &mut rng).unwrap_err();
        assert!(matches!(err, Error::EmptySample));
    }

    #[test]
    fn redraw_limit() {
        let p = Profile::deterministic(3, &[4, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = sample_profile_counts(&p, 3, &noise(1.0, InvalidPolicy::Discard, Mode::Profile), &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::RedrawLimit { voter: 1, attempts: MAX_REDRAWS }));
    }

    #[test]
    fn noiseless_profile_matches_aggregate_of_empirical() {
        let p = Profile::from_vectors(
            3,
            vec![
                vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                vec![0.2, 0.0, 0.0, 0.0, 0.0, 0.8],
            ],
        )
        .unwrap();
        let cfg = noise(0.0, InvalidPolicy::Discard, Mode::Profile);
        let params = QmrParams::default();
        let (emp, frac) = sample_profile_counts(&p, 500, &cfg, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let s = sample_profile(&p, 500, &cfg, &mut ChaCha8Rng::seed_from_u64(2), &params).unwrap();
        assert_eq!(frac, 0.0);
        assert_eq!(s.empirical, qmr_aggregate(&emp, &params).unwrap());
    }

    #[test]
    fn batch_shape_and_noiseless_baseline() {
        let p = Profile::deterministic(3, &[1, 2, 3, 4, 5]).unwrap();
        let params = QmrParams::with_delta(0.0);
        let cfg = noise(0.05, InvalidPolicy::Discard, Mode::Profile);
        let b = run_batch(&p, 50, 4, &cfg, &params, JsBaseline::Pooled).unwrap();
        assert_eq!(b.noisy.len(), 4);
        assert_eq!(b.baseline.len(), 4);
        for (i, r) in b.baseline.iter().enumerate() {
            assert_eq!(r.run_index, i);
            assert_eq!(r.winner, CondorcetOutcome::of(2));
            assert_eq!(r.js_vs_baseline, 0.0);
        }
        assert!(run_batch(&p, 50, 1, &cfg, &params, JsBaseline::Pooled).is_err());
    }
}
