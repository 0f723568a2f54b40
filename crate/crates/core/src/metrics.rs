//! Stability metrics for batches of noisy runs: winner agreement, the
//! normalized flip rate of the winner between adjacent runs, and the mean
//! Jensen-Shannon divergence against a baseline distribution.

use serde::{Deserialize, Serialize};

use crate::distribution::RankingDistribution;
use crate::error::{Error, Result};
use crate::preference::Alternative;

/// Fraction of runs whose winner equals `reference`; an absent winner
/// matches an absent reference.
pub fn winner_agreement(
    winners: &[Option<Alternative>],
    reference: Option<Alternative>,
) -> Result<f64> {
    if winners.is_empty() {
        return Err(Error::EmptyInput("winner agreement needs at least one run"));
    }
    let hits = winners.iter().filter(|&&w| w == reference).count();
    Ok(hits as f64 / winners.len() as f64)
}

/// Raw and normalized flip rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipRates {
    pub gamma_run: f64,
    pub gamma_0: f64,
    pub flip_rate_norm: f64,
}

fn raw_flip_rate(winners: &[Option<Alternative>]) -> f64 {
    let flips = winners.windows(2).filter(|w| w[0] != w[1]).count();
    flips as f64 / (winners.len() - 1) as f64
}

/// Flip rates of the noisy batch and its noiseless baseline, normalized with
/// pseudo-count `1/N`.
pub fn flip_rate_normalized(
    winners: &[Option<Alternative>],
    baseline_winners: &[Option<Alternative>],
) -> Result<FlipRates> {
    let n = winners.len();
    if n < 2 {
        return Err(Error::Bound {
            what: "flip rate run count",
            value: n,
            min: 2,
            max: usize::MAX,
        });
    }
    if baseline_winners.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: baseline_winners.len(),
        });
    }
    let gamma_run = raw_flip_rate(winners);
    let gamma_0 = raw_flip_rate(baseline_winners);
    let eps_pc = 1.0 / n as f64;
    let flip_rate_norm = if gamma_0 == 0.0 {
        gamma_run / eps_pc
    } else {
        gamma_run / (gamma_0 + eps_pc)
    };
    Ok(FlipRates {
        gamma_run,
        gamma_0,
        flip_rate_norm,
    })
}

fn entropy2(p: impl Iterator<Item = f64>) -> f64 {
    -p.filter(|&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// Base-2 Jensen-Shannon divergence, in `[0, 1]`.
pub fn js_divergence(p: &RankingDistribution, q: &RankingDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mid = entropy2(p.probs().iter().zip(q.probs()).map(|(a, b)| 0.5 * (a + b)));
    let js = mid - 0.5 * (entropy2(p.probs().iter().copied()) + entropy2(q.probs().iter().copied()));
    Ok(js.clamp(0.0, 1.0))
}

pub fn js_batch_mean(runs: &[RankingDistribution], baseline: &RankingDistribution) -> Result<f64> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("JS batch mean needs at least one run"));
    }
    let mut total = 0.0;
    for r in runs {
        total += js_divergence(r, baseline)?;
    }
    Ok(total / runs.len() as f64)
}

/// One row of `metrics.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub noise_p: f64,
    pub gamma_win: f64,
    pub gamma_run: f64,
    pub gamma_0: f64,
    pub flip_rate_norm: f64,
    pub js_mean: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub shots: usize,
}
