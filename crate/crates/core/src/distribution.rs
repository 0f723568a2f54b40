//! Probability vectors over the `m!` rankings and n-voter profiles built
//! from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::{factorial, RankingSpace, MAX_ALTERNATIVES};

/// Normalization tolerance for probability vectors.
pub const NORM_TOL: f64 = 1e-9;
/// Entries above `-CLAMP_TOL` are clamped to zero; anything lower is an error.
pub const CLAMP_TOL: f64 = 1e-12;

/// Probability vector over rankings, indexed by Lehmer index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingDistribution {
    m: usize,
    probs: Vec<f64>,
}

/// A single voter's dephased preference state.
pub type VoterDistribution = RankingDistribution;

impl RankingDistribution {
    pub fn new(m: usize, probs: Vec<f64>) -> Result<Self> {
        Self::with_context(m, probs, "ranking distribution")
    }

    pub(crate) fn with_context(m: usize, mut probs: Vec<f64>, context: &str) -> Result<Self> {
        if !(1..=MAX_ALTERNATIVES).contains(&m) {
            return Err(Error::Bound {
                what: "alternative count m",
                value: m,
                min: 1,
                max: MAX_ALTERNATIVES,
            });
        }
        let expected = factorial(m);
        if probs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: probs.len(),
            });
        }
        for (index, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -CLAMP_TOL || *p > 1.0 + NORM_TOL {
                return Err(Error::InvalidProbability {
                    context: context.to_string(),
                    index,
                    value: *p,
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized {
                context: context.to_string(),
                sum,
            });
        }
        Ok(RankingDistribution { m, probs })
    }

    /// Builds a distribution from non-negative weights, dividing by their sum.
    pub fn from_weights(m: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= CLAMP_TOL {
            return Err(Error::Degenerate(format!(
                "weights sum to {total}, cannot normalize"
            )));
        }
        Self::new(m, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn from_counts(m: usize, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptySample);
        }
        Self::new(
            m,
            counts.iter().map(|&c| c as f64 / total as f64).collect(),
        )
    }

    pub fn point_mass(m: usize, index: usize) -> Result<Self> {
        let mut probs = vec![0.0; factorial(m)];
        if index >= probs.len() {
            return Err(Error::InvalidLabel {
                value: index as u32,
                m,
                count: probs.len(),
            });
        }
        probs[index] = 1.0;
        Self::new(m, probs)
    }

    pub fn uniform(m: usize) -> Result<Self> {
        let count = factorial(m);
        Self::new(m, vec![1.0 / count as f64; count])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Indices with probability above `CLAMP_TOL`.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > CLAMP_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn space(&self) -> &'static RankingSpace {
        RankingSpace::get(self.m)
    }

    pub fn total_variation(&self, other: &RankingDistribution) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// Per-voter probability vectors: the dephased profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    m: usize,
    voters: Vec<VoterDistribution>,
}

impl Profile {
    pub fn new(m: usize, voters: Vec<VoterDistribution>) -> Result<Self> {
        if voters.is_empty() {
            return Err(Error::EmptyInput("profile needs at least one voter"));
        }
        for v in &voters {
            if v.m() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: v.m(),
                });
            }
        }
        Ok(Profile { m, voters })
    }

    /// Each voter casts the ranking with the given Lehmer index with certainty.
    pub fn deterministic(m: usize, rankings: &[usize]) -> Result<Self> {
        let voters = rankings
            .iter()
            .map(|&r| RankingDistribution::point_mass(m, r))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(m, voters)
    }

    /// Validates raw per-voter vectors, naming the offending voter on error.
    pub fn from_vectors(m: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let voters = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| RankingDistribution::with_context(m, v, &format!("profile[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(m, voters)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.voters.len()
    }

    pub fn voters(&self) -> &[VoterDistribution] {
        &self.voters
    }

    pub fn voter(&self, i: usize) -> &VoterDistribution {
        &self.voters[i]
    }

    /// Number of joint profiles with non-zero probability.
    pub fn support_product(&self) -> u128 {
        self.voters
            .iter()
            .map(|v| v.support().len() as u128)
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            RankingDistribution::new(3, vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Err(Error::Unnormalized { .. })
        ));
        assert!(matches!(
            RankingDistribution::new(3, vec![1.0; 2]),
            Err(Error::DimensionMismatch { expected: 6, found: 2 })
        ));
    }

    #[test]
    fn clamps_tiny_negatives() {
        let d = RankingDistribution::new(2, vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(d.get(1), 0.0);
        assert!(RankingDistribution::new(2, vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn profile_error_names_voter() {
        let err = Profile::from_vectors(2, vec![vec![1.0, 0.0], vec![0.3, 0.3]]).unwrap_err();
        assert!(err.to_string().contains("profile[1]"), "{err}");
    }

    #[test]
    fn support_product_counts() {
        let p = Profile::from_vectors(2, vec![vec![0.5, 0.5], vec![1.0, 0.0], vec![0.2, 0.8]])
            .unwrap();
        assert_eq!(p.support_product(), 4);
    }
}
