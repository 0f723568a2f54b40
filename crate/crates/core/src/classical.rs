//! Classical baseline: expected pairwise tallies over probabilistic ballots
//! and the probabilistic Condorcet winner.

use serde::{Deserialize, Serialize};

use crate::distribution::{Profile, NORM_TOL};
use crate::error::Result;
use crate::preference::Alternative;
use crate::quantum::pair_probability;

/// Tie threshold on expected tallies: `|E(a>b) - E(b>a)| <= TIE_TOL` means neither beats.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTally {
    m: usize,
    n: usize,
    expected: Vec<f64>,
}

impl PairwiseTally {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Expected number of voters ranking `a` above `b`.
    pub fn expected(&self, a: usize, b: usize) -> f64 {
        self.expected[a * self.m + b]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.expected.chunks(self.m).map(|r| r.to_vec()).collect()
    }

    /// `a` beats `b` strictly.
    pub fn beats(&self, a: usize, b: usize) -> bool {
        self.expected(a, b) - self.expected(b, a) > TIE_TOL
    }
}

/// Result of a Condorcet check; `winner: None` means no unique winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CondorcetOutcome {
    pub winner: Option<Alternative>,
}

impl CondorcetOutcome {
    pub fn none() -> Self {
        CondorcetOutcome { winner: None }
    }

    pub fn of(a: usize) -> Self {
        CondorcetOutcome {
            winner: Some(Alternative(a)),
        }
    }

    /// `"A"`, `"B"`, ... or `"none"`.
    pub fn label(&self) -> String {
        match self.winner {
            Some(a) => a.to_string(),
            None => "none".to_string(),
        }
    }
}

pub fn pairwise_expectations(profile: &Profile) -> Result<PairwiseTally> {
    let m = profile.m();
    let mut expected = vec![0.0; m * m];
    for voter in profile.voters() {
        let sum: f64 = voter.probs().iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(crate::Error::Unnormalized {
                context: "voter distribution".into(),
                sum,
            });
        }
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    expected[a * m + b] += pair_probability(voter, a, b)?;
                }
            }
        }
    }
    Ok(PairwiseTally {
        m,
        n: profile.n(),
        expected,
    })
}

pub fn condorcet_winner(t: &PairwiseTally) -> CondorcetOutcome {
    (0..t.m())
        .find(|&c| (0..t.m()).all(|b| b == c || t.beats(c, b)))
        .map(CondorcetOutcome::of)
        .unwrap_or_else(CondorcetOutcome::none)
}
