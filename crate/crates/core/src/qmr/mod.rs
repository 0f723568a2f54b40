//! The quantum majority rule constitution on dephased profiles.
//!
//! For each realized ballot profile the pipeline builds the majority digraph,
//! condenses it with Tarjan's algorithm, spreads mass uniformly over the
//! linear extensions of the condensation (`chi1`), mixes in weight `delta` for
//! pairwise preferences that some voter holds but `chi1` never shows (GMS),
//! and finally projects out rankings that contradict a unanimous pair (EU).
//! [`qmr_aggregate`] sums these per-profile states weighted by the product
//! probability of the profile.

mod digraph;
mod extensions;
mod scc;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::CondorcetOutcome;
use crate::distribution::{Profile, RankingDistribution, CLAMP_TOL};
use crate::error::{Error, Result};
use crate::preference::{factorial, RankingSpace};
use crate::quantum::pair_probability;

pub use digraph::{build_majority_digraph, distribution_digraph, Adjacency, MajorityDigraph};
pub use extensions::{linear_extensions, MAX_EXTENSION_M};
pub use scc::{tarjan_scc, SccPartition};

/// Largest support product [`qmr_aggregate`] will enumerate.
pub const MAX_SUPPORT_PRODUCT: u128 = 1_000_000;
/// Margin above one half a pair probability needs to count as a win.
pub const WIN_TOL: f64 = 1e-12;

/// Ordered pairs `(a, b)` read as "a above b".
pub type PairSet = Vec<(usize, usize)>;

/// One realized ballot per voter, as Lehmer indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalProfile {
    m: usize,
    rankings: Vec<usize>,
}

impl ClassicalProfile {
    pub fn new(m: usize, rankings: Vec<usize>) -> Result<Self> {
        if rankings.is_empty() {
            return Err(Error::EmptyInput("classical profile needs at least one ballot"));
        }
        let count = factorial(m);
        if let Some(&bad) = rankings.iter().find(|&&r| r >= count) {
            return Err(Error::InvalidLabel {
                value: bad as u32,
                m,
                count,
            });
        }
        Ok(ClassicalProfile { m, rankings })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn rankings(&self) -> &[usize] {
        &self.rankings
    }

    /// Pairs held by at least one voter.
    pub fn supported_pairs(&self) -> Vec<bool> {
        let m = self.m;
        let space = RankingSpace::get(m);
        let mut mask = vec![false; m * m];
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    mask[a * m + b] = self.rankings.iter().any(|&r| space.prefers(r, a, b));
                }
            }
        }
        mask
    }

    /// Pairs held by every voter.
    pub fn unanimous_pairs(&self) -> PairSet {
        let m = self.m;
        let space = RankingSpace::get(m);
        let mut out = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if a != b && self.rankings.iter().all(|&r| space.prefers(r, a, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

impl fmt::Display for ClassicalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let space = RankingSpace::get(self.m);
        let labels: Vec<String> = self.rankings.iter().map(|&r| space.label(r)).collect();
        write!(f, "({})", labels.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmsParameters {
    pub delta: f64,
}

/// Where the GMS step looks for pairwise preferences that "exist".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GmsSupport {
    /// Ballots of the realized profile.
    #[default]
    Profile,
    /// Any voter with non-zero probability on the pair in the dephased state.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QmrParams {
    pub delta: f64,
    pub epsilon: f64,
    pub gms_support: GmsSupport,
}

impl Default for QmrParams {
    fn default() -> Self {
        QmrParams {
            delta: 0.1,
            epsilon: 0.0,
            gms_support: GmsSupport::Profile,
        }
    }
}

impl QmrParams {
    pub fn with_delta(delta: f64) -> Self {
        QmrParams {
            delta,
            ..QmrParams::default()
        }
    }
}

/// Uniform distribution over the linear extensions of the profile's SCC order.
pub fn chi1(p: &ClassicalProfile, epsilon: f64) -> Result<RankingDistribution> {
    let graph = build_majority_digraph(p, epsilon)?;
    let scc = tarjan_scc(graph.adjacency());
    let extensions = linear_extensions(&scc)?;
    let mut probs = vec![0.0; factorial(p.m())];
    let w = 1.0 / extensions.len() as f64;
    for r in extensions {
        probs[r.0] = w;
    }
    RankingDistribution::new(p.m(), probs)
}

/// Give-the-minority-a-shot step using the realized ballots as support.
pub fn gms_step(
    chi1: &RankingDistribution,
    p: &ClassicalProfile,
    params: GmsParameters,
) -> Result<(RankingDistribution, PairSet)> {
    gms_with_support(chi1, &p.supported_pairs(), params, &p.to_string())
}

/// GMS against an explicit `m x m` mask of supported pairs.
pub fn gms_with_support(
    chi1: &RankingDistribution,
    supported: &[bool],
    params: GmsParameters,
    context: &str,
) -> Result<(RankingDistribution, PairSet)> {
    let m = chi1.m();
    if supported.len() != m * m {
        return Err(Error::DimensionMismatch {
            expected: m * m,
            found: supported.len(),
        });
    }
    if params.delta.is_nan() || params.delta < 0.0 {
        return Err(Error::Domain(format!("delta must be >= 0, got {}", params.delta)));
    }
    let mut missing = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if a != b && supported[a * m + b] && pair_probability(chi1, a, b)? <= CLAMP_TOL {
                missing.push((a, b));
            }
        }
    }
    let k = missing.len();
    if params.delta == 0.0 || k == 0 {
        return Ok((chi1.clone(), missing));
    }
    if params.delta * k as f64 > 1.0 + CLAMP_TOL {
        return Err(Error::GmsParameter {
            delta: params.delta,
            k,
            profile: context.to_string(),
        });
    }
    let space = chi1.space();
    let half = (space.len() / 2) as f64;
    let keep = (1.0 - params.delta * k as f64).max(0.0);
    let mut probs: Vec<f64> = chi1.probs().iter().map(|&x| keep * x).collect();
    for &(a, b) in &missing {
        for (r, prob) in probs.iter_mut().enumerate() {
            if space.prefers(r, a, b) {
                *prob += params.delta / half;
            }
        }
    }
    Ok((RankingDistribution::new(m, probs)?, missing))
}

/// Enforce-unanimity step: drop rankings contradicting a unanimous pair and
/// renormalize.
pub fn eu_step(chi2: &RankingDistribution, p: &ClassicalProfile) -> Result<RankingDistribution> {
    let unanimous = p.unanimous_pairs();
    if unanimous.is_empty() {
        return Ok(chi2.clone());
    }
    let space = chi2.space();
    let probs: Vec<f64> = chi2
        .probs()
        .iter()
        .enumerate()
        .map(|(r, &x)| {
            if unanimous.iter().all(|&(a, b)| space.prefers(r, a, b)) {
                x
            } else {
                0.0
            }
        })
        .collect();
    let mass: f64 = probs.iter().sum();
    if mass <= CLAMP_TOL {
        return Err(Error::Degenerate(format!(
            "no mass left after enforcing unanimity for profile {p}"
        )));
    }
    RankingDistribution::new(chi2.m(), probs.into_iter().map(|x| x / mass).collect())
}

/// `EU(GMS(chi1))` for one realized profile.
pub fn chi_soc(p: &ClassicalProfile, params: &QmrParams) -> Result<RankingDistribution> {
    let supported = p.supported_pairs();
    chi_soc_with_support(p, params, &supported)
}

fn chi_soc_with_support(
    p: &ClassicalProfile,
    params: &QmrParams,
    supported: &[bool],
) -> Result<RankingDistribution> {
    let base = chi1(p, params.epsilon)?;
    let (mixed, _) = gms_with_support(
        &base,
        supported,
        GmsParameters {
            delta: params.delta,
        },
        &p.to_string(),
    )?;
    eu_step(&mixed, p)
}

fn global_support(profile: &Profile) -> Result<Vec<bool>> {
    let m = profile.m();
    let mut mask = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                for v in profile.voters() {
                    if pair_probability(v, a, b)? > CLAMP_TOL {
                        mask[a * m + b] = true;
                        break;
                    }
                }
            }
        }
    }
    Ok(mask)
}

/// Societal distribution: the product-weighted sum of per-profile `chi_soc`.
pub fn qmr_aggregate(profile: &Profile, params: &QmrParams) -> Result<RankingDistribution> {
    let product = profile.support_product();
    if product > MAX_SUPPORT_PRODUCT {
        return Err(Error::CapExceeded {
            what: "profile support product",
            size: product,
            cap: MAX_SUPPORT_PRODUCT,
            hint: "prune low-probability rankings from voter supports or use sampling mode",
        });
    }
    let m = profile.m();
    let supports: Vec<Vec<usize>> = profile.voters().iter().map(|v| v.support()).collect();
    let global = match params.gms_support {
        GmsSupport::Global => Some(global_support(profile)?),
        GmsSupport::Profile => None,
    };

    // chi_soc depends only on the multiset of ballots
    let mut cache: HashMap<Vec<u16>, Vec<f64>> = HashMap::new();
    let mut acc = vec![0.0; factorial(m)];
    let mut cursor = vec![0usize; supports.len()];
    let mut key: Vec<u16> = Vec::with_capacity(supports.len());
    loop {
        let mut weight = 1.0;
        key.clear();
        for (voter, &c) in cursor.iter().enumerate() {
            let r = supports[voter][c];
            weight *= profile.voter(voter).get(r);
            key.push(r as u16);
        }
        if weight > 0.0 {
            key.sort_unstable();
            let chi = match cache.get(key.as_slice()) {
                Some(chi) => chi,
                None => {
                    let realized = ClassicalProfile::new(m, key.iter().map(|&r| r as usize).collect())?;
                    let dist = match &global {
                        Some(mask) => chi_soc_with_support(&realized, params, mask)?,
                        None => chi_soc(&realized, params)?,
                    };
                    cache.entry(key.clone()).or_insert_with(|| dist.probs().to_vec())
                }
            };
            for (a, x) in acc.iter_mut().zip(chi) {
                *a += weight * x;
            }
        }
        // odometer over the support product
        let mut voter = cursor.len();
        loop {
            if voter == 0 {
                return RankingDistribution::from_weights(m, acc);
            }
            voter -= 1;
            cursor[voter] += 1;
            if cursor[voter] < supports[voter].len() {
                break;
            }
            cursor[voter] = 0;
        }
    }
}

/// Candidate whose pair probability exceeds one half against every rival.
pub fn winner_from_distribution(d: &RankingDistribution) -> CondorcetOutcome {
    let m = d.m();
    (0..m)
        .find(|&c| {
            (0..m).all(|b| {
                b == c || pair_probability(d, c, b).expect("valid pair") > 0.5 + WIN_TOL
            })
        })
        .map(CondorcetOutcome::of)
        .unwrap_or_else(CondorcetOutcome::none)
}
