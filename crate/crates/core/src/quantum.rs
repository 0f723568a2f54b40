//! Small density-operator utilities: the quantum-profile and dephasing maps,
//! pair-preference probabilities, and the quantum unanimity / IIA checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distribution::{Profile, RankingDistribution, CLAMP_TOL, NORM_TOL};
use crate::error::{Error, Result};
use crate::preference::{factorial, RankingSpace, MAX_ALTERNATIVES};

/// Tolerance for Hermiticity, trace and eigenvalue checks.
pub const STATE_TOL: f64 = 1e-9;
/// Largest joint dimension accepted by [`partial_trace_voter`].
pub const MAX_JOINT_DIM: usize = 4096;
/// "Equals one" threshold for sharp axiom conditions.
pub const SHARP_TOL: f64 = 1e-9;
/// "Greater than zero" threshold for unsharp axiom conditions.
pub const UNSHARP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim || dim == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "matrix is {}x{}, expected square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let mut herm_err: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                herm_err = herm_err.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
            }
        }
        if herm_err > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix { entries })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::new(entries)
    }

    /// `|psi><psi|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| amplitudes[i] * amplitudes[j].conj());
        Self::new(entries)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(d: &RankingDistribution) -> Self {
        let dim = d.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(d.get(i), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        DensityMatrix { entries }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let entries = DMatrix::<Complex64>::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        DensityMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            entries: self.entries.kronecker(&other.entries),
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Indicator of the rankings with `a` above `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairProjector {
    pub pair: (usize, usize),
    pub mask: Vec<bool>,
}

impl PairProjector {
    pub fn new(m: usize, a: usize, b: usize) -> Result<Self> {
        check_pair(m, a, b)?;
        let space = RankingSpace::get(m);
        let mask = (0..space.len()).map(|r| space.prefers(r, a, b)).collect();
        Ok(PairProjector { pair: (a, b), mask })
    }

    pub fn rank(&self) -> usize {
        self.mask.iter().filter(|&&x| x).count()
    }
}

fn check_pair(m: usize, a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::Domain(format!(
            "pair ({a}, {b}) must name distinct alternatives"
        )));
    }
    if a >= m || b >= m {
        return Err(Error::Domain(format!(
            "pair ({a}, {b}) out of range for m = {m}"
        )));
    }
    Ok(())
}

fn m_for_dim(dim: usize) -> Result<usize> {
    (1..=MAX_ALTERNATIVES)
        .find(|&m| factorial(m) == dim)
        .ok_or_else(|| Error::InvalidDensityMatrix(format!("dimension {dim} is not m! for m <= 6")))
}

/// Reduced state of voter `keep` (0-based) from a joint state over `n` voters.
pub fn partial_trace_voter(
    sigma: &DensityMatrix,
    keep: usize,
    m: usize,
    n: usize,
) -> Result<DensityMatrix> {
    let d = factorial(m);
    let joint = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if joint > MAX_JOINT_DIM as u128 {
        return Err(Error::CapExceeded {
            what: "joint density matrix dimension",
            size: joint,
            cap: MAX_JOINT_DIM as u128,
            hint: "use per-voter distributions instead of a full joint state",
        });
    }
    if sigma.dim() != joint as usize {
        return Err(Error::DimensionMismatch {
            expected: joint as usize,
            found: sigma.dim(),
        });
    }
    if keep >= n {
        return Err(Error::Domain(format!("voter {keep} out of range for n = {n}")));
    }
    // joint index = high * d^(n-keep) + i * stride + low
    let stride = d.pow((n - 1 - keep) as u32);
    let highs = d.pow(keep as u32);
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for high in 0..highs {
        for low in 0..stride {
            let base = high * d * stride + low;
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += sigma.entries[(base + i * stride, base + j * stride)];
                }
            }
        }
    }
    Ok(DensityMatrix { entries: out })
}

/// Diagonal of `rho` in the preference basis.
pub fn dephase(rho: &DensityMatrix) -> Result<RankingDistribution> {
    let m = m_for_dim(rho.dim())?;
    let mut probs = Vec::with_capacity(rho.dim());
    for i in 0..rho.dim() {
        let z = rho.entry(i, i);
        if z.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "diagonal entry {i} has imaginary part {}",
                z.im
            )));
        }
        probs.push(if z.re < 0.0 && z.re >= -CLAMP_TOL { 0.0 } else { z.re });
    }
    RankingDistribution::new(m, probs)
}

/// Probability that `a` is ranked above `b` under `d`.
pub fn pair_probability(d: &RankingDistribution, a: usize, b: usize) -> Result<f64> {
    check_pair(d.m(), a, b)?;
    let space = d.space();
    Ok(d
        .probs()
        .iter()
        .enumerate()
        .filter(|(r, _)| space.prefers(*r, a, b))
        .map(|(_, p)| p)
        .sum())
}

/// Result of a sharp/unsharp axiom check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub sharp: bool,
    pub unsharp: bool,
}

impl AxiomCheck {
    pub fn holds(self) -> bool {
        self.sharp && self.unsharp
    }
}

fn ordered_pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..m).flat_map(move |a| (0..m).filter(move |&b| b != a).map(move |b| (a, b)))
}

pub fn check_quantum_unanimity(
    profile: &Profile,
    rho_soc: &RankingDistribution,
) -> Result<AxiomCheck> {
    let m = profile.m();
    if rho_soc.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: rho_soc.m(),
        });
    }
    let mut check = AxiomCheck {
        sharp: true,
        unsharp: true,
    };
    for (a, b) in ordered_pairs(m) {
        let voter_probs = profile
            .voters()
            .iter()
            .map(|v| pair_probability(v, a, b))
            .collect::<Result<Vec<_>>>()?;
        let soc = pair_probability(rho_soc, a, b)?;
        if voter_probs.iter().all(|&p| p >= 1.0 - SHARP_TOL) && soc < 1.0 - SHARP_TOL {
            check.sharp = false;
        }
        if voter_probs.iter().all(|&p| p > UNSHARP_TOL) && soc <= UNSHARP_TOL {
            check.unsharp = false;
        }
    }
    Ok(check)
}

/// Quantum IIA over every pair on which the two profiles agree voter by voter.
pub fn check_qiia(
    profile1: &Profile,
    rho1: &RankingDistribution,
    profile2: &Profile,
    rho2: &RankingDistribution,
) -> Result<AxiomCheck> {
    let m = profile1.m();
    for found in [profile2.m(), rho1.m(), rho2.m()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    if profile1.n() != profile2.n() {
        return Err(Error::DimensionMismatch {
            expected: profile1.n(),
            found: profile2.n(),
        });
    }
    let mut check = AxiomCheck {
        sharp: true,
        unsharp: true,
    };
    for (a, b) in ordered_pairs(m) {
        let mut agree = true;
        for (v1, v2) in profile1.voters().iter().zip(profile2.voters()) {
            let same_ab = (pair_probability(v1, a, b)? - pair_probability(v2, a, b)?).abs();
            let same_ba = (pair_probability(v1, b, a)? - pair_probability(v2, b, a)?).abs();
            if same_ab > NORM_TOL || same_ba > NORM_TOL {
                agree = false;
                break;
            }
        }
        if !agree {
            continue;
        }
        let s1 = pair_probability(rho1, a, b)?;
        let s2 = pair_probability(rho2, a, b)?;
        if s1 >= 1.0 - SHARP_TOL && s2 < 1.0 - SHARP_TOL {
            check.sharp = false;
        }
        if s1 > UNSHARP_TOL && s2 <= UNSHARP_TOL {
            check.unsharp = false;
        }
    }
    Ok(check)
}
