//! Epsilon-aware majority digraphs.

use serde::{Deserialize, Serialize};

use crate::distribution::RankingDistribution;
use crate::error::{Error, Result};
use crate::preference::RankingSpace;
use crate::quantum::pair_probability;

use super::ClassicalProfile;

/// Plain boolean adjacency matrix over `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency {
    n: usize,
    edges: Vec<bool>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency {
            n,
            edges: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = Adjacency::empty(n);
        for &(a, b) in edges {
            adj.set(a, b, true);
        }
        adj
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges[a * self.n + b]
    }

    pub fn set(&mut self, a: usize, b: usize, on: bool) {
        self.edges[a * self.n + b] = on;
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&b| self.has_edge(a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorityDigraph {
    m: usize,
    margins: Vec<f64>,
    adjacency: Adjacency,
    epsilon: f64,
}

impl MajorityDigraph {
    /// `margins[a * m + b]` is the support for `a` over `b` (a count, or a
    /// probability in probabilistic mode).
    pub fn from_margins(m: usize, margins: Vec<f64>, epsilon: f64) -> Result<Self> {
        if margins.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: margins.len(),
            });
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        let mut adjacency = Adjacency::empty(m);
        for a in 0..m {
            for b in 0..m {
                if a != b && margins[a * m + b] >= margins[b * m + a] - epsilon {
                    adjacency.set(a, b, true);
                }
            }
        }
        Ok(MajorityDigraph {
            m,
            margins,
            adjacency,
            epsilon,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn margin(&self, a: usize, b: usize) -> f64 {
        self.margins[a * self.m + b]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.has_edge(a, b)
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

pub fn build_majority_digraph(p: &ClassicalProfile, epsilon: f64) -> Result<MajorityDigraph> {
    let m = p.m();
    let space = RankingSpace::get(m);
    let mut margins = vec![0.0; m * m];
    for &r in p.rankings() {
        for a in 0..m {
            for b in 0..m {
                if a != b && space.prefers(r, a, b) {
                    margins[a * m + b] += 1.0;
                }
            }
        }
    }
    MajorityDigraph::from_margins(m, margins, epsilon)
}

/// Digraph over the pair probabilities of a societal distribution.
pub fn distribution_digraph(d: &RankingDistribution, epsilon: f64) -> Result<MajorityDigraph> {
    let m = d.m();
    let mut margins = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                margins[a * m + b] = pair_probability(d, a, b)?;
            }
        }
    }
    MajorityDigraph::from_margins(m, margins, epsilon)
}
