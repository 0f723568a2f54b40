//! Quantum majority rule voting toolkit.
//!
//! Rankings of `m` alternatives are indexed lexicographically (Lehmer codes)
//! and encoded as qubit labels. On top of that encoding the crate provides
//! the classical probabilistic Condorcet baseline, the quantum majority rule
//! constitution on dephased profiles, a shot-based readout-noise emulator,
//! stability metrics, and an entanglement testbed with GHZ and separable
//! voter blocks.

pub mod classical;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod noise;
pub mod preference;
pub mod qmr;
pub mod qmr2;
pub mod quantum;
pub mod rng;

pub use classical::{condorcet_winner, pairwise_expectations, CondorcetOutcome, PairwiseTally};
pub use distribution::{Profile, RankingDistribution, VoterDistribution};
pub use error::{Error, Result};
pub use preference::{
    lehmer_decode, lehmer_encode, Alternative, QubitLabel, Ranking, RankingIndex, RankingSpace,
};
pub use qmr::{qmr_aggregate, winner_from_distribution, ClassicalProfile, GmsSupport, QmrParams};
