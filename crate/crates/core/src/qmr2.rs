//! Entanglement testbed: voter blocks that are GHZ-correlated, separable or
//! uniformly random, read out through a bit-flip channel and decided by a
//! mini-round plurality where ties are recorded as draws.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{Profile, RankingDistribution};
use crate::error::{Error, Result};
use crate::preference::{alternative_label, factorial, QubitLabel, RankingIndex, RankingSpace, MAX_ALTERNATIVES};
use crate::qmr::MAX_SUPPORT_PRODUCT;
use crate::rng::{derived_rng, TAG_QMR2};

/// How a decoded label outside `[0, m!)` is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvalidPolicy {
    /// Drop the ballot.
    #[default]
    Discard,
    /// Wrap the label value modulo `m!`.
    Modulo,
    /// Closest valid label in Hamming distance, lowest index on ties.
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Ghz,
    Separable,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterBlockSpec {
    pub kind: BlockKind,
    pub size: usize,
    /// Lehmer index of `L`; ignored by random blocks.
    #[serde(default)]
    pub base_ranking: usize,
}

/// Granularity of the mini-round vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tally {
    #[default]
    Ranking,
    TopCandidate,
}

/// Winning outcome of a mini round, or a draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MiniRoundOutcome {
    Winner(usize),
    Draw,
}

impl MiniRoundOutcome {
    /// Outcome index with the draw sentinel `-1`.
    pub fn value(self) -> i64 {
        match self {
            MiniRoundOutcome::Winner(i) => i as i64,
            MiniRoundOutcome::Draw => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Qmr2Config {
    pub m: usize,
    pub blocks: Vec<VoterBlockSpec>,
    pub iterations: usize,
    #[serde(default)]
    pub bitflip_p: f64,
    #[serde(default)]
    pub invalid_policy: InvalidPolicy,
    #[serde(default)]
    pub tally: Tally,
    pub seed: u64,
}

impl Qmr2Config {
    pub fn voters(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ALTERNATIVES).contains(&self.m) {
            return Err(Error::config(
                "m",
                format!("must be in 1..={MAX_ALTERNATIVES}, got {}", self.m),
            ));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.bitflip_p) {
            return Err(Error::config(
                "bitflip_p",
                format!("must be in [0, 1], got {}", self.bitflip_p),
            ));
        }
        if self.blocks.is_empty() {
            return Err(Error::config("blocks", "at least one voter block is required"));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.size == 0 {
                return Err(Error::config(format!("blocks[{i}].size"), "must be at least 1"));
            }
            if b.base_ranking >= factorial(self.m) {
                return Err(Error::config(
                    format!("blocks[{i}].base_ranking"),
                    format!("{} is not a ranking index for m = {}", b.base_ranking, self.m),
                ));
            }
        }
        Ok(())
    }
}

/// Draws one ballot per voter of the block.
pub fn sample_block<R: Rng + ?Sized>(spec: &VoterBlockSpec, m: usize, rng: &mut R) -> Vec<RankingIndex> {
    let space = RankingSpace::get(m);
    let base = spec.base_ranking;
    let flipped = space.reverse_index(base);
    match spec.kind {
        BlockKind::Ghz => {
            let r = if rng.gen_bool(0.5) { base } else { flipped };
            vec![RankingIndex(r); spec.size]
        }
        BlockKind::Separable => (0..spec.size)
            .map(|_| RankingIndex(if rng.gen_bool(0.5) { base } else { flipped }))
            .collect(),
        BlockKind::Random => (0..spec.size)
            .map(|_| RankingIndex(rng.gen_range(0..space.len())))
            .collect(),
    }
}

/// Flips each bit of `label` independently with probability `p`.
pub fn apply_bitflip<R: Rng + ?Sized>(label: QubitLabel, p: f64, rng: &mut R) -> QubitLabel {
    if p <= 0.0 {
        return label;
    }
    let mut out = label;
    for k in 0..label.width() {
        if rng.gen_bool(p) {
            out = out.with_flipped(k);
        }
    }
    out
}

pub fn decode_with_policy(label: QubitLabel, policy: InvalidPolicy, m: usize) -> Option<RankingIndex> {
    let count = factorial(m);
    let value = label.value() as usize;
    if value < count {
        return Some(RankingIndex(value));
    }
    match policy {
        InvalidPolicy::Discard => None,
        InvalidPolicy::Modulo => Some(RankingIndex(value % count)),
        InvalidPolicy::Nearest => (0..count)
            .min_by_key(|&i| label.hamming(QubitLabel::new(i as u32, label.width())))
            .map(RankingIndex),
    }
}

/// Outcome with strictly maximal multiplicity; ties are a draw.
pub fn mini_round_majority(ballots: &[usize]) -> Result<MiniRoundOutcome> {
    if ballots.is_empty() {
        return Err(Error::EmptyInput("mini round needs at least one ballot"));
    }
    let size = ballots.iter().max().map_or(0, |&b| b + 1);
    let mut counts = vec![0usize; size];
    for &b in ballots {
        counts[b] += 1;
    }
    let top = *counts.iter().max().unwrap_or(&0);
    let mut leaders = counts.iter().enumerate().filter(|(_, &c)| c == top);
    let first = leaders.next().map(|(i, _)| i);
    match (first, leaders.next()) {
        (Some(i), None) => Ok(MiniRoundOutcome::Winner(i)),
        _ => Ok(MiniRoundOutcome::Draw),
    }
}

/// Histogram of mini-round outcomes plus discard statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qmr2Histogram {
    pub m: usize,
    pub tally: Tally,
    pub iterations: usize,
    /// Slot 0 holds draws, slot `i + 1` outcome `i`.
    pub counts: Vec<u64>,
    /// Rounds in which every ballot was discarded (also counted as draws).
    pub all_discarded: u64,
    pub ballots_total: u64,
    pub ballots_discarded: u64,
}

/// One row of the QMR2 histogram CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qmr2Row {
    pub outcome_index: i64,
    pub label: String,
    pub count: u64,
    pub frequency: f64,
}

impl Qmr2Histogram {
    fn empty(m: usize, tally: Tally, outcomes: usize) -> Self {
        Qmr2Histogram {
            m,
            tally,
            iterations: 0,
            counts: vec![0; outcomes + 1],
            all_discarded: 0,
            ballots_total: 0,
            ballots_discarded: 0,
        }
    }

    fn merge(mut self, other: Qmr2Histogram) -> Self {
        self.iterations += other.iterations;
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.all_discarded += other.all_discarded;
        self.ballots_total += other.ballots_total;
        self.ballots_discarded += other.ballots_discarded;
        self
    }

    pub fn draws(&self) -> u64 {
        self.counts[0]
    }

    pub fn count(&self, outcome: usize) -> u64 {
        self.counts[outcome + 1]
    }

    pub fn outcomes(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn frequency(&self, outcome: MiniRoundOutcome) -> f64 {
        let c = match outcome {
            MiniRoundOutcome::Draw => self.draws(),
            MiniRoundOutcome::Winner(i) => self.count(i),
        };
        c as f64 / self.iterations as f64
    }

    pub fn discard_fraction(&self) -> f64 {
        if self.ballots_total == 0 {
            0.0
        } else {
            self.ballots_discarded as f64 / self.ballots_total as f64
        }
    }

    fn outcome_label(&self, i: usize) -> String {
        match self.tally {
            Tally::Ranking => RankingSpace::get(self.m).label(i),
            Tally::TopCandidate => alternative_label(i).to_string(),
        }
    }

    pub fn rows(&self) -> Vec<Qmr2Row> {
        let n = self.iterations as f64;
        let mut rows = vec![Qmr2Row {
            outcome_index: -1,
            label: "draw".to_string(),
            count: self.draws(),
            frequency: self.draws() as f64 / n,
        }];
        rows.extend((0..self.outcomes()).map(|i| Qmr2Row {
            outcome_index: i as i64,
            label: self.outcome_label(i),
            count: self.count(i),
            frequency: self.count(i) as f64 / n,
        }));
        rows
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in self.rows() {
            out.serialize(row).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn run_iteration(config: &Qmr2Config, iteration: usize, ballots: &mut Vec<usize>) -> (MiniRoundOutcome, u64, u64) {
    let m = config.m;
    let space = RankingSpace::get(m);
    let mut rng = derived_rng(config.seed, TAG_QMR2, iteration as u64);
    ballots.clear();
    let mut total = 0;
    let mut discarded = 0;
    for block in &config.blocks {
        for r in sample_block(block, m, &mut rng) {
            total += 1;
            let noisy = apply_bitflip(QubitLabel::from_index(r, m), config.bitflip_p, &mut rng);
            match decode_with_policy(noisy, config.invalid_policy, m) {
                Some(RankingIndex(i)) => ballots.push(match config.tally {
                    Tally::Ranking => i,
                    Tally::TopCandidate => space.ranking(i).top().0,
                }),
                None => discarded += 1,
            }
        }
    }
    let outcome = mini_round_majority(ballots).unwrap_or(MiniRoundOutcome::Draw);
    (outcome, total, discarded)
}

/// Runs all iterations of the testbed. Each iteration has its own RNG stream,
/// so the histogram does not depend on the thread count.
pub fn run_qmr2(config: &Qmr2Config) -> Result<Qmr2Histogram> {
    config.validate()?;
    let outcomes = match config.tally {
        Tally::Ranking => factorial(config.m),
        Tally::TopCandidate => config.m,
    };
    let hist = (0..config.iterations)
        .into_par_iter()
        .fold(
            || (Qmr2Histogram::empty(config.m, config.tally, outcomes), Vec::new()),
            |(mut h, mut ballots), it| {
                let (outcome, total, discarded) = run_iteration(config, it, &mut ballots);
                h.iterations += 1;
                h.ballots_total += total;
                h.ballots_discarded += discarded;
                if ballots.is_empty() {
                    h.all_discarded += 1;
                }
                match outcome {
                    MiniRoundOutcome::Draw => h.counts[0] += 1,
                    MiniRoundOutcome::Winner(i) => h.counts[i + 1] += 1,
                }
                (h, ballots)
            },
        )
        .map(|(h, _)| h)
        .reduce(|| Qmr2Histogram::empty(config.m, config.tally, outcomes), Qmr2Histogram::merge);
    Ok(hist)
}

/// Plurality over realized profiles with ties split uniformly, weighted by
/// the product probability of each profile.
pub fn qmr2_constitution_analytic(profile: &Profile) -> Result<RankingDistribution> {
    let product = profile.support_product();
    if product > MAX_SUPPORT_PRODUCT {
        return Err(Error::CapExceeded {
            what: "profile support product",
            size: product,
            cap: MAX_SUPPORT_PRODUCT,
            hint: "prune low-probability rankings from voter supports",
        });
    }
    let m = profile.m();
    let count = factorial(m);
    let supports: Vec<Vec<usize>> = profile.voters().iter().map(|v| v.support()).collect();
    let mut acc = vec![0.0; count];
    let mut tally = vec![0usize; count];
    let mut cursor = vec![0usize; supports.len()];
    loop {
        tally.iter_mut().for_each(|t| *t = 0);
        let mut weight = 1.0;
        for (voter, &c) in cursor.iter().enumerate() {
            let r = supports[voter][c];
            weight *= profile.voter(voter).get(r);
            tally[r] += 1;
        }
        let top = *tally.iter().max().unwrap_or(&0);
        let leaders = tally.iter().filter(|&&t| t == top).count() as f64;
        for (a, &t) in acc.iter_mut().zip(&tally) {
            if t == top {
                *a += weight / leaders;
            }
        }
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

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decode_examples() {
        let six = QubitLabel::new(6, 3);
        let seven = QubitLabel::new(7, 3);
        assert_eq!(decode_with_policy(six, InvalidPolicy::Modulo, 3), Some(RankingIndex(0)));
        assert_eq!(decode_with_policy(six, InvalidPolicy::Discard, 3), None);
        assert_eq!(decode_with_policy(seven, InvalidPolicy::Nearest, 3), Some(RankingIndex(3)));
        assert_eq!(decode_with_policy(six, InvalidPolicy::Nearest, 3), Some(RankingIndex(2)));
        assert_eq!(decode_with_policy(QubitLabel::new(4, 3), InvalidPolicy::Discard, 3), Some(RankingIndex(4)));
    }

    #[test]
    fn bitflip_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = QubitLabel::new(0b101, 3);
        assert_eq!(apply_bitflip(l, 0.0, &mut rng), l);
        assert_eq!(apply_bitflip(l, 1.0, &mut rng).value(), 0b010);
    }

    #[test]
    fn majority_examples() {
        assert_eq!(mini_round_majority(&[0, 0, 5]).unwrap(), MiniRoundOutcome::Winner(0));
        assert_eq!(mini_round_majority(&[0, 5]).unwrap(), MiniRoundOutcome::Draw);
        assert_eq!(mini_round_majority(&[0, 0, 5, 5]).unwrap(), MiniRoundOutcome::Draw);
        assert_eq!(MiniRoundOutcome::Draw.value(), -1);
        assert!(mini_round_majority(&[]).is_err());
    }

    #[test]
    fn ghz_blocks_are_unanimous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = VoterBlockSpec {
            kind: BlockKind::Ghz,
            size: 5,
            base_ranking: 0,
        };
        for _ in 0..200 {
            let s = sample_block(&spec, 3, &mut rng);
            assert!(s.iter().all(|&r| r == s[0]));
            assert!(s[0] == RankingIndex(0) || s[0] == RankingIndex(5));
        }
    }

    #[test]
    fn analytic_examples() {
        let p = Profile::deterministic(3, &[0, 0, 0]).unwrap();
        assert_eq!(qmr2_constitution_analytic(&p).unwrap(), RankingDistribution::point_mass(3, 0).unwrap());
        let p = Profile::deterministic(3, &[0, 0, 5]).unwrap();
        assert_eq!(qmr2_constitution_analytic(&p).unwrap(), RankingDistribution::point_mass(3, 0).unwrap());
        let half = vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.5];
        let p = Profile::from_vectors(3, vec![half.clone(), half]).unwrap();
        let d = qmr2_constitution_analytic(&p).unwrap();
        assert!((d.get(0) - 0.5).abs() < 1e-15 && (d.get(5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn all_discarded_rounds_are_draws() {
        // every bit flips: ACB (001) reads as 110 and is dropped, its
        // reverse BCA (011) reads as 100 = CAB
        let cfg = Qmr2Config {
            m: 3,
            blocks: vec![VoterBlockSpec {
                kind: BlockKind::Ghz,
                size: 3,
                base_ranking: 1,
            }],
            iterations: 50,
            bitflip_p: 1.0,
            invalid_policy: InvalidPolicy::Discard,
            tally: Tally::Ranking,
            seed: 9,
        };
        let h = run_qmr2(&cfg).unwrap();
        assert_eq!(h.draws(), h.all_discarded);
        assert_eq!(h.draws() + h.count(4), 50);
    }

    #[test]
    fn config_validation() {
        let mut cfg = Qmr2Config {
            m: 3,
            blocks: vec![],
            iterations: 1,
            bitflip_p: 0.0,
            invalid_policy: InvalidPolicy::Discard,
            tally: Tally::Ranking,
            seed: 0,
        };
        assert!(cfg.validate().unwrap_err().to_string().contains("blocks"));
        cfg.blocks.push(VoterBlockSpec {
            kind: BlockKind::Random,
            size: 1,
            base_ranking: 6,
        });
        assert!(cfg.validate().unwrap_err().to_string().contains("blocks[0].base_ranking"));
    }
}
