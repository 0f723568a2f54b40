//! Alternatives, strict rankings and the Lehmer-code map between rankings
//! and integer indices.
//!
//! Rankings are numbered lexicographically by their order sequence, so for
//! three alternatives index 0 is `ABC` and index 5 is `CBA`. The same index is
//! the integer value of the ranking's qubit label.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of alternatives this crate enumerates (6! = 720 rankings).
pub const MAX_ALTERNATIVES: usize = 6;

pub fn factorial(m: usize) -> usize {
    (1..=m).product()
}

fn check_m(m: usize) -> Result<()> {
    if (1..=MAX_ALTERNATIVES).contains(&m) {
        Ok(())
    } else {
        Err(Error::Bound {
            what: "alternative count m",
            value: m,
            min: 1,
            max: MAX_ALTERNATIVES,
        })
    }
}

/// One of the `m` options being ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alternative(pub usize);

impl Alternative {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> char {
        alternative_label(self.0)
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

pub fn alternative_label(index: usize) -> char {
    (b'A' + index as u8) as char
}

/// Parses a single-letter alternative label (`"A"`, `"B"`, ...).
pub fn parse_alternative(label: &str, m: usize) -> Result<Alternative> {
    let mut chars = label.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_uppercase() && ((c as u8 - b'A') as usize) < m => {
            Ok(Alternative((c as u8 - b'A') as usize))
        }
        _ => Err(Error::Domain(format!(
            "`{label}` is not an alternative label for m = {m}"
        ))),
    }
}

/// A strict linear order: `order[0]` is the most preferred alternative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        check_m(m)?;
        let mut seen = vec![false; m];
        for &a in &order {
            if a >= m || seen[a] {
                return Err(Error::InvalidRanking(format!(
                    "{order:?} is not a permutation of 0..{m}"
                )));
            }
            seen[a] = true;
        }
        Ok(Ranking { order })
    }

    /// Parses the canonical textual form, e.g. `"ACB"`.
    pub fn parse(text: &str) -> Result<Self> {
        let order = text
            .chars()
            .map(|c| {
                if c.is_ascii_uppercase() {
                    Ok((c as u8 - b'A') as usize)
                } else {
                    Err(Error::InvalidRanking(format!("`{text}`")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ranking::new(order)
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn top(&self) -> Alternative {
        Alternative(self.order[0])
    }

    /// Position of `a` in the order (0 = most preferred).
    pub fn position(&self, a: Alternative) -> usize {
        self.order
            .iter()
            .position(|&x| x == a.0)
            .expect("alternative out of range")
    }

    /// True iff `a` is ranked above `b`.
    pub fn prefers(&self, a: Alternative, b: Alternative) -> Result<bool> {
        if a == b {
            return Err(Error::Domain(format!("prefers({a}, {b}) needs distinct alternatives")));
        }
        if a.0 >= self.m() || b.0 >= self.m() {
            return Err(Error::Domain(format!(
                "alternatives {a}, {b} out of range for m = {}",
                self.m()
            )));
        }
        Ok(self.position(a) < self.position(b))
    }

    /// The reversed order `(a_m, ..., a_1)`.
    pub fn reverse(&self) -> Ranking {
        let mut order = self.order.clone();
        order.reverse();
        Ranking { order }
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &a in &self.order {
            write!(f, "{}", alternative_label(a))?;
        }
        Ok(())
    }
}

/// Lehmer index of a ranking, in `[0, m!)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RankingIndex(pub usize);

/// All `m!` rankings in lexicographic order; position equals Lehmer index.
pub fn enumerate_rankings(m: usize) -> Result<Vec<Ranking>> {
    check_m(m)?;
    (0..factorial(m))
        .map(|i| lehmer_decode(RankingIndex(i), m))
        .collect()
}

pub fn lehmer_encode(r: &Ranking) -> RankingIndex {
    let m = r.m();
    let mut index = 0;
    for i in 0..m {
        let smaller_after = r.order[i + 1..]
            .iter()
            .filter(|&&x| x < r.order[i])
            .count();
        index += smaller_after * factorial(m - 1 - i);
    }
    RankingIndex(index)
}

pub fn lehmer_decode(i: RankingIndex, m: usize) -> Result<Ranking> {
    check_m(m)?;
    let count = factorial(m);
    if i.0 >= count {
        return Err(Error::InvalidLabel {
            value: i.0 as u32,
            m,
            count,
        });
    }
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut rest = i.0;
    let mut order = Vec::with_capacity(m);
    for k in (0..m).rev() {
        let f = factorial(k);
        order.push(remaining.remove(rest / f));
        rest %= f;
    }
    Ok(Ranking { order })
}

/// Number of qubits needed to label all rankings: minimal `q` with `2^q >= m!`.
pub fn qubit_width(m: usize) -> usize {
    let count = factorial(m);
    let mut q = 0;
    while (1usize << q) < count {
        q += 1;
    }
    q
}

/// A computational-basis bit pattern on a `q`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QubitLabel {
    value: u32,
    width: u8,
}

impl QubitLabel {
    pub fn new(value: u32, width: usize) -> Self {
        debug_assert!(width <= 16 && (value as u64) < (1u64 << width));
        QubitLabel {
            value,
            width: width as u8,
        }
    }

    pub fn from_index(i: RankingIndex, m: usize) -> Self {
        QubitLabel::new(i.0 as u32, qubit_width(m))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    /// Valid iff the label encodes a ranking.
    pub fn is_valid(self, m: usize) -> bool {
        (self.value as usize) < factorial(m)
    }

    /// Bit `k`, most significant first.
    pub fn bit(self, k: usize) -> bool {
        (self.value >> (self.width() - 1 - k)) & 1 == 1
    }

    pub fn with_flipped(self, k: usize) -> Self {
        QubitLabel {
            value: self.value ^ (1 << (self.width() - 1 - k)),
            width: self.width,
        }
    }

    pub fn hamming(self, other: QubitLabel) -> u32 {
        (self.value ^ other.value).count_ones()
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.width() {
            write!(f, "{}", if self.bit(k) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Precomputed rankings and positions for one `m`, used by the hot loops.
#[derive(Debug, Clone)]
pub struct RankingSpace {
    m: usize,
    rankings: Vec<Ranking>,
    // positions[r * m + a] = position of alternative a in ranking r
    positions: Vec<u8>,
}

impl RankingSpace {
    pub fn new(m: usize) -> Result<Self> {
        let rankings = enumerate_rankings(m)?;
        let mut positions = vec![0u8; rankings.len() * m];
        for (r, ranking) in rankings.iter().enumerate() {
            for (pos, &a) in ranking.order().iter().enumerate() {
                positions[r * m + a] = pos as u8;
            }
        }
        Ok(RankingSpace {
            m,
            rankings,
            positions,
        })
    }

    /// Shared instance for `m`; panics if `m` is outside `1..=6`.
    pub fn get(m: usize) -> &'static RankingSpace {
        static SPACES: OnceLock<Vec<RankingSpace>> = OnceLock::new();
        let spaces = SPACES.get_or_init(|| {
            (1..=MAX_ALTERNATIVES)
                .map(|m| RankingSpace::new(m).expect("m in range"))
                .collect()
        });
        &spaces[m - 1]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }

    pub fn ranking(&self, i: usize) -> &Ranking {
        &self.rankings[i]
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    /// `a` above `b` in ranking `r`; caller guarantees `a != b`.
    #[inline]
    pub fn prefers(&self, r: usize, a: usize, b: usize) -> bool {
        self.positions[r * self.m + a] < self.positions[r * self.m + b]
    }

    pub fn reverse_index(&self, r: usize) -> usize {
        lehmer_encode(&self.rankings[r].reverse()).0
    }

    pub fn label(&self, r: usize) -> String {
        self.rankings[r].to_string()
    }
}
