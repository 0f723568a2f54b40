//! Linear extensions of the precedence order induced by an SCC condensation.

use crate::error::{Error, Result};
use crate::preference::{lehmer_encode, Ranking, RankingIndex};

use super::scc::SccPartition;

/// Largest alternative count for which extensions are enumerated (5! = 120).
pub const MAX_EXTENSION_M: usize = 5;

/// Every ranking that places all members of a component before all members
/// of any component it reaches; orders within a component are free. Sorted by
/// index.
pub fn linear_extensions(s: &SccPartition) -> Result<Vec<RankingIndex>> {
    let m = s.vertex_count();
    if m == 0 || m > MAX_EXTENSION_M {
        return Err(Error::CapExceeded {
            what: "linear extension enumeration (m)",
            size: m as u128,
            cap: MAX_EXTENSION_M as u128,
            hint: "linear extensions are enumerated for 1 <= m <= 5 only",
        });
    }
    let c = s.components().len();
    let closure = s.closure();
    // predecessors[x]: alternatives that must be placed before x
    let predecessors: Vec<Vec<usize>> = (0..m)
        .map(|x| {
            let cx = s.component_of(x);
            (0..m)
                .filter(|&y| closure[s.component_of(y) * c + cx])
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut order = Vec::with_capacity(m);
    let mut placed = vec![false; m];
    extend(&predecessors, &mut order, &mut placed, &mut out);
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn extend(
    predecessors: &[Vec<usize>],
    order: &mut Vec<usize>,
    placed: &mut [bool],
    out: &mut Vec<RankingIndex>,
) {
    let m = predecessors.len();
    if order.len() == m {
        let ranking = Ranking::new(order.clone()).expect("extension is a permutation");
        out.push(lehmer_encode(&ranking));
        return;
    }
    for x in 0..m {
        if !placed[x] && predecessors[x].iter().all(|&y| placed[y]) {
            placed[x] = true;
            order.push(x);
            extend(predecessors, order, placed, out);
            order.pop();
            placed[x] = false;
        }
    }
}
