//! Independent brute-force re-implementations checked against the library.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmrlab::preference::{enumerate_rankings, factorial, lehmer_decode, lehmer_encode, RankingIndex};
use qmrlab::qmr::{linear_extensions, qmr_aggregate, tarjan_scc, GmsSupport, QmrParams};
use qmrlab::qmr2::qmr2_constitution_analytic;

use common::{brute_aggregate, closure, random_graph, random_profile};

#[test]
fn tarjan_matches_mutual_reachability() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let g = random_graph(&mut rng, m);
        let reach = closure(m, &|a, b| g.has_edge(a, b));
        let scc = tarjan_scc(&g);
        for a in 0..m {
            for b in 0..m {
                let same = reach[a][b] && reach[b][a];
                assert_eq!(scc.component_of(a) == scc.component_of(b), same);
            }
        }
        let mut seen: Vec<usize> = scc.components().iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..m).collect::<Vec<_>>());
        for a in 0..m {
            for b in 0..m {
                let (ca, cb) = (scc.component_of(a), scc.component_of(b));
                if g.has_edge(a, b) && ca != cb {
                    assert!(scc.dag_edges().contains(&(ca, cb)));
                    assert!(ca < cb, "components are listed in topological order");
                }
            }
        }
    }
}

#[test]
fn extensions_match_filtered_rankings() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..500 {
        let m = rng.gen_range(1..=5);
        let g = random_graph(&mut rng, m);
        let reach = closure(m, &|a, b| g.has_edge(a, b));
        let expected: Vec<usize> = enumerate_rankings(m)
            .unwrap()
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                (0..m).all(|a| {
                    (0..m).all(|b| {
                        !(reach[a][b] && !reach[b][a])
                            || r.order().iter().position(|&x| x == a) < r.order().iter().position(|&x| x == b)
                    })
                })
            })
            .map(|(i, _)| i)
            .collect();
        let ours: Vec<usize> = linear_extensions(&tarjan_scc(&g)).unwrap().into_iter().map(|r| r.0).collect();
        assert_eq!(ours, expected);
    }
}

#[test]
fn lehmer_round_trip_exhaustive() {
    for m in 1..=6 {
        let all = enumerate_rankings(m).unwrap();
        assert_eq!(all.len(), factorial(m));
        for (i, r) in all.iter().enumerate() {
            assert_eq!(lehmer_encode(r), RankingIndex(i));
            assert_eq!(&lehmer_decode(RankingIndex(i), m).unwrap(), r);
        }
    }
}

#[test]
fn aggregate_matches_brute_force_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..120 {
        let (m, n) = if case % 3 == 0 { (4, 3) } else { (3, rng.gen_range(1..=4)) };
        let max_delta = 1.0 / (m * (m - 1)) as f64;
        let delta = if case % 4 == 0 { 0.0 } else { rng.gen_range(0.0..max_delta) };
        let global = case % 5 == 1;
        let support = rng.gen_range(1..=3);
        let profile = random_profile(&mut rng, m, n, support);
        let params = QmrParams {
            delta,
            epsilon: 0.0,
            gms_support: if global { GmsSupport::Global } else { GmsSupport::Profile },
        };
        let ours = qmr_aggregate(&profile, &params).unwrap();
        let oracle = brute_aggregate(&profile, delta, global);
        for (x, y) in ours.probs().iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-12, "case {case}: {x} vs {y}");
        }
    }
}

#[test]
fn qmr2_analytic_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let samples = 100_000;
    for _ in 0..5 {
        let profile = random_profile(&mut rng, 3, 4, 3);
        let analytic = qmr2_constitution_analytic(&profile).unwrap();
        let mut hits = vec![0.0; 6];
        for _ in 0..samples {
            let ballots: Vec<usize> = profile
                .voters()
                .iter()
                .map(|v| {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    for (r, &p) in v.probs().iter().enumerate() {
                        acc += p;
                        if u < acc {
                            return r;
                        }
                    }
                    v.support().last().copied().unwrap()
                })
                .collect();
            let mut tally = [0usize; 6];
            for &b in &ballots {
                tally[b] += 1;
            }
            let top = *tally.iter().max().unwrap();
            let leaders: Vec<usize> = (0..6).filter(|&r| tally[r] == top).collect();
            hits[leaders[rng.gen_range(0..leaders.len())]] += 1.0;
        }
        for r in 0..6 {
            let p = analytic.get(r);
            let freq = hits[r] / samples as f64;
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            assert!((freq - p).abs() <= 3.0 * sigma + 1e-12, "ranking {r}: {freq} vs {p}");
        }
    }
}
