use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmrlab::distribution::{Profile, RankingDistribution};
use qmrlab::metrics::{flip_rate_normalized, js_divergence, winner_agreement};
use qmrlab::preference::{factorial, lehmer_decode, lehmer_encode, Alternative, QubitLabel, RankingIndex};
use qmrlab::qmr::{qmr_aggregate, QmrParams};
use qmrlab::qmr2::{decode_with_policy, InvalidPolicy};
use qmrlab::quantum::{check_qiia, check_quantum_unanimity, pair_probability};

fn distribution(m: usize) -> impl Strategy<Value = RankingDistribution> {
    prop::collection::vec(0.0f64..1.0, factorial(m)).prop_filter_map("zero weight", move |w| {
        (w.iter().sum::<f64>() > 1e-6).then(|| RankingDistribution::from_weights(m, w).unwrap())
    })
}

fn sparse_distribution(m: usize) -> impl Strategy<Value = RankingDistribution> {
    prop::collection::vec((0..factorial(m), 0.05f64..1.0), 1..=2).prop_map(move |entries| {
        let mut w = vec![0.0; factorial(m)];
        for (r, x) in entries {
            w[r] += x;
        }
        RankingDistribution::from_weights(m, w).unwrap()
    })
}

proptest! {
    #[test]
    fn lehmer_round_trip(m in 1usize..=6, seed in any::<u64>()) {
        let i = (seed as usize) % factorial(m);
        let r = lehmer_decode(RankingIndex(i), m).unwrap();
        prop_assert_eq!(lehmer_encode(&r), RankingIndex(i));
    }

    #[test]
    fn decoded_labels_are_valid(value in 0u32..8, policy in prop::sample::select(vec![
        InvalidPolicy::Discard, InvalidPolicy::Modulo, InvalidPolicy::Nearest,
    ])) {
        let decoded = decode_with_policy(QubitLabel::new(value, 3), policy, 3);
        match decoded {
            Some(RankingIndex(i)) => prop_assert!(i < 6),
            None => prop_assert!(policy == InvalidPolicy::Discard && value >= 6),
        }
    }

    #[test]
    fn aggregate_is_normalized(voters in prop::collection::vec(sparse_distribution(3), 1..=4), delta in 0.0f64..0.16) {
        let profile = Profile::new(3, voters).unwrap();
        let rho = qmr_aggregate(&profile, &QmrParams::with_delta(delta)).unwrap();
        prop_assert!((rho.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(rho.probs().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn pair_probabilities_complement(d in distribution(4), a in 0usize..4, b in 0usize..4) {
        prop_assume!(a != b);
        let s = pair_probability(&d, a, b).unwrap() + pair_probability(&d, b, a).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qiia_is_reflexive(voters in prop::collection::vec(sparse_distribution(3), 1..=3)) {
        let profile = Profile::new(3, voters).unwrap();
        let rho = qmr_aggregate(&profile, &QmrParams::default()).unwrap();
        prop_assert!(check_qiia(&profile, &rho, &profile, &rho).unwrap().holds());
    }
}

#[test]
fn js_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..10_000 {
        let m = 2 + case % 3;
        let mut draw = || {
            let sparsity: f64 = rng.gen();
            let w: Vec<f64> = (0..factorial(m))
                .map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen() })
                .collect();
            if w.iter().sum::<f64>() == 0.0 {
                RankingDistribution::uniform(m).unwrap()
            } else {
                RankingDistribution::from_weights(m, w).unwrap()
            }
        };
        let p = draw();
        let q = draw();
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        assert!((pq - qp).abs() <= 1e-12);
        assert!((-1e-12..=1.0 + 1e-12).contains(&pq));
        assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
    }
}

const ALPHABET: [Option<Alternative>; 3] = [Some(Alternative(0)), Some(Alternative(1)), None];

fn sequences(len: usize) -> Vec<Vec<Option<Alternative>>> {
    (0..3usize.pow(len as u32))
        .map(|mut code| {
            (0..len)
                .map(|_| {
                    let s = ALPHABET[code % 3];
                    code /= 3;
                    s
                })
                .collect()
        })
        .collect()
}

#[test]
fn flip_rates_exhaustive() {
    for len in 2..=4 {
        let all = sequences(len);
        for noisy in &all {
            for base in &all {
                let mut changes = 0;
                let mut base_changes = 0;
                for i in 1..len {
                    changes += (noisy[i] != noisy[i - 1]) as usize;
                    base_changes += (base[i] != base[i - 1]) as usize;
                }
                let g_run = changes as f64 / (len - 1) as f64;
                let g_0 = base_changes as f64 / (len - 1) as f64;
                let expected = if base_changes == 0 {
                    g_run * len as f64
                } else {
                    g_run / (g_0 + 1.0 / len as f64)
                };
                let r = flip_rate_normalized(noisy, base).unwrap();
                assert_eq!(r.gamma_run, g_run);
                assert_eq!(r.gamma_0, g_0);
                assert!((r.flip_rate_norm - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn agreement_exhaustive() {
    for len in 1..=4 {
        for seq in sequences(len) {
            for reference in ALPHABET {
                let g = winner_agreement(&seq, reference).unwrap();
                let matches = seq.iter().filter(|&&w| w == reference).count();
                assert_eq!(g, matches as f64 / len as f64);
                assert_eq!(g == 1.0, seq.iter().all(|&w| w == reference));
            }
        }
    }
}

#[test]
fn unanimity_on_random_profiles_with_unanimous_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..200 {
        let m = 3;
        let (a, b) = loop {
            let a = rng.gen_range(0..m);
            let b = rng.gen_range(0..m);
            if a != b {
                break (a, b);
            }
        };
        let n = rng.gen_range(1..=4);
        let space = qmrlab::RankingSpace::get(m);
        let allowed: Vec<usize> = (0..space.len()).filter(|&r| space.prefers(r, a, b)).collect();
        let voters = (0..n)
            .map(|_| {
                let mut w = vec![0.0; space.len()];
                for _ in 0..rng.gen_range(1..=3) {
                    w[allowed[rng.gen_range(0..allowed.len())]] += rng.gen_range(0.1..1.0);
                }
                RankingDistribution::from_weights(m, w).unwrap()
            })
            .collect();
        let profile = Profile::new(m, voters).unwrap();
        let rho = qmr_aggregate(&profile, &QmrParams::default()).unwrap();
        let check = check_quantum_unanimity(&profile, &rho).unwrap();
        assert!(check.sharp && check.unsharp);
        assert!(pair_probability(&rho, a, b).unwrap() > 1.0 - 1e-9);
    }
}
