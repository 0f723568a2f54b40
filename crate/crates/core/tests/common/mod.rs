//! Brute-force oracles shared by the integration test targets.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qmrlab::distribution::{Profile, RankingDistribution};
use qmrlab::preference::{enumerate_rankings, factorial};
use qmrlab::qmr::Adjacency;

pub fn closure(m: usize, edge: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; m]; m];
    for (a, row) in reach.iter_mut().enumerate() {
        row[a] = true;
        for (b, cell) in row.iter_mut().enumerate() {
            if edge(a, b) {
                *cell = true;
            }
        }
    }
    for k in 0..m {
        for a in 0..m {
            for b in 0..m {
                if reach[a][k] && reach[k][b] {
                    reach[a][b] = true;
                }
            }
        }
    }
    reach
}

pub fn random_graph(rng: &mut ChaCha8Rng, m: usize) -> Adjacency {
    let density: f64 = rng.gen_range(0.0..0.7);
    let mut g = Adjacency::empty(m);
    for a in 0..m {
        for b in 0..m {
            if a != b && rng.gen_bool(density) {
                g.set(a, b, true);
            }
        }
    }
    g
}

/// Straight transcription of the constitution: majority closure, uniform
/// extensions, GMS mixing, unanimity projection, summed over every profile.
pub fn brute_aggregate(profile: &Profile, delta: f64, global: bool) -> Vec<f64> {
    let m = profile.m();
    let rankings = enumerate_rankings(m).unwrap();
    let count = rankings.len();
    let pos = |r: usize, a: usize| rankings[r].order().iter().position(|&x| x == a).unwrap();
    let above = |r: usize, a: usize, b: usize| pos(r, a) < pos(r, b);
    let n = profile.n();
    let mut total = vec![0.0; count];
    for code in 0..count.pow(n as u32) {
        let mut ballots = Vec::with_capacity(n);
        let mut c = code;
        let mut weight = 1.0;
        for v in 0..n {
            let r = c % count;
            c /= count;
            weight *= profile.voter(v).get(r);
            ballots.push(r);
        }
        if weight == 0.0 {
            continue;
        }
        let votes = |a: usize, b: usize| ballots.iter().filter(|&&r| above(r, a, b)).count();
        let reach = closure(m, &|a, b| a != b && votes(a, b) >= votes(b, a));
        let consistent: Vec<bool> = (0..count)
            .map(|r| {
                (0..m).all(|a| (0..m).all(|b| !(reach[a][b] && !reach[b][a]) || above(r, a, b)))
            })
            .collect();
        let k = consistent.iter().filter(|&&x| x).count() as f64;
        let chi1: Vec<f64> = consistent.iter().map(|&x| if x { 1.0 / k } else { 0.0 }).collect();
        let mut missing = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let present = if global {
                    profile
                        .voters()
                        .iter()
                        .any(|v| (0..count).filter(|&r| above(r, a, b)).map(|r| v.get(r)).sum::<f64>() > 1e-12)
                } else {
                    votes(a, b) > 0
                };
                let shown: f64 = (0..count).filter(|&r| above(r, a, b)).map(|r| chi1[r]).sum();
                if present && shown <= 1e-12 {
                    missing.push((a, b));
                }
            }
        }
        let mut chi2: Vec<f64> = chi1.iter().map(|x| (1.0 - delta * missing.len() as f64) * x).collect();
        for &(a, b) in &missing {
            for (r, x) in chi2.iter_mut().enumerate() {
                if above(r, a, b) {
                    *x += delta / (count / 2) as f64;
                }
            }
        }
        for (r, x) in chi2.iter_mut().enumerate() {
            let keeps = (0..m).all(|a| (0..m).all(|b| a == b || votes(a, b) < n || above(r, a, b)));
            if !keeps {
                *x = 0.0;
            }
        }
        let mass: f64 = chi2.iter().sum();
        for (t, x) in total.iter_mut().zip(&chi2) {
            *t += weight * x / mass;
        }
    }
    total
}

pub fn random_profile(rng: &mut ChaCha8Rng, m: usize, n: usize, support: usize) -> Profile {
    let count = factorial(m);
    let voters = (0..n)
        .map(|_| {
            let mut w = vec![0.0; count];
            for _ in 0..support {
                w[rng.gen_range(0..count)] += rng.gen_range(0.1..1.0);
            }
            RankingDistribution::from_weights(m, w).unwrap()
        })
        .collect();
    Profile::new(m, voters).unwrap()
}
