#![allow(dead_code)]

use hmimo::optimizer::EEProblem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Random positive problem constants whose optimum lies within a few
/// thousand antennas, so the exhaustive scan stays cheap.
pub fn random_problem(rng: &mut ChaCha8Rng) -> EEProblem {
    let users = rng.gen_range(1..=4);
    let per_user = rng.gen_range(1..=4);
    let streams = users * per_user;
    let a: Vec<f64> = (0..streams).map(|_| rng.gen_range(0.05..1.0)).collect();
    let b: Vec<f64> = (0..streams).map(|_| 10f64.powf(rng.gen_range(0.0..3.0))).collect();
    let c = rng.gen_range(0.01..0.5);
    let p1 = 10f64.powf(rng.gen_range(-4.0..-2.0));
    let p2 = rng.gen_range(1.0..50.0);
    let n_s = rng.gen_range(1..=60);
    let n_r = rng.gen_range(1..=8);
    EEProblem::from_constants(a, b, c, p1, p2, n_s, n_r, users).unwrap()
}

pub fn instances(seed: u64, count: usize) -> Vec<EEProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_problem(&mut rng)).collect()
}

/// Number of strict local maxima of a sampled sequence, counting plateaus once.
pub fn local_maxima(values: &[f64]) -> usize {
    let mut v: Vec<f64> = values.to_vec();
    v.dedup();
    let n = v.len();
    (0..n)
        .filter(|&i| (i == 0 || v[i] > v[i - 1]) && (i + 1 == n || v[i] > v[i + 1]))
        .count()
}

/// Number of sign changes of `f` on a log grid over `[lo, hi]`.
pub fn sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> usize {
    let signs: Vec<bool> = (0..points)
        .map(|j| lo * (hi / lo).powf(j as f64 / (points - 1) as f64))
        .map(|x| f(x))
        .filter(|v| *v != 0.0)
        .map(|v| v > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
