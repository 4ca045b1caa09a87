#![allow(dead_code)]

use hypoexp::series::enumerate_compositions;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Smallest relative gap between neighbouring random rates.
pub const MIN_GAP: f64 = 1e-2;

pub fn well_separated(x: &[f64], gap: f64) -> bool {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).all(|w| (w[1] - w[0]) / w[1] >= gap)
}

/// `n` values log-uniform in `[lo, hi]`, redrawn until neighbours differ by
/// at least [`MIN_GAP`] relatively.
pub fn log_uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(a..b).exp()).collect();
        if well_separated(&x, MIN_GAP) {
            return x;
        }
    }
}

pub fn rates_strategy(
    n: std::ops::RangeInclusive<usize>,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo.log10()..hi.log10(), n)
        .prop_map(|e| e.into_iter().map(|v| 10f64.powf(v)).collect::<Vec<_>>())
        .prop_filter("rates too close", |x| well_separated(x, MIN_GAP))
}

/// `h_k(x)` as a sum over all exponent vectors of total degree `k`.
pub fn brute_h(x: &[f64], k: usize) -> f64 {
    enumerate_compositions(k, x.len())
        .unwrap()
        .iter()
        .map(|a| {
            a.entries()
                .iter()
                .zip(x)
                .map(|(&e, v)| v.powi(e as i32))
                .product::<f64>()
        })
        .sum()
}

pub fn binom(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}
