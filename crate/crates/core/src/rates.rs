//! Rate and scale vectors and their Lagrange-basis weights.
//!
//! A hypoexponential law with distinct rates `λ_1..λ_n` mixes the component
//! exponential densities with the signed weights
//! `ℓ_j = ∏_{i≠j} λ_i / (λ_i - λ_j)`. The same weights written against scales
//! `μ_i = λ / λ_i` read `ℓ_j = ∏_{i≠j} μ_j / (μ_j - μ_i)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::signed_sum;

/// Default minimum relative gap between two rates.
///
/// Below this the weights exceed ~1e9 and the alternating density sum loses
/// every significant digit.
pub const DEFAULT_DISTINCT_TOL: f64 = 1e-9;

/// Largest `n` for which every `C(n, j)` is exactly representable as `f64`.
pub const BINOMIAL_CAP: usize = 56;

/// Natural log of `f64::MAX`; weights beyond it cannot be stored.
const MAX_LOG_MAGNITUDE: f64 = 709.782712893384;

fn check_positive(raw: &[f64]) -> Result<()> {
    for (index, &value) in raw.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveRate { index, value });
        }
    }
    if raw.len() < 2 {
        return Err(Error::TooFewRates { count: raw.len() });
    }
    Ok(())
}

fn unsort<T: Copy>(order: &[usize], sorted: &[T]) -> Vec<T> {
    let mut out = sorted.to_vec();
    for (k, &orig) in order.iter().enumerate() {
        out[orig] = sorted[k];
    }
    out
}

/// Sorts ascending and checks adjacent relative gaps. Returns the sorted
/// values with the permutation `order[k] = original index of sorted[k]`.
fn sort_distinct(raw: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distinctness tolerance {tol}"
        )));
    }
    check_positive(raw)?;
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    for w in sorted.windows(2) {
        let gap = (w[1] - w[0]) / w[1];
        if gap < tol || w[0] == w[1] {
            return Err(Error::NotDistinct {
                first: w[0],
                second: w[1],
                gap,
                tolerance: tol,
            });
        }
    }
    Ok((sorted, order))
}

/// Validated, pairwise-distinct positive rates stored in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateVector {
    rates: Vec<f64>,
    order: Vec<usize>,
}

impl RateVector {
    pub fn new(raw: &[f64]) -> Result<Self> {
        validate_rates(raw, DEFAULT_DISTINCT_TOL)
    }

    /// Rates in ascending order.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// `input_order()[k]` is the position in the original input of the `k`-th
    /// smallest rate.
    pub fn input_order(&self) -> &[usize] {
        &self.order
    }

    /// Rearranges values aligned with the sorted rates back to input order.
    pub fn to_input_order<T: Copy>(&self, sorted: &[T]) -> Vec<T> {
        unsort(&self.order, sorted)
    }

    /// Scales `μ_i = reference / λ_i`, descending.
    pub fn to_scales(&self, reference: f64) -> Result<ScaleVector> {
        let mu: Vec<f64> = self.rates.iter().map(|r| reference / r).collect();
        validate_scales(&mu, 0.0)
    }

    pub fn reciprocals(&self) -> Vec<f64> {
        self.rates.iter().map(|r| 1.0 / r).collect()
    }
}

/// Checks positivity, count and distinctness, and sorts ascending.
pub fn validate_rates(raw: &[f64], tol: f64) -> Result<RateVector> {
    let (rates, order) = sort_distinct(raw, tol)?;
    Ok(RateVector { rates, order })
}

/// Distinct positive scales stored in strictly decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleVector {
    scales: Vec<f64>,
    order: Vec<usize>,
}

impl ScaleVector {
    pub fn new(raw: &[f64]) -> Result<Self> {
        validate_scales(raw, DEFAULT_DISTINCT_TOL)
    }

    /// Scales in decreasing order.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn input_order(&self) -> &[usize] {
        &self.order
    }

    /// Rearranges values aligned with the sorted scales back to input order.
    pub fn to_input_order<T: Copy>(&self, sorted: &[T]) -> Vec<T> {
        unsort(&self.order, sorted)
    }

    /// Rates `λ_i = reference / μ_i`, ascending.
    pub fn to_rates(&self, reference: f64) -> Result<RateVector> {
        let r: Vec<f64> = self.scales.iter().map(|m| reference / m).collect();
        validate_rates(&r, 0.0)
    }

    /// All scales but the one at `skip`.
    pub fn without(&self, skip: usize) -> Vec<f64> {
        self.scales
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &m)| m)
            .collect()
    }
}

/// Accepts any distinct positive scales and sorts them descending.
pub fn validate_scales(raw: &[f64], tol: f64) -> Result<ScaleVector> {
    let (mut scales, mut order) = sort_distinct(raw, tol)?;
    scales.reverse();
    order.reverse();
    Ok(ScaleVector { scales, order })
}

/// Lagrange-basis weights with their sign and log-magnitude kept alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    values: Vec<f64>,
    signs: Vec<i8>,
    log_magnitudes: Vec<f64>,
}

impl WeightVector {
    /// Builds `ℓ_j = ∏_{i≠j} ratio(j, i)`.
    fn from_products(n: usize, ratio: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        let mut log_magnitudes = Vec::with_capacity(n);
        for j in 0..n {
            let mut value = 1.0;
            let mut log_mag = 0.0;
            let mut sign = 1i8;
            for i in (0..n).filter(|&i| i != j) {
                let r = ratio(j, i);
                value *= r;
                log_mag += r.abs().ln();
                if r < 0.0 {
                    sign = -sign;
                }
            }
            if log_mag.is_nan() || log_mag >= MAX_LOG_MAGNITUDE || !value.is_finite() {
                return Err(Error::Overflow {
                    index: j,
                    log_magnitude: log_mag,
                });
            }
            values.push(value);
            signs.push(sign);
            log_magnitudes.push(log_mag);
        }
        Ok(Self {
            values,
            signs,
            log_magnitudes,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn log_magnitudes(&self) -> &[f64] {
        &self.log_magnitudes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sign_j · exp(log|ℓ_j|)`.
    pub fn reconstruct(&self, j: usize) -> f64 {
        f64::from(self.signs[j]) * self.log_magnitudes[j].exp()
    }

    pub fn sum(&self) -> f64 {
        signed_sum(self.values.iter().copied()).value
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when consecutive weights have opposite signs.
    pub fn alternates(&self) -> bool {
        self.signs.windows(2).all(|w| w[0] != w[1])
    }
}

/// `ℓ_j = ∏_{i≠j} λ_i / (λ_i - λ_j)`, aligned with the ascending rates.
pub fn lagrange_weights(rates: &RateVector) -> Result<WeightVector> {
    let l = rates.rates();
    WeightVector::from_products(l.len(), |j, i| l[i] / (l[i] - l[j]))
}

/// `ℓ_j = ∏_{i≠j} μ_j / (μ_j - μ_i)`, aligned with the descending scales.
pub fn weights_from_scales(mu: &ScaleVector) -> Result<WeightVector> {
    let m = mu.scales();
    WeightVector::from_products(m.len(), |j, i| m[j] / (m[j] - m[i]))
}

/// Weights for `μ_j = 1/j`: `ℓ_j = C(n, j) (-1)^{j-1}`, computed in exact
/// integer arithmetic.
pub fn binomial_weights(n: usize) -> Result<WeightVector> {
    if n < 2 {
        return Err(Error::TooFewRates { count: n });
    }
    if n > BINOMIAL_CAP {
        return Err(Error::BinomialCap {
            n,
            cap: BINOMIAL_CAP,
        });
    }
    let mut values = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    let mut log_magnitudes = Vec::with_capacity(n);
    let mut c: u128 = 1;
    for j in 1..=n {
        // C(n, j) = C(n, j-1) (n - j + 1) / j, exact at every step
        c = c * (n - j + 1) as u128 / j as u128;
        let sign: i8 = if j % 2 == 1 { 1 } else { -1 };
        let mag = c as f64;
        values.push(f64::from(sign) * mag);
        signs.push(sign);
        log_magnitudes.push(mag.ln());
    }
    Ok(WeightVector {
        values,
        signs,
        log_magnitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_sorted_pair() {
        let r = validate_rates(&[1.0, 2.0], 1e-9).unwrap();
        assert_eq!(r.rates(), &[1.0, 2.0]);
    }

    #[test]
    fn validate_sorts_and_remembers_order() {
        let r = validate_rates(&[3.0, 1.0, 2.0], 1e-9).unwrap();
        assert_eq!(r.rates(), &[1.0, 2.0, 3.0]);
        assert_eq!(r.input_order(), &[1, 2, 0]);
        assert_eq!(r.to_input_order(r.rates()), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn validate_rejects_near_ties() {
        let err = validate_rates(&[2.0, 2.0 + 1e-15], 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotDistinct { .. }));
        // exact ties are rejected even with zero tolerance
        assert!(matches!(
            validate_rates(&[2.0, 2.0], 0.0),
            Err(Error::NotDistinct { .. })
        ));
    }

    #[test]
    fn validate_rejects_bad_values() {
        assert_eq!(
            validate_rates(&[1.0, -3.0], 1e-9),
            Err(Error::NonPositiveRate {
                index: 1,
                value: -3.0
            })
        );
        assert!(matches!(
            validate_rates(&[1.0, f64::NAN], 1e-9),
            Err(Error::NonPositiveRate { index: 1, .. })
        ));
        assert_eq!(
            validate_rates(&[4.0], 1e-9),
            Err(Error::TooFewRates { count: 1 })
        );
        assert_eq!(
            validate_rates(&[], 1e-9),
            Err(Error::TooFewRates { count: 0 })
        );
    }

    #[test]
    fn scales_sorted_descending() {
        let s = validate_scales(&[0.5, 1.0, 0.25], 1e-9).unwrap();
        assert_eq!(s.scales(), &[1.0, 0.5, 0.25]);
        assert_eq!(s.input_order(), &[1, 0, 2]);
        let r = s.to_rates(1.0).unwrap();
        assert_eq!(r.rates(), &[1.0, 2.0, 4.0]);
    }

    #[test]
    fn weights_two_rates() {
        let w = lagrange_weights(&RateVector::new(&[1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(w.values(), &[2.0, -1.0]);
        assert_eq!(w.signs(), &[1, -1]);
    }

    #[test]
    fn weights_three_rates() {
        let w = lagrange_weights(&RateVector::new(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
        assert_eq!(w.values(), &[3.0, -3.0, 1.0]);
        assert!(w.alternates());
        assert_eq!(w.sum(), 1.0);
    }

    #[test]
    fn weights_from_scales_examples() {
        let w = weights_from_scales(&ScaleVector::new(&[1.0, 0.5]).unwrap()).unwrap();
        assert_eq!(w.values(), &[2.0, -1.0]);

        let w = weights_from_scales(&ScaleVector::new(&[1.0, 0.5, 1.0 / 3.0]).unwrap()).unwrap();
        let expect = [3.0, -3.0, 1.0];
        for (a, b) in w.values().iter().zip(expect) {
            assert!((a - b).abs() <= 1e-14 * b.abs(), "{a} vs {b}");
        }

        let by_scales = weights_from_scales(&ScaleVector::new(&[3.0, 1.0]).unwrap()).unwrap();
        let by_rates = lagrange_weights(&RateVector::new(&[1.0 / 3.0, 1.0]).unwrap()).unwrap();
        for (a, b) in by_scales.values().iter().zip(by_rates.values()) {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_weights(2).unwrap().values(), &[2.0, -1.0]);
        assert_eq!(binomial_weights(3).unwrap().values(), &[3.0, -3.0, 1.0]);
        assert_eq!(
            binomial_weights(5).unwrap().values(),
            &[5.0, -10.0, 10.0, -5.0, 1.0]
        );
    }

    #[test]
    fn binomial_cap_and_floor() {
        assert!(binomial_weights(BINOMIAL_CAP).is_ok());
        assert_eq!(
            binomial_weights(BINOMIAL_CAP + 1),
            Err(Error::BinomialCap {
                n: BINOMIAL_CAP + 1,
                cap: BINOMIAL_CAP
            })
        );
        assert!(matches!(
            binomial_weights(1),
            Err(Error::TooFewRates { .. })
        ));
    }

    #[test]
    fn binomial_matches_scales_form() {
        // Pascal's triangle as an independent route to C(n, j)
        let mut row = vec![1u64];
        for n in 1..=10usize {
            let mut next = vec![1u64; n + 1];
            for j in 1..n {
                next[j] = row[j - 1] + row[j];
            }
            row = next;
            if n < 2 {
                continue;
            }
            let b = binomial_weights(n).unwrap();
            let mu: Vec<f64> = (1..=n).map(|j| 1.0 / j as f64).collect();
            let s = weights_from_scales(&ScaleVector::new(&mu).unwrap()).unwrap();
            for j in 1..=n {
                let exact = row[j] as f64 * if j % 2 == 1 { 1.0 } else { -1.0 };
                assert_eq!(b.values()[j - 1], exact);
                assert!((s.values()[j - 1] - exact).abs() <= 1e-12 * exact.abs());
            }
        }
    }

    #[test]
    fn overflow_on_crowded_rates() {
        // 200 rates packed into a narrow band blow the products past f64
        let raw: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 * 1e-4).collect();
        let r = validate_rates(&raw, 1e-9).unwrap();
        assert!(matches!(lagrange_weights(&r), Err(Error::Overflow { .. })));
    }

    #[test]
    fn reconstruct_from_log_magnitude() {
        let r = RateVector::new(&[0.3, 1.1, 2.9, 7.0, 13.5]).unwrap();
        let w = lagrange_weights(&r).unwrap();
        for j in 0..w.len() {
            let v = w.values()[j];
            assert!((w.reconstruct(j) - v).abs() <= 1e-12 * v.abs());
        }
    }
}
