//! The hypoexponential law of `Z_1 + ... + Z_n`, `Z_i ~ Exp(λ_i)` independent
//! with pairwise distinct rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::{lagrange_weights, RateVector, ScaleVector, WeightVector};
use crate::sampling::{fill_chunked, unit_exponential};
use crate::summation::signed_sum;
use crate::symmetric::complete_homogeneous;

/// Relative size of the negative excursion tolerated from an alternating sum
/// before it is reported instead of clamped.
pub const CLAMP_RELATIVE: f64 = 1e-12;

const MAX_ITERATIONS: usize = 2000;

/// `λ_max x` below which the cdf switches to its power series.
const SMALL_ARGUMENT: f64 = 0.5;
const SMALL_ARGUMENT_TERMS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplaceForm {
    /// `∏ λ_i / (λ_i + t)`
    Product,
    /// `Σ ℓ_j λ_j / (λ_j + t)`
    Mixture,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypoexpDistribution {
    rates: RateVector,
    weights: WeightVector,
}

fn check_point(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("x = {x} must be >= 0")));
    }
    Ok(())
}

impl HypoexpDistribution {
    pub fn new(rates: RateVector) -> Result<Self> {
        let weights = lagrange_weights(&rates)?;
        Ok(Self { rates, weights })
    }

    pub fn from_rates(raw: &[f64]) -> Result<Self> {
        Self::new(RateVector::new(raw)?)
    }

    /// Law of `Σ μ_j X_j` with `X_j ~ Exp(reference)`.
    pub fn from_scales(mu: &ScaleVector, reference: f64) -> Result<Self> {
        Self::new(mu.to_rates(reference)?)
    }

    pub fn rates(&self) -> &RateVector {
        &self.rates
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    fn rate_weight_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rates
            .rates()
            .iter()
            .copied()
            .zip(self.weights.values().iter().copied())
    }

    /// Clamps tiny negative sums to zero; larger ones are an error.
    fn clamp(x: f64, value: f64, max_term: f64) -> Result<f64> {
        let threshold = CLAMP_RELATIVE * max_term;
        if value >= 0.0 {
            Ok(value)
        } else if value >= -threshold {
            Ok(0.0)
        } else {
            Err(Error::NegativeDensity {
                x,
                value,
                threshold,
            })
        }
    }

    /// Density `Σ ℓ_j λ_j e^{-λ_j x}`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_point(x)?;
        let s = signed_sum(
            self.rate_weight_pairs()
                .map(|(l, w)| w * l * (-l * x).exp()),
        );
        Self::clamp(x, s.value, s.max_term)
    }

    /// `Σ ℓ_j e^{-λ_j x}`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        check_point(x)?;
        let s = signed_sum(self.rate_weight_pairs().map(|(l, w)| w * (-l * x).exp()));
        Ok(Self::clamp(x, s.value, s.max_term)?.min(1.0))
    }

    /// `Σ ℓ_j (1 - e^{-λ_j x})`, which equals `1 - survival` because the
    /// weights sum to one, but keeps full relative accuracy near zero.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_point(x)?;
        if x.is_infinite() {
            return Ok(1.0);
        }
        let fastest = self.rates.rates()[self.rates.len() - 1];
        if fastest * x <= SMALL_ARGUMENT {
            return Ok(self.cdf_near_zero(x));
        }
        let s = signed_sum(
            self.rate_weight_pairs()
                .map(|(l, w)| -w * (-l * x).exp_m1()),
        );
        Ok(Self::clamp(x, s.value, s.max_term)?.min(1.0))
    }

    /// Near the origin every term of the alternating sum is `O(x)` while the
    /// cdf is `O(x^n)`. With `y = λx`,
    /// `cdf(x) = e_n(y) Σ_{m>=0} (-1)^m h_m(y) / (m+n)!`, whose terms decay
    /// geometrically once `max y <= 1/2`.
    fn cdf_near_zero(&self, x: f64) -> f64 {
        let y: Vec<f64> = self.rates.rates().iter().map(|l| l * x).collect();
        let n = y.len();
        let en: f64 = y.iter().product();
        if en == 0.0 {
            return 0.0;
        }
        let h = complete_homogeneous(&y, SMALL_ARGUMENT_TERMS);
        let mut inv_fact: f64 = (1..=n).map(|i| 1.0 / i as f64).product();
        let mut sum = 0.0;
        for (m, hm) in h.iter().enumerate() {
            let term = hm * inv_fact;
            sum += if m % 2 == 0 { term } else { -term };
            if term < 1e-18 * sum.abs() {
                break;
            }
            inv_fact /= (m + n + 1) as f64;
        }
        (en * sum).clamp(0.0, 1.0)
    }

    /// Laplace transform `E[e^{-tS}]`.
    pub fn laplace(&self, t: f64, form: LaplaceForm) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t = {t} must be finite and >= 0"
            )));
        }
        Ok(match form {
            LaplaceForm::Product => self.rates.rates().iter().map(|l| l / (l + t)).product(),
            LaplaceForm::Mixture => {
                signed_sum(self.rate_weight_pairs().map(|(l, w)| w * l / (l + t))).value
            }
        })
    }

    /// Largest single term of the mixture form at `t`, the scale against
    /// which its rounding error is measured.
    pub fn laplace_mixture_scale(&self, t: f64) -> f64 {
        self.rate_weight_pairs()
            .map(|(l, w)| (w * l / (l + t)).abs())
            .fold(0.0, f64::max)
    }

    /// Raw moment `E[S^k] = k! h_k(1/λ_1, ..., 1/λ_n)`.
    pub fn moment(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidArgument("moment order must be >= 1".into()));
        }
        let h = complete_homogeneous(&self.rates.reciprocals(), k);
        let factorial: f64 = (1..=k).map(|i| i as f64).product();
        Ok(factorial * h[k])
    }

    pub fn mean(&self) -> f64 {
        self.rates.rates().iter().map(|l| 1.0 / l).sum()
    }

    pub fn variance(&self) -> f64 {
        self.rates.rates().iter().map(|l| 1.0 / (l * l)).sum()
    }

    /// Inverse cdf by bracketing bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "p = {p} must lie in (0, 1)"
            )));
        }
        // Above the median compare tails, which resolves p close to 1.
        let upper_tail = p > 0.5;
        let below = |x: f64| -> Result<bool> {
            if upper_tail {
                Ok(self.survival(x)? > 1.0 - p)
            } else {
                Ok(self.cdf(x)? < p)
            }
        };

        let mut hi = self.mean();
        let mut doublings = 0;
        while below(hi)? {
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_ITERATIONS || !hi.is_finite() {
                return Err(Error::NonConvergence {
                    iterations: doublings,
                });
            }
        }
        let mut lo = 0.0;
        for _ in 0..MAX_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(hi);
            }
            if below(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
        })
    }

    /// `count` independent draws of `Σ_i -ln(U_i)/λ_i`; identical for a
    /// fixed seed.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        let rates = self.rates.rates();
        let mut out = vec![0.0; count];
        fill_chunked(&mut out, seed, |rng| {
            rates.iter().map(|l| unit_exponential(rng) / l).sum()
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn d12() -> HypoexpDistribution {
        HypoexpDistribution::from_rates(&[1.0, 2.0]).unwrap()
    }

    #[test]
    fn pdf_at_ln2() {
        // 2e^{-x} - 2e^{-2x} at x = ln 2
        assert!((d12().pdf(LN_2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pdf_vanishes_at_origin() {
        for rates in [&[1.0, 2.0][..], &[0.5, 3.0, 7.0], &[0.01, 0.2, 5.0, 40.0]] {
            let d = HypoexpDistribution::from_rates(rates).unwrap();
            assert_eq!(d.pdf(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn survival_and_cdf() {
        let d = d12();
        assert_eq!(d.survival(0.0).unwrap(), 1.0);
        assert_eq!(d.cdf(0.0).unwrap(), 0.0);
        assert!((d.survival(LN_2).unwrap() - 0.75).abs() < 1e-15);
        assert!((d.cdf(LN_2).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(d.cdf(f64::INFINITY).unwrap(), 1.0);
        assert!(d.cdf(60.0).unwrap() == 1.0);
        for i in 0..200 {
            let x = i as f64 * 0.13;
            let s = d.cdf(x).unwrap() + d.survival(x).unwrap();
            assert!((s - 1.0).abs() < 4e-16, "x={x}");
        }
    }

    #[test]
    fn negative_arguments_rejected() {
        let d = d12();
        assert!(matches!(d.pdf(-1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(d.cdf(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            d.laplace(-0.5, LaplaceForm::Product),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn clamp_rule() {
        assert_eq!(HypoexpDistribution::clamp(0.0, -1e-13, 1.0).unwrap(), 0.0);
        assert!(matches!(
            HypoexpDistribution::clamp(0.0, -1e-11, 1.0),
            Err(Error::NegativeDensity { .. })
        ));
    }

    #[test]
    fn cdf_series_matches_direct_sum_at_switch() {
        for rates in [&[1.0, 2.0][..], &[0.5, 3.0, 7.0], &[0.01, 0.2, 5.0, 40.0]] {
            let d = HypoexpDistribution::from_rates(rates).unwrap();
            let x = SMALL_ARGUMENT / rates[rates.len() - 1];
            let series = d.cdf_near_zero(x);
            let direct =
                signed_sum(d.rate_weight_pairs().map(|(l, w)| -w * (-l * x).exp_m1())).value;
            assert!(
                (series - direct).abs() <= 1e-13,
                "{rates:?}: {series} vs {direct}"
            );
        }
        // Exp(1) + Exp(2): cdf(x) = 1 - 2e^{-x} + e^{-2x} ~ x^2 - x^3 near 0
        let d = d12();
        let x = 1e-6;
        assert!((d.cdf(x).unwrap() - (x * x - x * x * x)).abs() < 1e-24);
    }

    #[test]
    fn laplace_examples() {
        let d = d12();
        for form in [LaplaceForm::Product, LaplaceForm::Mixture] {
            assert_eq!(d.laplace(0.0, form).unwrap(), 1.0);
            assert!((d.laplace(1.0, form).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        }
    }

    #[test]
    fn moments_two_rates() {
        let d = d12();
        assert_eq!(d.moment(1).unwrap(), 1.5);
        assert_eq!(d.moment(2).unwrap(), 3.5);
        // ∫ x^3 (2e^{-x} - 2e^{-2x}) dx = 12 - 6/8
        assert_eq!(d.moment(3).unwrap(), 11.25);
        assert_eq!(
            d.moment(2).unwrap() - d.moment(1).unwrap().powi(2),
            d.variance()
        );
        assert!(d.moment(0).is_err());
    }

    #[test]
    fn quantile_round_trips() {
        let d = d12();
        let p = d.cdf(1.0).unwrap();
        assert!((d.quantile(p).unwrap() - 1.0).abs() < 1e-10);
        let m = d.quantile(0.5).unwrap();
        assert!((d.cdf(m).unwrap() - 0.5).abs() < 1e-12);
        assert!(d.quantile(1e-300).unwrap() < 1e-140);
        let p = 1.0 - 1e-12;
        let q = d.quantile(p).unwrap();
        assert!((d.survival(q).unwrap() - (1.0 - p)).abs() < 1e-24);
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = d12();
        assert_eq!(d.sample(1000, 42).unwrap(), d.sample(1000, 42).unwrap());
        assert_ne!(d.sample(1000, 42).unwrap(), d.sample(1000, 43).unwrap());
        assert!(d.sample(0, 1).is_err());
    }
}
