//! Truncated formal power series and the multi-index product rule.
//!
//! The working path multiplies argument-scaled series by repeated Cauchy
//! products. Multi-index enumeration is kept as an independent route for the
//! coefficients of `∏ v(μ_i t)` and is guarded by a hard budget, since the
//! number of compositions grows as `C(k+m-1, m-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 16;

/// Upper bound on the number of multi-indices an enumeration may visit.
pub const COMPOSITION_BUDGET: u128 = 10_000_000;

/// Coefficients `a_0..=a_K` of a power series truncated at order `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Series {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Series::new(coeffs)
    }
}

impl From<Series> for Vec<f64> {
    fn from(s: Series) -> Self {
        s.coeffs
    }
}

/// `|x - y| <= tol · max(1, |x|, |y|)`
pub fn scaled_eq(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs())
}

impl Series {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "series needs at least one coefficient".into(),
            ));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {bad}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Polynomial coefficients padded with zeros (or truncated) to order `order`.
    pub fn from_poly(coeffs: &[f64], order: usize) -> Result<Self> {
        let mut c = coeffs.to_vec();
        c.resize(order + 1, 0.0);
        Self::new(c)
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = 1.0;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, k: usize, value: f64) {
        self.coeffs[k] = value;
    }

    fn check_order(&self, other: &Series) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        let k_max = self.order();
        let coeffs = (0..=k_max)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum())
            .collect();
        Ok(Series { coeffs })
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_order(other)?;
        Ok(Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// Coefficient-wise absolute value; products of these bound the
    /// magnitude of every term feeding a product coefficient.
    pub fn abs(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.abs()).collect(),
        }
    }

    /// `1/u` by the triangular recurrence `b_k = -(Σ_{i=1}^k u_i b_{k-i}) / u_0`.
    pub fn reciprocal(&self) -> Result<Series> {
        let u0 = self.coeffs[0];
        if u0 == 0.0 {
            return Err(Error::ZeroConstantTerm);
        }
        let mut b = vec![0.0; self.coeffs.len()];
        b[0] = 1.0 / u0;
        for k in 1..b.len() {
            let s: f64 = (1..=k).map(|i| self.coeffs[i] * b[k - i]).sum();
            b[k] = -s / u0;
        }
        Ok(Series { coeffs: b })
    }

    /// Series of `u(μ t)`: coefficient `k` becomes `u_k μ^k`.
    pub fn scale_arg(&self, mu: f64) -> Series {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let c = a * p;
                p *= mu;
                c
            })
            .collect();
        Series { coeffs }
    }

    /// Divides through by the constant term.
    pub fn normalized(&self) -> Result<Series> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 || !a0.is_finite() {
            return Err(Error::NotNormalized(a0));
        }
        if a0 == 1.0 {
            return Ok(self.clone());
        }
        Ok(self.scale(1.0 / a0))
    }

    /// Coefficient-wise [`scaled_eq`]; orders must match.
    pub fn approx_eq(&self, other: &Series, tol: f64) -> bool {
        self.order() == other.order()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(&a, &b)| scaled_eq(a, b, tol))
    }
}

/// `∏_i u(μ_i t)` by repeated Cauchy products. `scales` may repeat; an empty
/// slice gives the constant series 1.
pub fn product_of_scaled(u: &Series, scales: &[f64]) -> Series {
    let mut acc = Series::one(u.order());
    for &m in scales {
        acc = acc
            .mul(&u.scale_arg(m))
            .expect("orders agree by construction");
    }
    acc
}

/// Tuple of nonnegative integers with its total cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    entries: Vec<u32>,
    total: u32,
}

/// The three-way split of `{α : |α| = k}` used when isolating `a_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaClass {
    /// One entry equals `k`, the rest are zero.
    Single,
    /// `k >= 2` entries equal one, the rest are zero.
    AllOnes,
    /// Some entry lies in `[2, k-1]`.
    Mixed,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        let total = entries.iter().sum();
        Self { entries, total }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    /// Class of this index among the compositions of its total (`total >= 1`).
    pub fn lambda_class(&self) -> LambdaClass {
        let k = self.total;
        if self.entries.contains(&k) {
            LambdaClass::Single
        } else if self.entries.iter().all(|&a| a <= 1) {
            LambdaClass::AllOnes
        } else {
            LambdaClass::Mixed
        }
    }
}

/// `C(k+m-1, m-1)`, saturating.
pub fn composition_count(k: usize, m: usize) -> u128 {
    if m == 0 {
        return u128::from(k == 0);
    }
    let r = (m - 1).min(k) as u128;
    let top = (k + m - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..r {
        c = match c.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Lazy lexicographic walk over the `m`-tuples of nonnegative integers that
/// sum to `k`, starting at `(0, ..., 0, k)`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Iterator for Compositions {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.current.take()?;
        let out = MultiIndex::new(cur.clone());
        // successor: find the rightmost position i < m-1 that can grow while
        // some later entry is positive; bump it and push the rest to the end.
        let m = cur.len();
        let mut next = cur;
        let tail_pos = (0..m.saturating_sub(1))
            .rev()
            .find(|&i| next[i + 1..].iter().any(|&a| a > 0));
        if let Some(i) = tail_pos {
            next[i] += 1;
            let rest: u32 = next[i + 1..].iter().sum::<u32>() - 1;
            for a in next[i + 1..].iter_mut() {
                *a = 0;
            }
            next[m - 1] = rest;
            self.current = Some(next);
        }
        Some(out)
    }
}

fn compositions_checked(k: usize, m: usize) -> Result<Compositions> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "multi-index length must be >= 1".into(),
        ));
    }
    let count = composition_count(k, m);
    if count > COMPOSITION_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: COMPOSITION_BUDGET,
        });
    }
    let mut start = vec![0u32; m];
    start[m - 1] = k as u32;
    Ok(Compositions {
        current: Some(start),
    })
}

/// Every `m`-tuple of nonnegative integers summing to `k`, each once, in
/// lexicographic order.
pub fn enumerate_compositions(k: usize, m: usize) -> Result<Vec<MultiIndex>> {
    Ok(compositions_checked(k, m)?.collect())
}

/// Iterator form of [`enumerate_compositions`], same budget.
pub fn compositions(k: usize, m: usize) -> Result<Compositions> {
    compositions_checked(k, m)
}

/// Coefficient of `t^k` in `∏_i u(μ_i t)` as the multi-index sum
/// `Σ_{|α|=k} ∏_i μ_i^{α_i} u_{α_i}`.
pub fn leibniz_coefficient(u: &Series, scales: &[f64], k: usize) -> Result<f64> {
    if k > u.order() {
        return Err(Error::InvalidArgument(format!(
            "order {k} exceeds truncation order {}",
            u.order()
        )));
    }
    if scales.is_empty() {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let mut total = 0.0;
    for alpha in compositions_checked(k, scales.len())? {
        total += alpha
            .entries()
            .iter()
            .zip(scales)
            .map(|(&a, &m)| m.powi(a as i32) * u.coeff(a as usize))
            .product::<f64>();
    }
    Ok(total)
}
