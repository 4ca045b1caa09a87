//! Numerical oracles that do not go through the weight formula: trapezoid
//! convolution, adaptive quadrature, Monte Carlo and the Kolmogorov-Smirnov
//! distance. The exponentiality test at the bottom turns the characterization
//! into a statistic on data.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::HypoexpDistribution;
use crate::error::{Error, Result};
use crate::rates::{weights_from_scales, ScaleVector};
use crate::sampling::{fill_chunked, stream_rng, unit_exponential};
use crate::summation::signed_sum;

/// Observations needed per scale in [`exponentiality_test`].
pub const MIN_OBSERVATIONS_PER_SCALE: usize = 50;

/// Largest `step · λ_max` for which trapezoid convolution is attempted.
const MAX_STEP_RATE: f64 = 0.05;

/// Uniform grid `[0, upper]` with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step: f64,
    pub upper: f64,
}

impl GridSpec {
    pub fn points(&self) -> usize {
        (self.upper / self.step).round() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub step: f64,
}

impl GridDensity {
    pub fn trapezoid_integral(&self) -> f64 {
        let v = &self.values;
        match v.len() {
            0 | 1 => 0.0,
            n => self.step * (0.5 * (v[0] + v[n - 1]) + v[1..n - 1].iter().sum::<f64>()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvolutionResult {
    pub density: GridDensity,
    /// `max_x |grid density - closed-form density|` over the grid.
    pub sup_distance: f64,
}

fn exponential_on_grid(rate: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|x| rate * (-rate * x).exp()).collect()
}

/// `h ( f_0 g_m / 2 + Σ_{0<i<m} f_i g_{m-i} + f_m g_0 / 2 )`
fn trapezoid_convolve(f: &[f64], g: &[f64], step: f64) -> Vec<f64> {
    (0..f.len())
        .map(|m| {
            if m == 0 {
                return 0.0;
            }
            let inner: f64 = (1..m).map(|i| f[i] * g[m - i]).sum();
            step * (0.5 * (f[0] * g[m] + f[m] * g[0]) + inner)
        })
        .collect()
}

type ClosedForm = Box<dyn Fn(f64) -> Result<f64>>;

/// Density of `Σ Exp(λ_i)` by iterated trapezoid convolution of the component
/// densities, compared against the closed form on the same grid.
///
/// A single rate is returned as sampled, with no convolution.
pub fn convolve_numeric(rates: &[f64], spec: GridSpec) -> Result<ConvolutionResult> {
    if rates.is_empty() {
        return Err(Error::TooFewRates { count: 0 });
    }
    for (index, &value) in rates.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveRate { index, value });
        }
    }
    if !(spec.step > 0.0 && spec.upper > spec.step) {
        return Err(Error::GridTooCoarse(format!("invalid grid {spec:?}")));
    }
    let fastest = rates.iter().copied().fold(0.0, f64::max);
    if spec.step * fastest > MAX_STEP_RATE {
        return Err(Error::GridTooCoarse(format!(
            "step {} too wide for rate {fastest}",
            spec.step
        )));
    }
    let grid: Vec<f64> = (0..spec.points()).map(|i| i as f64 * spec.step).collect();

    let (values, exact): (Vec<f64>, ClosedForm) = if rates.len() == 1 {
        let l = rates[0];
        (
            exponential_on_grid(l, &grid),
            Box::new(move |x: f64| Ok(l * (-l * x).exp())),
        )
    } else {
        let dist = HypoexpDistribution::from_rates(rates)?;
        let tail = dist.quantile(1.0 - 1e-8)?;
        if spec.upper < tail {
            return Err(Error::GridTooCoarse(format!(
                "upper limit {} below the 1 - 1e-8 quantile {tail}",
                spec.upper
            )));
        }
        let mut acc = exponential_on_grid(rates[0], &grid);
        for &l in &rates[1..] {
            acc = trapezoid_convolve(&acc, &exponential_on_grid(l, &grid), spec.step);
        }
        (acc, Box::new(move |x: f64| dist.pdf(x)))
    };
    let mut sup_distance = 0.0f64;
    for (x, v) in grid.iter().zip(&values) {
        sup_distance = sup_distance.max((v - exact(*x)?).abs());
    }
    Ok(ConvolutionResult {
        density: GridDensity {
            grid,
            values,
            step: spec.step,
        },
        sup_distance,
    })
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Draws one nonnegative component variable.
pub trait ComponentSampler: Sync {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64;
}

/// `Exp(rate)` by inverse transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialComponent {
    pub rate: f64,
}

impl ComponentSampler for ExponentialComponent {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        unit_exponential(rng) / self.rate
    }
}

impl<F> ComponentSampler for F
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self(rng)
    }
}

/// `count` draws of `Σ_j μ_j X_j` with i.i.d. components from `sampler`,
/// taken in decreasing-scale order.
pub fn mc_weighted_sum<S: ComponentSampler>(
    sampler: &S,
    mu: &ScaleVector,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let scales = mu.scales();
    let mut out = vec![0.0; count];
    fill_chunked(&mut out, seed, |rng| {
        scales.iter().map(|m| m * sampler.draw(rng)).sum()
    });
    Ok(out)
}

/// `Σ_j (ℓ_j/μ_j) f(x/μ_j)`, the signed mixture that must equal the density
/// of `Σ μ_j X_j` exactly when `f` is exponential.
pub fn scaled_mixture_density<F: Fn(f64) -> f64>(mu: &ScaleVector, f: F, x: f64) -> Result<f64> {
    let w = weights_from_scales(mu)?;
    Ok(signed_sum(
        w.values()
            .iter()
            .zip(mu.scales())
            .map(|(l, m)| l / m * f(x / m)),
    )
    .value)
}

/// `sup_x |F_N(x) - F(x)|` over the sorted sample.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "KS distance of an empty sample".into(),
        ));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        let above = ((i + 1) as f64 / n - f).abs();
        let below = (i as f64 / n - f).abs();
        d.max(above).max(below)
    }))
}

/// Asymptotic critical value `c(α)/√N`; `c(0.05) = 1.36`, `c(0.01) = 1.63`,
/// otherwise `c(α) = √(-ln(α/2)/2)`.
pub fn ks_critical_value(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level {alpha} must lie in (0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let c = if alpha == 0.05 {
        1.36
    } else if alpha == 0.01 {
        1.63
    } else {
        (-(alpha / 2.0).ln() / 2.0).sqrt()
    };
    Ok(c / (n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestVerdict {
    Reject,
    NotRejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub threshold: f64,
    pub alpha: f64,
    pub sample_size: usize,
    pub tuple_count: usize,
    pub fitted_lambda: f64,
    pub verdict: TestVerdict,
}

/// Tests whether `data` could be exponential.
///
/// Fits `λ̂ = 1/mean`, shuffles with `seed`, cuts the data into consecutive
/// blocks of `n = μ.len()`, forms `Σ μ_j x_j` per block and compares those
/// sums with the hypoexponential law of rates `λ̂/μ_j` by KS distance.
/// Rejection points away from the exponential family; non-rejection is only
/// consistency with it.
pub fn exponentiality_test(
    data: &[f64],
    mu: &ScaleVector,
    alpha: f64,
    seed: u64,
) -> Result<TestReport> {
    let n = mu.len();
    for (index, &value) in data.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveObservation { index, value });
        }
    }
    let required = n * MIN_OBSERVATIONS_PER_SCALE;
    if data.len() < required {
        return Err(Error::InsufficientData {
            len: data.len(),
            required,
        });
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let fitted_lambda = 1.0 / mean;

    let mut shuffled = data.to_vec();
    shuffled.shuffle(&mut stream_rng(seed, u64::MAX));
    let sums: Vec<f64> = shuffled
        .chunks_exact(n)
        .map(|block| block.iter().zip(mu.scales()).map(|(x, m)| m * x).sum())
        .collect();

    let dist = HypoexpDistribution::from_scales(mu, fitted_lambda)?;
    let statistic = ks_distance(&sums, |x| dist.cdf(x).unwrap_or(f64::NAN))?;
    let threshold = ks_critical_value(alpha, sums.len())?;
    let verdict = if statistic > threshold {
        TestVerdict::Reject
    } else {
        TestVerdict::NotRejected
    };
    Ok(TestReport {
        statistic,
        threshold,
        alpha,
        sample_size: data.len(),
        tuple_count: sums.len(),
        fitted_lambda,
        verdict,
    })
}
