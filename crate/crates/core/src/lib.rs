//! Hypoexponential distributions with pairwise distinct rates, and a
//! truncated power series verifier for the exponential characterization they
//! imply.
//!
//! * [`rates`]: validated rate/scale vectors and Lagrange weights
//! * [`distribution`]: density, cdf, moments, Laplace transform, quantiles, sampling
//! * [`series`]: truncated power series and the multi-index product rule
//! * [`characterization`]: structural coefficients, residuals, forward solvers
//! * [`oracle`]: convolution, Monte Carlo and KS oracles, exponentiality test

pub mod characterization;
pub mod distribution;
pub mod error;
pub mod oracle;
pub mod rates;
pub mod sampling;
pub mod series;
pub mod summation;
pub mod symmetric;

pub use characterization::{
    c_coefficients, d_coefficients, forward_solve_theorem1, forward_solve_theorem2,
    is_exponential_series, lemma2_check, residual_h, residual_q, Equation, ResidualReport, Verdict,
};
pub use distribution::{HypoexpDistribution, LaplaceForm};
pub use error::{Error, Result};
pub use rates::{
    binomial_weights, lagrange_weights, validate_rates, validate_scales, weights_from_scales,
    RateVector, ScaleVector, WeightVector,
};
pub use series::{Series, DEFAULT_ORDER};
