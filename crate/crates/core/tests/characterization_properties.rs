mod common;

use common::rates_strategy;
use hypoexp::characterization::{partition_contributions, Equation};
use hypoexp::{
    c_coefficients, d_coefficients, forward_solve_theorem1, forward_solve_theorem2, residual_h,
    residual_q, HypoexpDistribution, LaplaceForm, ScaleVector, Series, Verdict,
};
use proptest::prelude::*;

fn scales_strategy(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ScaleVector> {
    rates_strategy(n, 1e-3, 1.0).prop_map(|m| ScaleVector::new(&m).unwrap())
}

fn uniform_psi(order: usize) -> Series {
    // Laplace transform of U(0, 1): Σ (-t)^k / (k+1)!
    let mut fact = 1.0;
    let phi: Vec<f64> = (0..=order)
        .map(|k| {
            fact *= (k + 1) as f64;
            (-1f64).powi(k as i32) / fact
        })
        .collect();
    Series::new(phi).unwrap().reciprocal().unwrap()
}

fn erlang_psi(m: usize, order: usize) -> Series {
    let base = Series::from_poly(&[1.0, 1.0], order).unwrap();
    (1..m).fold(base.clone(), |acc, _| acc.mul(&base).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structural_signs(mu in scales_strategy(2..=6)) {
        let c = c_coefficients(&mu, 12, 1e-10).unwrap();
        let d = d_coefficients(&mu, 12, 1e-10).unwrap();
        prop_assert!(c.get(1).abs() <= 1e-10 * c.magnitude(1).max(1.0));
        prop_assert!((d.get(1) - 1.0).abs() <= 1e-10);
        for k in 2..=12 {
            prop_assert!(c.get(k) < 0.0, "c_{k} = {}", c.get(k));
            prop_assert!(d.get(k) > 0.0, "d_{k} = {}", d.get(k));
        }
    }

    #[test]
    fn all_ones_class_cancels(
        mu in scales_strategy(2..=4),
        a1 in 0.1f64..10.0,
        rest in prop::collection::vec(-2.0f64..2.0, 5),
    ) {
        let mut coeffs = vec![1.0, a1];
        coeffs.extend(rest);
        let psi = Series::new(coeffs).unwrap();
        let c = c_coefficients(&mu, 6, 1e-10).unwrap();
        let d = d_coefficients(&mu, 6, 1e-10).unwrap();
        let h = residual_h(&psi, &mu, 1e-10).unwrap();
        let q = residual_q(&psi, &mu, 1e-10).unwrap();
        for k in 2..=6 {
            for eq in [Equation::H, Equation::Q] {
                let parts = partition_contributions(&psi, &mu, eq, k).unwrap();
                let scale = parts.max_term.max(1.0);
                prop_assert!(parts.all_ones.abs() <= 1e-11 * scale, "k={k} {eq:?} {}", parts.all_ones);
                let (single, total) = match eq {
                    Equation::H => (c.get(k) * psi.coeff(k), h.residuals[k]),
                    Equation::Q => (-d.get(k) * psi.coeff(k), -q.residuals[k]),
                };
                prop_assert!((parts.single - single).abs() <= 1e-11 * scale);
                let assembled = parts.single + parts.all_ones + parts.mixed;
                prop_assert!((assembled - total).abs() <= 1e-11 * scale, "k={k} {eq:?}");
            }
        }
    }

    #[test]
    fn erlang_and_uniform_candidates_are_flagged(mu in scales_strategy(2..=6)) {
        for psi in [erlang_psi(2, 16), erlang_psi(3, 16), uniform_psi(16)] {
            let r = residual_h(&psi, &mu, 1e-10).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Incompatible);
            prop_assert!(r.first_violation_k.unwrap() <= 4);
        }
    }

    #[test]
    fn residual_and_laplace_identity_agree(
        mu in scales_strategy(2..=6),
        lambda in 0.1f64..10.0,
        ts in prop::collection::vec(0.0f64..20.0, 10),
    ) {
        let psi = Series::from_poly(&[1.0, 1.0 / lambda], 16).unwrap();
        let series_ok = residual_h(&psi, &mu, 1e-10).unwrap().is_compatible();
        let d = HypoexpDistribution::from_scales(&mu, lambda).unwrap();
        let laplace_ok = ts.iter().all(|&t| {
            let p = d.laplace(t, LaplaceForm::Product).unwrap();
            let m = d.laplace(t, LaplaceForm::Mixture).unwrap();
            (p - m).abs() <= 1e-10 * p.abs().max(d.laplace_mixture_scale(t))
        });
        prop_assert!(series_ok);
        prop_assert!(laplace_ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn theorem1_solution_is_exponential(mu in scales_strategy(2..=6), a1 in 0.1f64..10.0) {
        let psi = forward_solve_theorem1(&mu, a1, 16, 1e-10).unwrap();
        prop_assert_eq!(psi.coeff(0), 1.0);
        prop_assert_eq!(psi.coeff(1), a1);
        for k in 2..=16 {
            prop_assert!(psi.coeff(k).abs() < 1e-10 * a1.powi(k as i32).max(1.0), "a_{k} = {}", psi.coeff(k));
        }
        prop_assert!(residual_h(&psi, &mu, 1e-10).unwrap().is_compatible());
    }

    #[test]
    fn theorem2_solution_is_unit_exponential(mu in scales_strategy(2..=6)) {
        let psi = forward_solve_theorem2(&mu, 16, 1e-10).unwrap();
        prop_assert!((psi.coeff(1) - 1.0).abs() < 1e-10);
        for k in 2..=16 {
            prop_assert!(psi.coeff(k).abs() < 1e-10, "a_{k} = {}", psi.coeff(k));
        }
        prop_assert!(residual_q(&psi, &mu, 1e-10).unwrap().is_compatible());
    }
}

#[test]
fn erlang_square_fails_at_second_order() {
    let mu = ScaleVector::new(&[1.0, 0.5]).unwrap();
    let r = residual_h(&erlang_psi(2, 8), &mu, 1e-10).unwrap();
    assert_eq!(r.first_violation_k, Some(2));
}

#[test]
fn exponential_candidate_is_compatible_for_both_equations() {
    let mu = ScaleVector::new(&[1.0, 0.5, 0.25]).unwrap();
    let psi = Series::from_poly(&[1.0, 1.0], 16).unwrap();
    assert!(residual_h(&psi, &mu, 1e-10).unwrap().is_compatible());
    assert!(residual_q(&psi, &mu, 1e-10).unwrap().is_compatible());
    let slow = Series::from_poly(&[1.0, 2.0], 16).unwrap();
    assert_eq!(
        residual_q(&slow, &mu, 1e-10).unwrap().first_violation_k,
        Some(1)
    );
}
