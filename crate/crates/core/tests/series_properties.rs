mod common;

use common::binom;
use hypoexp::series::{
    composition_count, enumerate_compositions, leibniz_coefficient, product_of_scaled, LambdaClass,
};
use hypoexp::Series;
use proptest::prelude::*;

fn series(order: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(-1.0f64..1.0, order + 1).prop_map(|c| Series::new(c).unwrap())
}

fn unit_series(order: usize) -> impl Strategy<Value = Series> {
    (0.5f64..2.0, prop::collection::vec(-1.0f64..1.0, order)).prop_map(|(c0, rest)| {
        let mut c = vec![c0];
        c.extend(rest);
        Series::new(c).unwrap()
    })
}

/// Coefficients of `|x| * |y|`, the natural rounding scale of `x * y`.
fn product_scale(x: &Series, y: &Series) -> Vec<f64> {
    x.abs()
        .mul(&y.abs())
        .unwrap()
        .coeffs()
        .iter()
        .map(|v| v.max(1.0))
        .collect()
}

proptest! {
    #[test]
    fn multiplication_commutes(x in series(12), y in series(12)) {
        let a = x.mul(&y).unwrap();
        let b = y.mul(&x).unwrap();
        for (k, s) in product_scale(&x, &y).into_iter().enumerate() {
            prop_assert!((a.coeff(k) - b.coeff(k)).abs() <= 1e-13 * s);
        }
    }

    #[test]
    fn multiplication_associates(x in series(12), y in series(12), z in series(12)) {
        let a = x.mul(&y).unwrap().mul(&z).unwrap();
        let b = x.mul(&y.mul(&z).unwrap()).unwrap();
        let scale = x.abs().mul(&y.abs()).unwrap().mul(&z.abs()).unwrap();
        for k in 0..=12 {
            prop_assert!((a.coeff(k) - b.coeff(k)).abs() <= 1e-13 * scale.coeff(k).max(1.0));
        }
    }

    #[test]
    fn multiplication_distributes(x in series(10), y in series(10), z in series(10)) {
        let a = x.mul(&y.add(&z).unwrap()).unwrap();
        let b = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        let scale = x.abs().mul(&y.abs().add(&z.abs()).unwrap()).unwrap();
        for k in 0..=10 {
            prop_assert!((a.coeff(k) - b.coeff(k)).abs() <= 1e-13 * scale.coeff(k).max(1.0));
        }
    }

    #[test]
    fn reciprocal_round_trips(u in unit_series(12)) {
        let r = u.reciprocal().unwrap();
        let p = u.mul(&r).unwrap();
        prop_assert!((p.coeff(0) - 1.0).abs() <= 1e-15);
        let scale = product_scale(&u, &r);
        for k in 1..=12 {
            prop_assert!(p.coeff(k).abs() <= 1e-13 * scale[k], "k={k} {}", p.coeff(k));
        }
    }

    #[test]
    fn argument_scaling_composes(u in series(10), a in 0.1f64..2.0, b in 0.1f64..2.0) {
        let x = u.scale_arg(a).scale_arg(b);
        let y = u.scale_arg(a * b);
        prop_assert!(x.approx_eq(&y, 1e-14));
    }

    #[test]
    fn leibniz_matches_product(
        u in series(8),
        scales in prop::collection::vec(0.05f64..1.0, 1..=4),
    ) {
        let prod = product_of_scaled(&u, &scales);
        let magnitude = product_of_scaled(&u.abs(), &scales);
        for k in 0..=8 {
            let l = leibniz_coefficient(&u, &scales, k).unwrap();
            let scale = prod.coeff(k).abs().max(l.abs()).max(magnitude.coeff(k));
            prop_assert!((l - prod.coeff(k)).abs() <= 1e-12 * scale, "k={k}: {l} vs {}", prod.coeff(k));
        }
    }
}

#[test]
fn compositions_split_into_three_classes() {
    for m in 1..=6usize {
        for k in 1..=8usize {
            let all = enumerate_compositions(k, m).unwrap();
            let total = binom((k + m - 1) as u64, (m - 1) as u64) as usize;
            assert_eq!(all.len(), total);
            assert_eq!(composition_count(k, m), total as u128);
            let count = |c: LambdaClass| all.iter().filter(|a| a.lambda_class() == c).count();
            let single = count(LambdaClass::Single);
            let ones = count(LambdaClass::AllOnes);
            let mixed = count(LambdaClass::Mixed);
            assert_eq!(single + ones + mixed, total);
            assert_eq!(single, m);
            let expect_ones = if k >= 2 && k <= m {
                binom(m as u64, k as u64) as usize
            } else {
                0
            };
            assert_eq!(ones, expect_ones, "k={k} m={m}");
            for a in &all {
                assert_eq!(a.entries().iter().sum::<u32>(), k as u32);
                let max = *a.entries().iter().max().unwrap() as usize;
                let class = a.lambda_class();
                match class {
                    LambdaClass::Single => assert_eq!(max, k),
                    LambdaClass::AllOnes => assert!(k >= 2 && max == 1),
                    LambdaClass::Mixed => assert!(k >= 3 && (2..k).contains(&max)),
                }
            }
        }
    }
}

#[test]
fn compositions_are_sorted_and_distinct() {
    let all = enumerate_compositions(5, 4).unwrap();
    for w in all.windows(2) {
        assert!(w[0].entries() < w[1].entries());
    }
}
