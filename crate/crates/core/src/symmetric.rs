//! Symmetric polynomials evaluated at a point.
//!
//! `h_k` (complete homogeneous) drives the moments and the structural
//! coefficients; `e_k` (elementary) gives the closed form of the all-ones
//! multi-index contribution.

/// Complete homogeneous symmetric polynomials `h_0..=h_max_k` of `x`.
///
/// Uses the prefix recurrence `h_k(x_1..x_m) = h_k(x_1..x_{m-1}) + x_m h_{k-1}(x_1..x_m)`,
/// O(n k) and free of subtraction when every `x_i` is positive.
pub fn complete_homogeneous(x: &[f64], max_k: usize) -> Vec<f64> {
    let mut h = vec![0.0; max_k + 1];
    h[0] = 1.0;
    for &xm in x {
        for k in 1..=max_k {
            h[k] += xm * h[k - 1];
        }
    }
    h
}

/// `h_k(x) - p_k(x)` for `k = 0..=max_k`, where `p_k` is the power sum
/// (the `k = 0` entry is left at zero).
///
/// The excess collects the mixed monomials only, so it is accumulated from
/// nonnegative terms and is strictly positive for `k >= 2` when at least
/// two entries are positive.
pub fn homogeneous_excess(x: &[f64], max_k: usize) -> Vec<f64> {
    // h over the prefix seen so far, and the excess over the same prefix
    let mut h = vec![0.0; max_k + 1];
    h[0] = 1.0;
    let mut excess = vec![0.0; max_k + 1];
    let mut first = true;
    for &xm in x {
        if first {
            // a single variable has no mixed monomials
            for k in 1..=max_k {
                h[k] = xm.powi(k as i32);
            }
            first = false;
            continue;
        }
        let mut new_h = h.clone();
        for k in 1..=max_k {
            // h_k(prefix + x_m) = sum_{j=0}^{k} x_m^j h_{k-j}(prefix)
            let mut mixed = 0.0;
            let mut xp = 1.0;
            for j in 1..k {
                xp *= xm;
                mixed += xp * h[k - j];
            }
            excess[k] += mixed;
            new_h[k] = h[k] + mixed + xm.powi(k as i32);
        }
        h = new_h;
    }
    excess
}

/// Elementary symmetric polynomials `e_0..=e_n` of `x`.
pub fn elementary(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (m, &xm) in x.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += xm * e[k - 1];
        }
    }
    e
}

/// Power sums `p_k = sum_i x_i^k`, `k = 0..=max_k`.
pub fn power_sums(x: &[f64], max_k: usize) -> Vec<f64> {
    (0..=max_k)
        .map(|k| x.iter().map(|v| v.powi(k as i32)).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_two_variables() {
        // h_2(1, 1/2) = 1 + 1/4 + 1/2
        let h = complete_homogeneous(&[1.0, 0.5], 3);
        assert_eq!(h, vec![1.0, 1.5, 1.75, 1.875]);
    }

    #[test]
    fn excess_is_h_minus_p() {
        let x = [0.3, 1.7, 0.9, 2.2];
        let h = complete_homogeneous(&x, 8);
        let p = power_sums(&x, 8);
        let ex = homogeneous_excess(&x, 8);
        assert_eq!(ex[1], 0.0);
        for k in 1..=8 {
            assert!((ex[k] - (h[k] - p[k])).abs() <= 1e-12 * h[k], "k={k}");
            if k >= 2 {
                assert!(ex[k] > 0.0);
            }
        }
    }

    #[test]
    fn elementary_small() {
        // (1+t)(1+2t)(1+3t) = 1 + 6t + 11t^2 + 6t^3
        assert_eq!(elementary(&[1.0, 2.0, 3.0]), vec![1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn newton_identity_between_e_and_h() {
        let x = [0.7, 0.2, 1.3];
        let e = elementary(&x);
        let h = complete_homogeneous(&x, 6);
        for k in 1..=6 {
            let s: f64 = (0..=k)
                .map(|m| {
                    let ek = if k - m < e.len() { e[k - m] } else { 0.0 };
                    if m % 2 == 0 {
                        ek * h[m]
                    } else {
                        -ek * h[m]
                    }
                })
                .sum();
            assert!(s.abs() < 1e-13, "k={k}: {s}");
        }
    }
}
