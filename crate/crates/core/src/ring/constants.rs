//! The normalizing constants `c = prod_{i>=1} (1 - Q^-i)` and their
//! pentagonal-number series form, used as a cross-check.

/// Truncated product `prod_{i=1}^{T} (1 - Q^-i)` with `T` chosen so the
/// neglected tail changes the value by less than `tol`.
///
/// The tail factors satisfy `prod_{i>T}(1 - Q^-i) >= 1 - sum_{i>T} Q^-i`,
/// so the absolute truncation error is below
/// `(partial product) * Q^-T / (Q - 1)`.
pub fn c_constant(q: u64, tol: f64) -> f64 {
    assert!(q >= 2, "residue field size must be at least 2");
    assert!(tol > 0.0);
    let qf = q as f64;
    let mut product = 1.0f64;
    let mut term = 1.0f64; // Q^-i
    for _ in 0..20_000 {
        term /= qf;
        product *= 1.0 - term;
        let tail = product * term / (qf - 1.0);
        if tail < tol {
            break;
        }
    }
    product
}

/// Partial pentagonal-number sum `sum_{n=-terms..terms} (-1)^n u^{(3n^2-n)/2}`
/// with `u = 1/Q`; agrees with [`c_constant`] within the alternating tail.
pub fn c_constant_pentagonal(q: u64, terms: u32) -> f64 {
    assert!(q >= 2);
    let u = 1.0 / q as f64;
    let mut sum = 1.0f64; // n = 0 term
    for n in 1..=terms as i64 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let e_pos = (3 * n * n - n) / 2;
        let e_neg = (3 * n * n + n) / 2; // exponent for -n
        sum += sign * (u.powi(e_pos as i32) + u.powi(e_neg as i32));
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from the truncated product at tol = 1e-15, cross-checked against
    // the pentagonal series below.
    const C3: f64 = 0.5601260779279489;
    const C2: f64 = 0.2887880950866024;

    #[test]
    fn known_values() {
        assert!((c_constant(3, 1e-12) - C3).abs() < 1e-11);
        assert!((c_constant(2, 1e-12) - C2).abs() < 1e-11);
    }

    #[test]
    fn large_q_first_factor_bound() {
        let q = 1_000_000u64;
        let c = c_constant(q, 1e-12);
        assert!(c > 1.0 - 2.0 / q as f64);
        assert!(c < 1.0 - 1.0 / (q as f64) / (1.0 + 1e-6) + 1e-9);
    }

    #[test]
    fn pentagonal_matches_product() {
        for q in [2u64, 3, 4, 5, 9, 25] {
            let prod = c_constant(q, 1e-14);
            let pent = c_constant_pentagonal(q, 8);
            assert!(
                (prod - pent).abs() < 1e-10,
                "q={q}: product {prod} vs pentagonal {pent}"
            );
        }
        assert!((c_constant(3, 1e-14) - c_constant_pentagonal(3, 6)).abs() < 1e-10);
        assert!((c_constant(2, 1e-14) - c_constant_pentagonal(2, 8)).abs() < 1e-10);
    }

    #[test]
    fn zero_terms_is_one() {
        assert_eq!(c_constant_pentagonal(17, 0), 1.0);
    }

    #[test]
    fn bracketing_from_alternating_series() {
        for q in [2u64, 3, 4, 5, 9, 25, 49, 125] {
            let c = c_constant(q, 1e-14);
            let qf = q as f64;
            assert!(c > 1.0 - 1.0 / qf - 1.0 / (qf * qf), "lower bracket fails at q={q}");
            assert!(c < 1.0 - 1.0 / qf + 2.0 * qf.powi(-5), "upper bracket fails at q={q}");
        }
    }
}
