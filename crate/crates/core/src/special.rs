//! Elementary functions with cancellation-free small-argument branches.

/// `sinh(y) - y`, accurate for small `|y|`.
pub fn sinh_minus_x(y: f64) -> f64 {
    if y.abs() < 0.5 {
        let y2 = y * y;
        // y^3/3! + y^5/5! + ... + y^15/15!
        let mut term = y * y2 / 6.0;
        let mut sum = term;
        let mut k = 3.0;
        while k < 16.0 {
            term *= y2 / ((k + 1.0) * (k + 2.0));
            sum += term;
            k += 2.0;
        }
        sum
    } else {
        y.sinh() - y
    }
}

/// `(sinh(x) cosh(x) - x) / sinh^2(x)`, the growth term of the hyperbolic
/// Li-Xu coefficient. Tends to `2x/3` at zero and to 1 at infinity.
pub fn lixu_ratio(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        x * (2.0 / 3.0 + x2 * (-4.0 / 45.0 + x2 * (4.0 / 315.0 - x2 * 8.0 / 4725.0)))
    } else if x > 20.0 {
        // coth(x) - x / sinh^2(x), with sinh^2 written through e^{-2x}
        let e = (-2.0 * x).exp();
        1.0 / x.tanh() - 4.0 * x * e / ((1.0 - e) * (1.0 - e))
    } else {
        let s = x.sinh();
        0.5 * sinh_minus_x(2.0 * x) / (s * s)
    }
}

/// `coth(x)` for `x > 0`.
pub fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// `1/r - coth(r)`, odd and vanishing at the origin.
pub fn inv_minus_coth(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        -r * (1.0 / 3.0 - r2 * (1.0 / 45.0 - r2 * 2.0 / 945.0))
    } else {
        1.0 / r - coth(r)
    }
}

/// `1/sinh^2(r) - 1/r^2`, even with value `-1/3` at the origin.
pub fn inv_sinh2_minus_inv_r2(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        -1.0 / 3.0 + r2 * (1.0 / 15.0 - r2 * 2.0 / 189.0)
    } else {
        let s = r.sinh();
        1.0 / (s * s) - 1.0 / (r * r)
    }
}

/// `r * coth(r)`, even with value 1 at the origin.
pub fn r_coth(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        1.0 + r2 * (1.0 / 3.0 - r2 / 45.0)
    } else {
        r * coth(r)
    }
}

/// `ln(r / sinh(r))`.
pub fn ln_r_over_sinh(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        -r2 / 6.0 + r2 * r2 / 180.0
    } else if r > 30.0 {
        r.ln() - r + std::f64::consts::LN_2 - (-(-2.0 * r).exp()).ln_1p()
    } else {
        (r / r.sinh()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_minus_x_matches_direct_form_away_from_zero() {
        for &y in &[0.3f64, 0.49, 0.51, 1.0, 3.0] {
            let direct = y.sinh() - y;
            assert!((sinh_minus_x(y) - direct).abs() <= 1e-15 * direct.abs().max(1.0));
        }
        // small argument: leading term
        let y = 1e-6;
        assert!((sinh_minus_x(y) / (y * y * y / 6.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lixu_ratio_is_continuous_across_branches() {
        for &x in &[1e-4, 20.0] {
            let lo = lixu_ratio(x * (1.0 - 1e-12));
            let hi = lixu_ratio(x * (1.0 + 1e-12));
            assert!((lo - hi).abs() < 1e-13, "jump at {x}: {lo} vs {hi}");
        }
        assert!(
            (lixu_ratio(0.5) - (0.5f64.sinh() * 0.5f64.cosh() - 0.5) / 0.5f64.sinh().powi(2)).abs()
                < 1e-15
        );
        assert_eq!(lixu_ratio(1e6), 1.0);
    }

    #[test]
    fn origin_series_agree_with_direct_forms() {
        let r = 1.0e-3 * (1.0 + 1e-9);
        let rm = 1.0e-3 * (1.0 - 1e-9);
        assert!((inv_minus_coth(r) - inv_minus_coth(rm)).abs() < 1e-12);
        assert!((inv_sinh2_minus_inv_r2(r) - inv_sinh2_minus_inv_r2(rm)).abs() < 1e-9);
        assert!((r_coth(r) - r_coth(rm)).abs() < 1e-12);
        assert!((ln_r_over_sinh(r) - ln_r_over_sinh(rm)).abs() < 1e-12);
        assert!((ln_r_over_sinh(40.0) - (40.0f64 / 40.0f64.sinh()).ln()).abs() < 1e-12);
    }
}
