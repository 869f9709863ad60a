//! Adaptive Gauss-Kronrod quadrature and integrals from an integrable
//! endpoint singularity at zero.

use crate::error::{Error, Result};
use crate::timefn::TimeFunction;

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for integrals over `(0, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Smallest lower limit used in place of 0; `None` means `1e-12 T`.
    pub t_floor: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            t_floor: None,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.t_floor.is_some_and(|f| f < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bad quadrature spec {self:?}"
            )));
        }
        Ok(())
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, fvj) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        *fvj = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// Adaptive bisection on `[a, b]` until the summed error estimate drops below
/// `max(abs_tol, rel_tol |I|)`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    const LIMIT: usize = 500;
    if a == b {
        return Ok(0.0);
    }
    // no tolerance below the roundoff floor of the rule itself
    let rel_tol = rel_tol.max(100.0 * f64::EPSILON);
    let mut segs = vec![kronrod15(&f, a, b)];
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::NonConvergence {
                t: b,
                reason: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(value);
        }
        if segs.len() >= LIMIT {
            return Err(Error::NonConvergence {
                t: b,
                reason: format!("subdivision limit on [{a}, {b}] (error {error:e})"),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval exhausted at double precision
            return Ok(value);
        }
        segs.push(kronrod15(&f, s.a, mid));
        segs.push(kronrod15(&f, mid, s.b));
    }
}

/// `∫_0^t f(s) ds` for integrands continuous on `(0, t]` with at worst an
/// integrable power singularity at 0. The interval is cut into dyadic pieces
/// `[t 2^{-j-1}, t 2^{-j}]`; once the piece ratio settles the remaining tail is
/// summed as a geometric series. A ratio that tends to 1 means the integral
/// diverges at 0.
pub fn integrate_from_zero(f: &TimeFunction, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_fn_from_zero(|s| f.eval(s), t, f.horizon(), f.power_hint, spec)
}

/// Closure form of [`integrate_from_zero`].
pub fn integrate_fn_from_zero(
    f: impl Fn(f64) -> f64,
    t: f64,
    horizon: f64,
    power_hint: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(t > 0.0) {
        return if t == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::InvalidParameter(format!("upper limit {t} < 0")))
        };
    }
    let floor = spec.t_floor.unwrap_or(1e-12 * horizon).min(1e-9 * t);
    let piece_rel = 0.5 * spec.rel_tol;
    let mut pieces: Vec<f64> = Vec::with_capacity(64);
    let mut sum = 0.0;
    let mut hi = t;
    let hint_ratio = power_hint.map(|p| 0.5f64.powf(p + 1.0));
    loop {
        let lo = 0.5 * hi;
        if lo < floor {
            break;
        }
        let piece = integrate(&f, lo, hi, spec.abs_tol * 1e-3, piece_rel)?;
        sum += piece;
        pieces.push(piece);
        hi = lo;
        let m = pieces.len();
        let tol = spec.abs_tol.max(spec.rel_tol * sum.abs());
        if m >= 3 {
            if pieces[m - 3..].iter().all(|&p| p == 0.0) {
                return Ok(sum);
            }
            if let Some(r) = settled_ratio(&pieces, hint_ratio) {
                let tail = pieces[m - 1] * r / (1.0 - r);
                if tail.abs() <= tol {
                    return Ok(sum + tail);
                }
            }
        }
    }
    let m = pieces.len();
    if m < 3 {
        return Err(Error::NonConvergence {
            t,
            reason: "too few dyadic pieces above the floor".into(),
        });
    }
    let tol = spec.abs_tol.max(spec.rel_tol * sum.abs());
    match settled_ratio(&pieces, hint_ratio) {
        Some(r) => Ok(sum + pieces[m - 1] * r / (1.0 - r)),
        None if pieces[m - 1].abs() <= tol => Ok(sum),
        None => {
            let r = pieces[m - 1] / pieces[m - 2];
            Err(Error::NonConvergence {
                t,
                reason: format!(
                    "dyadic piece ratio {r} does not settle below 1 (non-integrable at 0?)"
                ),
            })
        }
    }
}

// Geometric ratio of successive dyadic pieces, if it has settled in [0, 1).
fn settled_ratio(pieces: &[f64], hint: Option<f64>) -> Option<f64> {
    let m = pieces.len();
    let (a, b, c) = (pieces[m - 3], pieces[m - 2], pieces[m - 1]);
    if b == 0.0 || a == 0.0 {
        return None;
    }
    let (r1, r2) = (b / a, c / b);
    if !(0.0..1.0 - 1e-6).contains(&r2) || (r1 - r2).abs() > 1e-4 {
        return None;
    }
    if let Some(h) = hint {
        if (h - r2).abs() <= 1e-4 {
            return Some(h);
        }
    }
    Some(r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_high_degree_polynomials() {
        for deg in 0..=22 {
            let v = integrate(|x: f64| x.powi(deg), 0.0, 1.0, 1e-300, 1e-15).unwrap();
            assert!(
                (v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14,
                "degree {deg}: {v}"
            );
        }
    }

    #[test]
    fn polynomial_from_zero() {
        let f = TimeFunction::new(1.0, |s| s * s);
        let v = integrate_from_zero(&f, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let f = TimeFunction::new(1.0, |s: f64| 1.0 / s.sqrt());
        let v = integrate_from_zero(&f, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn strong_singularity_near_the_integrability_edge() {
        // ∫_0^1 s^{-0.9} ds = 10
        let f = TimeFunction::new(1.0, |s: f64| s.powf(-0.9));
        let v = integrate_from_zero(&f, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 10.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn reciprocal_diverges() {
        let f = TimeFunction::new(1.0, |s| 1.0 / s);
        let e = integrate_from_zero(&f, 1.0, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(e, Error::NonConvergence { .. }));
    }

    #[test]
    fn integral_is_monotone_in_upper_limit() {
        let f = TimeFunction::new(2.0, |s: f64| s.powf(-0.5) * (1.0 + s));
        let spec = QuadratureSpec::default();
        let mut prev = 0.0;
        for i in 1..=20 {
            let t = 0.1 * i as f64;
            let v = integrate_from_zero(&f, t, &spec).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}
