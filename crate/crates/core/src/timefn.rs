//! Scalar functions of time on `(0, T]`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function of time with an optional analytic derivative and
/// optional descriptors of its behaviour as `t -> 0+`.
#[derive(Clone)]
pub struct TimeFunction {
    value: Scalar,
    derivative: Option<Scalar>,
    horizon: f64,
    /// Asserted value of `lim_{t -> 0+} f(t)`.
    pub zero_limit_hint: Option<f64>,
    /// Exponent `p` such that `f(t) ~ c t^p` near zero.
    pub power_hint: Option<f64>,
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFunction")
            .field("horizon", &self.horizon)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("zero_limit_hint", &self.zero_limit_hint)
            .field("power_hint", &self.power_hint)
            .finish()
    }
}

impl TimeFunction {
    pub fn new(horizon: f64, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TimeFunction {
            value: Arc::new(value),
            derivative: None,
            horizon,
            zero_limit_hint: None,
            power_hint: None,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_zero_limit(mut self, limit: f64) -> Self {
        self.zero_limit_hint = Some(limit);
        self
    }

    pub fn with_power(mut self, p: f64) -> Self {
        self.power_hint = Some(p);
        self
    }

    pub fn constant(horizon: f64, c: f64) -> Self {
        TimeFunction::new(horizon, move |_| c)
            .with_derivative(|_| 0.0)
            .with_zero_limit(c)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    /// Evaluates and rejects non-finite results.
    pub fn try_eval(&self, t: f64) -> Result<f64> {
        let v = self.eval(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { t, value: v })
        }
    }

    pub fn analytic_derivative(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    /// Pointwise map, dropping the derivative.
    pub fn map(&self, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> TimeFunction {
        let f = self.value.clone();
        TimeFunction::new(self.horizon, move |t| g(t, f(t)))
    }
}

/// Result of a numerical derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Set when the symmetric stencil did not fit inside `(0, T]`.
    pub lower_accuracy: bool,
}

/// Central-difference step used throughout: `max(1e-7 T, 1e-6 t)`.
pub fn fd_step(horizon: f64, t: f64) -> f64 {
    (1e-7 * horizon).max(1e-6 * t)
}

/// Derivative of `f` at `t`. Uses the analytic derivative when present,
/// otherwise a central difference; near `0` or `T` the stencil becomes
/// one-sided (second order) and the result is flagged.
pub fn differentiate(f: &TimeFunction, t: f64) -> Result<Derivative> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cannot differentiate at t = {t}"
        )));
    }
    if let Some(d) = f.analytic_derivative(t) {
        return Ok(Derivative {
            value: d,
            lower_accuracy: false,
        });
    }
    let horizon = f.horizon();
    let mut h = fd_step(horizon, t);
    if t - h > 0.0 && t + h <= horizon * (1.0 + 1e-12) {
        let value = (f.try_eval(t + h)? - f.try_eval(t - h)?) / (2.0 * h);
        return Ok(Derivative {
            value,
            lower_accuracy: false,
        });
    }
    if t - h <= 0.0 {
        // forward: (-3 f0 + 4 f1 - f2) / 2h
        h = h.min(0.25 * t.max(f64::MIN_POSITIVE));
        let (f0, f1, f2) = (f.try_eval(t)?, f.try_eval(t + h)?, f.try_eval(t + 2.0 * h)?);
        Ok(Derivative {
            value: (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h),
            lower_accuracy: true,
        })
    } else {
        let (f0, f1, f2) = (f.try_eval(t)?, f.try_eval(t - h)?, f.try_eval(t - 2.0 * h)?);
        Ok(Derivative {
            value: (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h),
            lower_accuracy: true,
        })
    }
}

/// `n` log-spaced points on `[lo, hi]`, both ends included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_difference_of_square() {
        let f = TimeFunction::new(2.0, |t| t * t);
        let d = differentiate(&f, 1.0).unwrap();
        assert!((d.value - 2.0).abs() < 1e-8);
        assert!(!d.lower_accuracy);
    }

    #[test]
    fn central_difference_of_sinh_squared() {
        let f = TimeFunction::new(2.0, |t: f64| t.sinh().powi(2));
        let d = differentiate(&f, 1.0).unwrap();
        assert!((d.value - 2.0f64.sinh()).abs() < 1e-6);
    }

    #[test]
    fn analytic_derivative_passes_through() {
        let f = TimeFunction::new(1.0, |t| t.powi(3)).with_derivative(|_| 42.0);
        assert_eq!(differentiate(&f, 0.5).unwrap().value, 42.0);
    }

    #[test]
    fn stencil_near_horizon_is_one_sided_and_flagged() {
        let f = TimeFunction::new(1.0, |t| t * t * t);
        let d = differentiate(&f, 1.0).unwrap();
        assert!(d.lower_accuracy);
        assert!((d.value - 3.0).abs() < 1e-8);
        let d0 = differentiate(&f, 1e-8).unwrap();
        assert!(d0.lower_accuracy);
        assert!(d0.value.abs() < 1e-12);
        assert!(differentiate(&f, 0.0).is_err());
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = log_grid(1e-3, 5.0, 50);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[49], 5.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
