//! Gradient-estimate data model and the closed-form bound families.
//!
//! Every estimate is stored in the form
//!
//! ```text
//! beta(t) |∇f|^2 - f_t <= psi(t)
//! ```
//!
//! and exposes the equivalent `|∇f|^2 - alpha(t) f_t <= phi(t)` through
//! `alpha = 1/beta`, `phi = psi/beta`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coefficient::Generator;
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::special::{coth, lixu_ratio};
use crate::timefn::{log_grid, TimeFunction};

/// Ambient problem data: dimension `n`, Ricci lower bound `Ric >= -k g`,
/// and time horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateContext {
    pub n: u32,
    pub k: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl EstimateContext {
    pub fn new(n: u32, k: f64, horizon: f64) -> Result<Self> {
        let ctx = EstimateContext { n, k, horizon };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension n = {} < 2",
                self.n
            )));
        }
        if !(self.k >= 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Ricci constant k = {} must be >= 0",
                self.k
            )));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "horizon T = {} must be > 0",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }
}

/// One evaluation of an estimate at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub t: f64,
    pub beta: f64,
    pub psi: f64,
    pub alpha: f64,
    pub phi: f64,
}

impl BoundSample {
    fn from_beta(t: f64, beta: f64, psi: f64) -> Self {
        BoundSample {
            t,
            beta,
            psi,
            alpha: 1.0 / beta,
            phi: psi / beta,
        }
    }

    fn from_alpha(t: f64, alpha: f64, phi: f64) -> Self {
        BoundSample {
            t,
            beta: 1.0 / alpha,
            psi: phi / alpha,
            alpha,
            phi,
        }
    }
}

/// The bound families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Li-Yau-Davies with constant `beta`.
    Lyd,
    /// Hamilton's estimate, `beta = e^{-2kt}`.
    Hamilton,
    /// Li-Xu, hyperbolic-function coefficients.
    LixuHyperbolic,
    /// Li-Xu, linear coefficients.
    LixuLinear,
    /// Qian's family `alpha = 1 + theta k t`.
    QianTheta,
    /// Improved Li-Yau-Davies, valid for `t > (1-beta)/(k beta)`.
    ImprovedLyd,
    Cor18Case1,
    Cor18Case2,
    Cor18Case3,
    /// Produced from a coefficient function `b(t)`.
    GeneratedFromB,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Lyd,
        Family::Hamilton,
        Family::LixuHyperbolic,
        Family::LixuLinear,
        Family::QianTheta,
        Family::ImprovedLyd,
        Family::Cor18Case1,
        Family::Cor18Case2,
        Family::Cor18Case3,
        Family::GeneratedFromB,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::Lyd => "lyd",
            Family::Hamilton => "hamilton",
            Family::LixuHyperbolic => "lixu-hyperbolic",
            Family::LixuLinear => "lixu-linear",
            Family::QianTheta => "qian-theta",
            Family::ImprovedLyd => "improved-lyd",
            Family::Cor18Case1 => "cor18-case1",
            Family::Cor18Case2 => "cor18-case2",
            Family::Cor18Case3 => "cor18-case3",
            Family::GeneratedFromB => "generated-from-b",
        }
    }

    /// Names of the real parameters, in order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Lyd | Family::ImprovedLyd => &["beta"],
            Family::QianTheta => &["theta"],
            Family::Cor18Case1 | Family::Cor18Case2 => &["beta", "gamma"],
            Family::Cor18Case3 => &["beta", "gamma", "theta"],
            Family::Hamilton
            | Family::LixuHyperbolic
            | Family::LixuLinear
            | Family::GeneratedFromB => &[],
        }
    }

    pub fn requires_positive_k(self) -> bool {
        matches!(
            self,
            Family::QianTheta
                | Family::ImprovedLyd
                | Family::Cor18Case1
                | Family::Cor18Case2
                | Family::Cor18Case3
                | Family::GeneratedFromB
        )
    }

    pub fn summary(self) -> &'static str {
        match self {
            Family::Lyd => "constant beta; psi = n/(2 beta t) + n k/(4(1-beta))",
            Family::Hamilton => "beta = exp(-2kt); psi = exp(2kt) n/(2t)",
            Family::LixuHyperbolic => "alpha = 1 + (sinh cosh - kt)/sinh^2; phi = (nk/2)(coth(kt) + 1)",
            Family::LixuLinear => "alpha = 1 + 2kt/3; phi = n/(2t) + (nk/2)(1 + kt/3)",
            Family::QianTheta => "alpha = 1 + theta k t; phi = (2-theta)^2 n/(16 theta (1-theta) t) + n k^2 theta t/4 + nk/2",
            Family::ImprovedLyd => "constant beta; psi = n(1-beta)/(16k(t - (1-beta)/(k beta)) t) + nk/(4(1-beta))",
            Family::Cor18Case1 => "psi = gamma n/t^2 + nk/(4(1-beta)) beyond its threshold",
            Family::Cor18Case2 => "psi = gamma n/t + nk/(4(1-beta)) beyond its threshold",
            Family::Cor18Case3 => "psi = gamma n/t^theta + nk/(4(1-beta)), theta in (1,2), beyond a numeric threshold",
            Family::GeneratedFromB => "beta and psi generated from a coefficient function b(t)",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

/// Serializable description of a closed-form bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Vec<f64>,
    pub n: u32,
    pub k: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl BoundSpec {
    pub fn build(&self) -> Result<GradientBound> {
        make_family(
            EstimateContext::new(self.n, self.k, self.horizon)?,
            self.family,
            &self.params,
        )
    }
}

/// One estimate `beta |∇f|^2 - f_t <= psi`, valid on `(t_min, T]`.
#[derive(Clone)]
pub struct GradientBound {
    family: Family,
    params: Vec<f64>,
    ctx: EstimateContext,
    t_min: f64,
    generator: Option<Arc<Generator>>,
}

impl fmt::Debug for GradientBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradientBound")
            .field("family", &self.family)
            .field("params", &self.params)
            .field("ctx", &self.ctx)
            .field("t_min", &self.t_min)
            .finish()
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {v} must lie in (0, 1)"
        )))
    }
}

/// Builds a closed-form bound family.
pub fn make_family(ctx: EstimateContext, family: Family, params: &[f64]) -> Result<GradientBound> {
    ctx.validate()?;
    let expected = family.param_names();
    if family == Family::GeneratedFromB {
        return Err(Error::InvalidParameter(
            "generated-from-b bounds are built from a coefficient function, not parameters".into(),
        ));
    }
    if params.len() != expected.len() {
        return Err(Error::InvalidParameter(format!(
            "family {family} takes {} parameter(s) ({}), got {}",
            expected.len(),
            expected.join(", "),
            params.len()
        )));
    }
    if family.requires_positive_k() && ctx.k <= 0.0 {
        return Err(Error::KZeroUnsupported(family.id()));
    }
    let k = ctx.k;
    let t_min = match family {
        Family::Lyd => {
            check_open_unit("beta", params[0])?;
            0.0
        }
        Family::Hamilton | Family::LixuHyperbolic | Family::LixuLinear => 0.0,
        Family::QianTheta => {
            check_open_unit("theta", params[0])?;
            0.0
        }
        Family::ImprovedLyd => {
            let beta = params[0];
            check_open_unit("beta", beta)?;
            (1.0 - beta) / (k * beta)
        }
        Family::Cor18Case1 => {
            let (beta, gamma) = (params[0], params[1]);
            check_open_unit("beta", beta)?;
            let gamma_min = (1.0 - beta) / (16.0 * k);
            if !(gamma > gamma_min) {
                return Err(Error::InvalidParameter(format!(
                    "gamma = {gamma} must exceed (1-beta)/(16k) = {gamma_min}"
                )));
            }
            gamma * (1.0 - beta) / (k * beta * (gamma - gamma_min))
        }
        Family::Cor18Case2 => {
            let (beta, gamma) = (params[0], params[1]);
            check_open_unit("beta", beta)?;
            if !(gamma > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "gamma = {gamma} must be > 0"
                )));
            }
            (1.0 - beta) / (16.0 * k * gamma) + (1.0 - beta) / (k * beta)
        }
        Family::Cor18Case3 => {
            let (beta, gamma, theta) = (params[0], params[1], params[2]);
            check_open_unit("beta", beta)?;
            if !(gamma > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "gamma = {gamma} must be > 0"
                )));
            }
            if !(theta > 1.0 && theta < 2.0) {
                return Err(Error::InvalidParameter(format!(
                    "theta = {theta} must lie in (1, 2)"
                )));
            }
            case3_threshold(ctx.nf(), k, beta, gamma, theta)?
        }
        Family::GeneratedFromB => unreachable!(),
    };
    if t_min >= ctx.horizon {
        return Err(Error::InvalidParameter(format!(
            "family {family} is valid only for t > {t_min}, beyond the horizon T = {}",
            ctx.horizon
        )));
    }
    Ok(GradientBound {
        family,
        params: params.to_vec(),
        ctx,
        t_min,
        generator: None,
    })
}

/// The time beyond which the improved estimate is below `gamma n / t^theta + nk/(4(1-beta))`.
/// The gap `16 k gamma (t - c) - (1-beta) t^{theta-1}` is convex in `t` and
/// negative at `c = (1-beta)/(k beta)`, so it has exactly one root after `c`.
fn case3_threshold(n: f64, k: f64, beta: f64, gamma: f64, theta: f64) -> Result<f64> {
    let c = (1.0 - beta) / (k * beta);
    let hi = 1e6 / k;
    let gap = |t: f64| n * (1.0 - beta) / (16.0 * k * (t - c) * t) - gamma * n / t.powf(theta);
    if gap(hi) > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold T0 lies beyond 1e6/k = {hi}"
        )));
    }
    let lo = c * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    bisect(gap, lo, hi, 1e-14)
}

impl GradientBound {
    pub(crate) fn generated(ctx: EstimateContext, generator: Arc<Generator>) -> Self {
        GradientBound {
            family: Family::GeneratedFromB,
            params: Vec::new(),
            ctx,
            t_min: 0.0,
            generator: Some(generator),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn ctx(&self) -> &EstimateContext {
        &self.ctx
    }

    /// Start of the (open) validity interval.
    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn generator(&self) -> Option<&Arc<Generator>> {
        self.generator.as_ref()
    }

    /// Label such as `lyd(0.5)` or `hamilton`.
    pub fn id(&self) -> String {
        if self.params.is_empty() {
            self.family.id().to_string()
        } else {
            let p: Vec<String> = self.params.iter().map(|p| crate::numfmt::num(*p)).collect();
            format!("{}({})", self.family.id(), p.join(","))
        }
    }

    pub fn spec(&self) -> BoundSpec {
        BoundSpec {
            family: self.family,
            params: self.params.clone(),
            n: self.ctx.n,
            k: self.ctx.k,
            horizon: self.ctx.horizon,
        }
    }

    /// Same formula with a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<GradientBound> {
        if self.family == Family::GeneratedFromB {
            return Err(Error::InvalidParameter(
                "cannot re-horizon a generated bound".into(),
            ));
        }
        make_family(
            EstimateContext {
                horizon,
                ..self.ctx
            },
            self.family,
            &self.params,
        )
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.t_min && t <= self.ctx.horizon * (1.0 + 1e-12)
    }

    /// `(beta, psi, alpha, phi)` at `t in (t_min, T]`.
    pub fn evaluate(&self, t: f64) -> Result<BoundSample> {
        if !self.contains(t) {
            return Err(Error::OutOfDomain {
                t,
                t_min: self.t_min,
                t_max: self.ctx.horizon,
            });
        }
        self.formula(t)
    }

    /// Evaluates the family formula for any `t > t_min`, ignoring the horizon.
    /// Used for large-time asymptotics.
    pub fn formula(&self, t: f64) -> Result<BoundSample> {
        if !(t > self.t_min) || !t.is_finite() {
            return Err(Error::OutOfDomain {
                t,
                t_min: self.t_min,
                t_max: f64::INFINITY,
            });
        }
        let n = self.ctx.nf();
        let k = self.ctx.k;
        let p = &self.params;
        let lyd_tail = |beta: f64| n * k / (4.0 * (1.0 - beta));
        let s = match self.family {
            Family::Lyd => BoundSample::from_beta(t, p[0], n / (2.0 * p[0] * t) + lyd_tail(p[0])),
            Family::Hamilton => {
                let e = (2.0 * k * t).exp();
                BoundSample::from_beta(t, 1.0 / e, e * n / (2.0 * t))
            }
            Family::LixuHyperbolic => {
                if k == 0.0 {
                    BoundSample::from_alpha(t, 1.0, n / (2.0 * t))
                } else {
                    let x = k * t;
                    BoundSample::from_alpha(t, 1.0 + lixu_ratio(x), 0.5 * n * k * (coth(x) + 1.0))
                }
            }
            Family::LixuLinear => BoundSample::from_alpha(
                t,
                1.0 + 2.0 * k * t / 3.0,
                n / (2.0 * t) + 0.5 * n * k * (1.0 + k * t / 3.0),
            ),
            Family::QianTheta => {
                let th = p[0];
                let phi = (2.0 - th).powi(2) * n / (16.0 * th * (1.0 - th) * t)
                    + n * k * k * th * t / 4.0
                    + 0.5 * n * k;
                BoundSample::from_alpha(t, 1.0 + th * k * t, phi)
            }
            Family::ImprovedLyd => {
                let beta = p[0];
                let c = (1.0 - beta) / (k * beta);
                BoundSample::from_beta(
                    t,
                    beta,
                    n * (1.0 - beta) / (16.0 * k * (t - c) * t) + lyd_tail(beta),
                )
            }
            Family::Cor18Case1 => {
                BoundSample::from_beta(t, p[0], p[1] * n / (t * t) + lyd_tail(p[0]))
            }
            Family::Cor18Case2 => BoundSample::from_beta(t, p[0], p[1] * n / t + lyd_tail(p[0])),
            Family::Cor18Case3 => {
                BoundSample::from_beta(t, p[0], p[1] * n / t.powf(p[2]) + lyd_tail(p[0]))
            }
            Family::GeneratedFromB => {
                let g = self
                    .generator
                    .as_ref()
                    .expect("generated bound carries its generator");
                BoundSample::from_beta(t, g.beta(t)?, g.psi(t)?)
            }
        };
        if !(s.beta.is_finite() && s.psi.is_finite()) {
            return Err(Error::NonFinite {
                t,
                value: if s.beta.is_finite() { s.psi } else { s.beta },
            });
        }
        Ok(s)
    }

    /// `beta` as a time function (NaN outside the validity domain).
    pub fn beta_fn(&self) -> TimeFunction {
        let b = self.clone();
        TimeFunction::new(self.ctx.horizon, move |t| {
            b.evaluate(t).map(|s| s.beta).unwrap_or(f64::NAN)
        })
    }

    /// `psi` as a time function (NaN outside the validity domain).
    pub fn psi_fn(&self) -> TimeFunction {
        let b = self.clone();
        TimeFunction::new(self.ctx.horizon, move |t| {
            b.evaluate(t).map(|s| s.psi).unwrap_or(f64::NAN)
        })
    }
}

/// Converts `(alpha, phi)` to `(beta, psi) = (1/alpha, phi/alpha)`, after
/// checking `alpha >= 1` on a 200-point log grid of `(0, T]`.
pub fn convert_form(
    alpha: &TimeFunction,
    phi: &TimeFunction,
) -> Result<(TimeFunction, TimeFunction)> {
    let horizon = alpha.horizon();
    for t in log_grid(horizon * 1e-6, horizon, 200) {
        let a = alpha.try_eval(t)?;
        if a < 1.0 {
            return Err(Error::AlphaBelowOne { t, alpha: a });
        }
    }
    let beta = alpha.map(|_, a| 1.0 / a);
    let (a, p) = (alpha.clone(), phi.clone());
    let psi = TimeFunction::new(horizon, move |t| p.eval(t) / a.eval(t));
    Ok((beta, psi))
}

/// Inverse of [`convert_form`]: `(alpha, phi) = (1/beta, psi/beta)`.
pub fn to_alpha_form(beta: &TimeFunction, psi: &TimeFunction) -> (TimeFunction, TimeFunction) {
    let alpha = beta.map(|_, b| 1.0 / b);
    let (b, p) = (beta.clone(), psi.clone());
    let phi = TimeFunction::new(beta.horizon(), move |t| p.eval(t) / b.eval(t));
    (alpha, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32, k: f64, horizon: f64) -> EstimateContext {
        EstimateContext::new(n, k, horizon).unwrap()
    }

    #[test]
    fn context_invariants() {
        assert!(EstimateContext::new(1, 1.0, 1.0).is_err());
        assert!(EstimateContext::new(2, -1.0, 1.0).is_err());
        assert!(EstimateContext::new(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn lixu_hyperbolic_large_time_limits() {
        let b = make_family(ctx(2, 1.0, 40.0), Family::LixuHyperbolic, &[]).unwrap();
        let s = b.evaluate(20.0).unwrap();
        assert!((s.alpha - 2.0).abs() < 1e-8);
        assert!((s.phi - 2.0).abs() < 1e-8);
    }

    #[test]
    fn hamilton_collapses_when_k_is_zero() {
        let b = make_family(ctx(2, 0.0, 2.0), Family::Hamilton, &[]).unwrap();
        let s = b.evaluate(1.0).unwrap();
        assert_eq!(s.beta, 1.0);
        assert_eq!(s.psi, 1.0);
    }

    #[test]
    fn improved_lyd_hand_value() {
        let b = make_family(ctx(3, 1.0, 5.0), Family::ImprovedLyd, &[0.5]).unwrap();
        assert_eq!(b.t_min(), 1.0);
        assert!((b.evaluate(2.0).unwrap().psi - 1.546875).abs() < 1e-15);
        assert!(matches!(b.evaluate(1.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn lyd_and_qian_hand_values() {
        let lyd = make_family(ctx(2, 1.0, 5.0), Family::Lyd, &[0.5]).unwrap();
        assert!((lyd.evaluate(1.0).unwrap().psi - 3.0).abs() < 1e-15);
        let q = make_family(ctx(2, 1.0, 5.0), Family::QianTheta, &[0.5]).unwrap();
        let s = q.evaluate(1.0).unwrap();
        assert!((s.alpha - 1.5).abs() < 1e-15);
        assert!((s.phi - 2.375).abs() < 1e-14);
        assert!((s.psi - 2.375 / 1.5).abs() < 1e-14);
    }

    #[test]
    fn parameter_validation() {
        let c = ctx(2, 1.0, 5.0);
        assert!(make_family(c, Family::Lyd, &[1.0]).is_err());
        assert!(make_family(c, Family::Lyd, &[]).is_err());
        assert!(make_family(c, Family::QianTheta, &[0.0]).is_err());
        assert!(make_family(c, Family::Cor18Case1, &[0.5, 0.5 / 16.0]).is_err());
        assert!(make_family(c, Family::Cor18Case3, &[0.5, 1.0, 2.0]).is_err());
        let zero = ctx(2, 0.0, 5.0);
        for f in [Family::QianTheta, Family::ImprovedLyd] {
            assert_eq!(
                make_family(zero, f, &[0.5]).unwrap_err(),
                Error::KZeroUnsupported(f.id())
            );
        }
        // lyd is fine at k = 0
        assert!(make_family(zero, Family::Lyd, &[0.5]).is_ok());
    }

    #[test]
    fn cor18_thresholds() {
        let c = ctx(3, 1.0, 100.0);
        let c2 = make_family(c, Family::Cor18Case2, &[0.5, 0.1]).unwrap();
        assert!((c2.t_min() - (0.5 / 1.6 + 1.0)).abs() < 1e-14);
        let c1 = make_family(c, Family::Cor18Case1, &[0.5, 0.1]).unwrap();
        let expected = 0.1 * 0.5 / (0.5 * (0.1 - 0.5 / 16.0));
        assert!((c1.t_min() - expected).abs() < 1e-14);
        // case 3: at T0 the improved estimate meets the case-3 bound
        let c3 = make_family(c, Family::Cor18Case3, &[0.5, 0.1, 1.5]).unwrap();
        let imp = make_family(c, Family::ImprovedLyd, &[0.5]).unwrap();
        let t0 = c3.t_min();
        assert!(t0 > 1.0);
        let just_after = t0 * (1.0 + 1e-12);
        let gap = imp.evaluate(just_after).unwrap().psi - c3.formula(just_after).unwrap().psi;
        assert!(gap.abs() < 1e-9, "gap {gap}");
        let later = t0 * 1.5;
        assert!(imp.evaluate(later).unwrap().psi <= c3.evaluate(later).unwrap().psi);
    }

    #[test]
    fn lixu_hyperbolic_k_zero_is_the_continuous_limit() {
        let b0 = make_family(ctx(3, 0.0, 2.0), Family::LixuHyperbolic, &[]).unwrap();
        let b1 = make_family(ctx(3, 1e-9, 2.0), Family::LixuHyperbolic, &[]).unwrap();
        let (s0, s1) = (b0.evaluate(0.7).unwrap(), b1.evaluate(0.7).unwrap());
        assert!((s0.alpha - s1.alpha).abs() < 1e-8);
        assert!((s0.psi - s1.psi).abs() < 1e-8);
    }

    #[test]
    fn convert_form_constant_case_and_rejection() {
        let (beta, psi) = convert_form(
            &TimeFunction::constant(1.0, 2.0),
            &TimeFunction::constant(1.0, 6.0),
        )
        .unwrap();
        assert_eq!(beta.eval(0.3), 0.5);
        assert_eq!(psi.eval(0.3), 3.0);
        let bad = TimeFunction::new(1.0, |t| 0.5 + t);
        assert!(matches!(
            convert_form(&bad, &TimeFunction::constant(1.0, 1.0)),
            Err(Error::AlphaBelowOne { .. })
        ));
    }

    #[test]
    fn convert_form_of_qian_alpha() {
        let (k, th) = (1.0, 0.5);
        let alpha = TimeFunction::new(3.0, move |t| 1.0 + th * k * t);
        let phi = TimeFunction::constant(3.0, 1.0);
        let (beta, _) = convert_form(&alpha, &phi).unwrap();
        for t in [0.1, 1.0, 3.0] {
            assert!((beta.eval(t) - 1.0 / (1.0 + th * k * t)).abs() < 1e-15);
        }
    }

    #[test]
    fn spec_json_shape() {
        let b = make_family(ctx(3, 2.0, 5.0), Family::ImprovedLyd, &[0.5]).unwrap();
        let js = serde_json::to_string(&b.spec()).unwrap();
        assert_eq!(
            js,
            r#"{"family":"improved-lyd","params":[0.5],"n":3,"k":2.0,"T":5.0}"#
        );
        let back: BoundSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back.build().unwrap().id(), "improved-lyd(0.5)");
    }
}
