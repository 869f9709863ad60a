//! Numerical audits of the hypothesis suites: (A1)-(A3) on Qian's `a`,
//! (B1)-(B5) and (B1')-(B5) on `(lambda, beta, psi)`, (C1)-(C4) on `b`.
//!
//! Every sub-condition is sampled on a log grid of 200 points on `(0, T]`.
//! Limits and integrability at `0` are decided from the dyadic samples
//! `T 2^{-j}`; a verdict that finite sampling cannot settle is reported as
//! inconclusive with a reason.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bound::EstimateContext;
use crate::coefficient::b5_residual;
use crate::error::{Error, Result};
use crate::numfmt::num;
use crate::quad::{integrate_from_zero, QuadratureSpec};
use crate::timefn::{differentiate, log_grid, TimeFunction};

pub const GRID_POINTS: usize = 200;
/// Margin on the fitted exponent for integrability and boundedness.
pub const EXPONENT_MARGIN: f64 = 0.01;
pub const DELTA_SCAN: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const EPS_SCAN: [f64; 4] = [1e-3, 1e-2, 1e-1, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    A,
    B,
    Bprime,
    C,
}

impl Suite {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Suite::A => &["A1", "A2", "A3"],
            Suite::B => &["B1", "B2", "B3", "B4", "B5"],
            Suite::Bprime => &["B1'", "B2'", "B2½", "B3'", "B4'", "B5"],
            Suite::C => &["C1", "C2", "C3", "C4"],
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "A" | "a" => Ok(Suite::A),
            "B" | "b" => Ok(Suite::B),
            "Bprime" | "bprime" | "B'" => Ok(Suite::Bprime),
            "C" | "c" => Ok(Suite::C),
            _ => Err(Error::InvalidParameter(format!(
                "unknown suite `{s}` (A, B, Bprime, C)"
            ))),
        }
    }
}

/// A condition label such as `A2`, `B2½` or `C3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionId {
    pub suite: Suite,
    pub label: String,
}

impl ConditionId {
    pub fn new(suite: Suite, label: &str) -> Result<Self> {
        if suite.labels().contains(&label) {
            Ok(ConditionId {
                suite,
                label: label.to_string(),
            })
        } else {
            Err(Error::InvalidParameter(format!(
                "no condition {label} in suite {suite:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: ConditionId,
    pub status: Status,
    /// Time(s) where the measured quantity was taken; always set on failure.
    pub witness: Vec<f64>,
    pub measured: f64,
    /// Reason for inconclusive verdicts, or how the verdict was reached.
    pub note: Option<String>,
}

impl Verdict {
    pub fn describe(&self) -> String {
        let w: Vec<String> = self.witness.iter().map(|t| num(*t)).collect();
        format!(
            "{} at t = [{}], measured {}{}",
            self.status.as_str(),
            w.join(", "),
            num(self.measured),
            self.note
                .as_ref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub k: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub suite: Suite,
    pub verdicts: Vec<Verdict>,
    pub grid: Vec<f64>,
    pub params: ReportParams,
    /// Some derivative fell back to a one-sided or finite-difference stencil.
    pub lower_accuracy_derivatives: bool,
}

impl ConditionReport {
    pub fn verdict(&self, label: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id.label == label)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.status.is_pass())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned table: id, verdict, witness, measured value, note.
    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .verdicts
            .iter()
            .map(|v| {
                [
                    v.id.label.clone(),
                    v.status.as_str().to_string(),
                    v.witness
                        .iter()
                        .map(|t| num(*t))
                        .collect::<Vec<_>>()
                        .join(" "),
                    num(v.measured),
                    v.note.clone().unwrap_or_default(),
                ]
            })
            .collect();
        let header = ["id", "verdict", "witness", "measured", "note"].map(String::from);
        let mut widths = header.clone().map(|h| h.chars().count());
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String; 5]| {
            let mut l = String::new();
            for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
                if i > 0 {
                    l.push_str("  ");
                }
                let pad = w - c.chars().count();
                l.push_str(c);
                if i < 4 {
                    l.push_str(&" ".repeat(pad));
                }
            }
            let _ = writeln!(out, "{}", l.trim_end());
        };
        line(&header);
        for r in &rows {
            line(r);
        }
        out
    }
}

/// Functions audited by a suite; only the ones the suite needs are required.
#[derive(Debug, Clone, Default)]
pub struct ConditionInputs {
    pub a: Option<TimeFunction>,
    pub lambda: Option<TimeFunction>,
    pub beta: Option<TimeFunction>,
    pub psi: Option<TimeFunction>,
    pub b: Option<TimeFunction>,
}

impl ConditionInputs {
    pub fn a(a: TimeFunction) -> Self {
        ConditionInputs {
            a: Some(a),
            ..Default::default()
        }
    }

    pub fn b(b: TimeFunction) -> Self {
        ConditionInputs {
            b: Some(b),
            ..Default::default()
        }
    }

    pub fn lambda_beta_psi(lambda: TimeFunction, beta: TimeFunction, psi: TimeFunction) -> Self {
        ConditionInputs {
            lambda: Some(lambda),
            beta: Some(beta),
            psi: Some(psi),
            ..Default::default()
        }
    }
}

/// `eps` for (B3') and `delta` for (C3); scanned when absent.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuiteExtras {
    pub eps: Option<f64>,
    pub delta: Option<f64>,
}

/// Stability of a limit estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub estimate: f64,
    pub confidence: Confidence,
    /// The samples `(T 2^{-j}, f)` for `j = 10..=40`.
    pub samples: Vec<(f64, f64)>,
}

fn aitken(x0: f64, x1: f64, x2: f64) -> f64 {
    let d1 = x2 - x1;
    let denom = d1 - (x1 - x0);
    if denom == 0.0 || !denom.is_finite() {
        return x2;
    }
    let v = x2 - d1 * d1 / denom;
    if v.is_finite() {
        v
    } else {
        x2
    }
}

/// Estimates `lim_{t -> 0+} f(t)` from `f(T 2^{-j})`, `j = 10..=40`. The limit
/// is stable when the last ten increments are below `1e-6 max(1, |f|)`.
pub fn limit_at_zero(f: &TimeFunction) -> LimitEstimate {
    let horizon = f.horizon();
    let samples: Vec<(f64, f64)> = (10..=40)
        .map(|j| {
            let t = horizon * 0.5f64.powi(j);
            (t, f.eval(t))
        })
        .collect();
    let xs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let m = xs.len();
    let last = xs[m - 1];
    let cauchy = xs.iter().all(|x| x.is_finite())
        && xs[m - 11..]
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() <= 1e-6 * last.abs().max(1.0));
    if cauchy {
        LimitEstimate {
            estimate: aitken(xs[m - 3], xs[m - 2], last),
            confidence: Confidence::Stable,
            samples,
        }
    } else {
        LimitEstimate {
            estimate: last,
            confidence: Confidence::Unstable,
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integrability {
    pub status: Status,
    /// Least-squares slope of `log f` against `log t` near zero.
    pub exponent: f64,
    pub witness: f64,
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Decides `f ∈ L^1(0, T)` for `f >= 0` near zero by fitting the power
/// exponent on `[T 2^{-40}, T 2^{-10}]` and integrating.
pub fn integrability_at_zero(f: &TimeFunction, horizon: f64) -> Result<Integrability> {
    let mut pts = Vec::new();
    for j in 10..=40 {
        let t = horizon * 0.5f64.powi(j);
        let v = f.try_eval(t)?;
        if v < 0.0 {
            return Err(Error::NegativeNearZero { t, value: v });
        }
        if v > 0.0 {
            pts.push((t.ln(), v.ln()));
        }
    }
    let witness = horizon * 0.5f64.powi(40);
    let exponent = if pts.len() >= 3 {
        fit_slope(&pts)
    } else {
        f64::INFINITY
    };
    let converges = integrate_from_zero(f, horizon, &QuadratureSpec::default()).is_ok();
    let status = if exponent > -1.0 + EXPONENT_MARGIN && converges {
        Status::Pass
    } else if exponent <= -1.0 || (!converges && exponent < -1.0 + EXPONENT_MARGIN) {
        Status::Fail
    } else {
        Status::Inconclusive
    };
    Ok(Integrability {
        status,
        exponent,
        witness,
    })
}

struct Auditor<'a> {
    ctx: &'a EstimateContext,
    grid: Vec<f64>,
    lower_accuracy: bool,
}

impl<'a> Auditor<'a> {
    fn derivative(&mut self, f: &TimeFunction, t: f64) -> Result<f64> {
        let d = differentiate(f, t)?;
        if d.lower_accuracy || !f.has_derivative() {
            self.lower_accuracy |= d.lower_accuracy;
        }
        Ok(d.value)
    }

    fn derivative_fn(&self, f: &TimeFunction) -> TimeFunction {
        let g = f.clone();
        TimeFunction::new(f.horizon(), move |t| {
            differentiate(&g, t).map(|d| d.value).unwrap_or(f64::NAN)
        })
    }

    /// Minimum of `q` over the grid; pass iff strictly positive.
    fn positive(
        &mut self,
        id: ConditionId,
        q: impl Fn(&mut Self, f64) -> Result<f64>,
    ) -> Result<Verdict> {
        let grid = self.grid.clone();
        let mut worst = (f64::INFINITY, grid[0]);
        for &t in &grid {
            let v = q(self, t)?;
            if !(v >= worst.0) {
                worst = (v, t);
            }
        }
        let status = if worst.0 > 0.0 {
            Status::Pass
        } else {
            Status::Fail
        };
        Ok(Verdict {
            id,
            status,
            witness: vec![worst.1],
            measured: worst.0,
            note: Some("grid minimum".into()),
        })
    }

    fn limit_is(&self, id: ConditionId, f: &TimeFunction, target: f64) -> Verdict {
        let lim = limit_at_zero(f);
        let tol = 1e-6 * target.abs().max(1.0);
        let witness = vec![lim.samples.last().unwrap().0];
        match lim.confidence {
            Confidence::Stable => Verdict {
                id,
                status: if (lim.estimate - target).abs() <= tol {
                    Status::Pass
                } else {
                    Status::Fail
                },
                witness,
                measured: lim.estimate,
                note: Some(format!("limit at 0, target {}", num(target))),
            },
            Confidence::Unstable => match f.zero_limit_hint {
                Some(h) => Verdict {
                    id,
                    status: if (h - target).abs() <= tol {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    witness,
                    measured: h,
                    note: Some("numeric limit unstable; asserted limit used".into()),
                },
                None => Verdict {
                    id,
                    status: Status::Inconclusive,
                    witness,
                    measured: lim.estimate,
                    note: Some("limit estimate unstable".into()),
                },
            },
        }
    }

    fn integrable(&self, id: ConditionId, f: &TimeFunction) -> Result<Verdict> {
        let r = integrability_at_zero(f, self.ctx.horizon)?;
        Ok(Verdict {
            id,
            status: r.status,
            witness: vec![r.witness],
            measured: r.exponent,
            note: Some("fitted exponent near 0".into()),
        })
    }

    /// Grid supremum plus a growth-exponent fit on `T 2^{-j}`, `j = 10..=30`.
    fn bounded_above(&self, id: ConditionId, f: &TimeFunction) -> Result<Verdict> {
        let mut sup = (f64::NEG_INFINITY, self.grid[0]);
        for &t in &self.grid {
            let v = f.try_eval(t)?;
            if v > sup.0 {
                sup = (v, t);
            }
        }
        let mut tail = Vec::new();
        let mut tail_max = (f64::NEG_INFINITY, 0.0);
        for j in 10..=30 {
            let t = self.ctx.horizon * 0.5f64.powi(j);
            let v = f.try_eval(t)?;
            if v > tail_max.0 {
                tail_max = (v, t);
            }
            if v > 0.0 {
                tail.push((t.ln(), v.ln()));
            }
        }
        let smallest = self.ctx.horizon * 0.5f64.powi(30);
        if tail.len() >= 5 {
            let p = fit_slope(&tail);
            if p < -EXPONENT_MARGIN && tail_max.1 == smallest {
                return Ok(Verdict {
                    id,
                    status: Status::Fail,
                    witness: vec![smallest],
                    measured: p,
                    note: Some("grows like t^p toward 0".into()),
                });
            }
        }
        let best = if tail_max.0 > sup.0 { tail_max } else { sup };
        Ok(Verdict {
            id,
            status: Status::Pass,
            witness: vec![best.1],
            measured: best.0,
            note: Some("supremum".into()),
        })
    }

    fn scan<F>(
        &self,
        id: ConditionId,
        given: Option<f64>,
        candidates: &[f64],
        mut check: F,
    ) -> Result<(Verdict, f64)>
    where
        F: FnMut(f64) -> Result<Verdict>,
    {
        if let Some(v) = given {
            return Ok((check(v)?, v));
        }
        let mut last = None;
        for &c in candidates {
            let mut v = check(c)?;
            if v.status.is_pass() {
                v.note = Some(format!(
                    "{} (first passing scanned value {})",
                    v.note.unwrap_or_default(),
                    num(c)
                ));
                return Ok((v, c));
            }
            last = Some((v, c));
        }
        let (mut v, c) = last.expect("non-empty scan");
        v.id = id;
        v.note = Some(format!("no scanned value passes; last tried {}", num(c)));
        Ok((v, c))
    }
}

fn require<'f>(f: &'f Option<TimeFunction>, name: &str, suite: Suite) -> Result<&'f TimeFunction> {
    f.as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("suite {suite:?} needs `{name}`")))
}

/// Runs every condition of `suite` on the supplied functions.
pub fn check_suite(
    suite: Suite,
    fns: &ConditionInputs,
    ctx: &EstimateContext,
    extras: &SuiteExtras,
) -> Result<ConditionReport> {
    ctx.validate()?;
    let horizon = ctx.horizon;
    let k = ctx.k;
    let grid = log_grid(horizon * 0.5f64.powi(20), horizon, GRID_POINTS);
    let mut au = Auditor {
        ctx,
        grid: grid.clone(),
        lower_accuracy: false,
    };
    let id = |l: &str| ConditionId::new(suite, l).expect("known label");
    let mut verdicts = Vec::new();
    let mut params = ReportParams {
        k,
        horizon,
        eps: extras.eps,
        delta: extras.delta,
    };

    match suite {
        Suite::A => {
            let a = require(&fns.a, "a", suite)?;
            let da = au.derivative_fn(a);
            verdicts.push(au.positive(id("A1"), |au, t| {
                Ok(a.try_eval(t)?.min(au.derivative(a, t)?))
            })?);
            let v0 = au.limit_is(id("A2"), a, 0.0);
            let (aa, dd) = (a.clone(), da.clone());
            let ratio =
                TimeFunction::new(horizon, move |t| aa.eval(t) / dd.eval(t)).with_zero_limit(0.0);
            let v1 = au.limit_is(id("A2"), &ratio, 0.0);
            verdicts.push(merge(id("A2"), v0, v1));
            let (aa, dd) = (a.clone(), da);
            let energy = TimeFunction::new(horizon, move |t| dd.eval(t).powi(2) / aa.eval(t));
            verdicts.push(au.integrable(id("A3"), &energy)?);
        }
        Suite::C => {
            let b = require(&fns.b, "b", suite)?;
            let db = au.derivative_fn(b);
            let lim = au.limit_is(id("C1"), b, 0.0);
            let mono = au.positive(id("C1"), |au, t| au.derivative(b, t))?;
            verdicts.push(merge(id("C1"), lim, mono));
            let (bb, dd) = (b.clone(), db.clone());
            let mut energy = TimeFunction::new(horizon, move |t| dd.eval(t).powi(2) / bb.eval(t));
            energy.power_hint = b.power_hint.map(|p| p - 2.0);
            verdicts.push(au.integrable(id("C2"), &energy)?);
            let (c3, delta) = au.scan(id("C3"), extras.delta, &DELTA_SCAN, |delta| {
                let (bb, dd) = (b.clone(), db.clone());
                let f = TimeFunction::new(horizon, move |t| dd.eval(t) / bb.eval(t).powf(delta));
                au.bounded_above(id("C3"), &f)
            })?;
            params.delta = Some(delta);
            verdicts.push(c3);
            let (bb, dd) = (b.clone(), db);
            let spec = QuadratureSpec::default();
            let f = TimeFunction::new(horizon, move |t| {
                let integral = integrate_from_zero(&bb, t, &spec).unwrap_or(f64::NAN);
                dd.eval(t) * integral / bb.eval(t).powi(2)
            });
            verdicts.push(au.bounded_above(id("C4"), &f)?);
        }
        Suite::B | Suite::Bprime => {
            let lambda = require(&fns.lambda, "lambda", suite)?;
            let beta = require(&fns.beta, "beta", suite)?;
            let psi = require(&fns.psi, "psi", suite)?;
            let prime = suite == Suite::Bprime;
            let range = au.positive(id(if prime { "B1'" } else { "B1" }), |_, t| {
                let b = beta.try_eval(t)?;
                Ok(b.min(1.0 - b))
            })?;
            if prime {
                let lim = au.limit_is(id("B1'"), beta, 1.0);
                verdicts.push(merge(id("B1'"), lim, range));
            } else {
                verdicts.push(range);
            }
            let label = if prime { "B2'" } else { "B2" };
            let lim = au.limit_is(id(label), lambda, 0.0);
            let sign = if prime {
                au.positive(id(label), |au, t| au.derivative(lambda, t))?
            } else {
                au.positive(id(label), |_, t| lambda.try_eval(t))?
            };
            verdicts.push(merge(id(label), lim, sign));
            // (2k beta + beta')/(1 - beta) - c (ln lambda)'
            let gap = |au: &mut Auditor, t: f64, c: f64| -> Result<f64> {
                let be = beta.try_eval(t)?;
                let dbe = au.derivative(beta, t)?;
                let dl = au.derivative(lambda, t)?;
                Ok((2.0 * k * be + dbe) / (1.0 - be) - c * dl / lambda.try_eval(t)?)
            };
            if prime {
                let (l, be) = (lambda.clone(), beta.clone());
                let ratio = TimeFunction::new(horizon, move |t| l.eval(t) / (1.0 - be.eval(t)));
                let r = au.bounded_above(id("B2½"), &ratio)?;
                let d = au.bounded_above(id("B2½"), &au.derivative_fn(beta))?;
                verdicts.push(merge(id("B2½"), r, d));
                let (v, eps) = au.scan(id("B3'"), extras.eps, &EPS_SCAN, |eps| {
                    let mut inner = Auditor {
                        ctx,
                        grid: grid.clone(),
                        lower_accuracy: false,
                    };
                    inner.positive(id("B3'"), |au, t| gap(au, t, 1.0 + eps))
                })?;
                params.eps = Some(eps);
                verdicts.push(v);
                verdicts.push(au.positive(id("B4'"), |_, t| {
                    psi.try_eval(t)
                        .map(|p| if p == 0.0 { f64::MIN_POSITIVE } else { p })
                })?);
            } else {
                verdicts.push(au.positive(id("B3"), |au, t| gap(au, t, 1.0))?);
                verdicts.push(limsup_nonnegative(id("B4"), psi));
            }
            verdicts.push(b5_on_grid(&mut au, id("B5"), ctx, beta, psi)?);
        }
    }
    Ok(ConditionReport {
        suite,
        verdicts,
        grid,
        params,
        lower_accuracy_derivatives: au.lower_accuracy,
    })
}

// Both parts must pass; the first non-passing part supplies the witness.
fn merge(id: ConditionId, first: Verdict, second: Verdict) -> Verdict {
    let pick = match (first.status, second.status) {
        (Status::Fail, _) => first,
        (_, Status::Fail) => second,
        (Status::Inconclusive, _) => first,
        (_, Status::Inconclusive) => second,
        _ => {
            let note = format!(
                "{}; {}",
                first.note.clone().unwrap_or_default(),
                second.note.clone().unwrap_or_default()
            );
            Verdict {
                note: Some(note),
                ..first
            }
        }
    };
    Verdict { id, ..pick }
}

fn limsup_nonnegative(id: ConditionId, psi: &TimeFunction) -> Verdict {
    let lim = limit_at_zero(psi);
    let witness = vec![lim.samples.last().unwrap().0];
    if lim.confidence == Confidence::Stable {
        return Verdict {
            id,
            status: if lim.estimate >= 0.0 {
                Status::Pass
            } else {
                Status::Fail
            },
            witness,
            measured: lim.estimate,
            note: Some("limit at 0".into()),
        };
    }
    let inf = lim
        .samples
        .iter()
        .map(|s| s.1)
        .fold(f64::INFINITY, f64::min);
    let sup = lim
        .samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let (status, note) = if inf >= 0.0 {
        (
            Status::Pass,
            "limit unstable; infimum of the samples near 0 is >= 0",
        )
    } else if sup < 0.0 {
        (
            Status::Fail,
            "limit unstable; all samples near 0 are negative",
        )
    } else {
        (
            Status::Inconclusive,
            "limit unstable; samples near 0 change sign",
        )
    };
    Verdict {
        id,
        status,
        witness,
        measured: inf,
        note: Some(note.into()),
    }
}

fn b5_on_grid(
    au: &mut Auditor,
    id: ConditionId,
    ctx: &EstimateContext,
    beta: &TimeFunction,
    psi: &TimeFunction,
) -> Result<Verdict> {
    let mut worst = (0.0f64, au.grid[0], 0.0);
    for &t in &au.grid.clone() {
        let r = b5_residual(ctx, beta, psi, t)?;
        au.lower_accuracy |= r.lower_accuracy;
        let scaled = r.residual.abs() / (1.0 + r.dpsi.abs());
        if scaled >= worst.0 {
            worst = (scaled, t, r.residual);
        }
    }
    Ok(Verdict {
        id,
        status: if worst.0 <= 1e-4 {
            Status::Pass
        } else {
            Status::Fail
        },
        witness: vec![worst.1],
        measured: worst.0,
        note: Some("max |residual|/(1+|psi'|)".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::{lixu_sinh_b, theta_power_b, APreset};

    fn ctx(k: f64, horizon: f64) -> EstimateContext {
        EstimateContext::new(2, k, horizon).unwrap()
    }

    #[test]
    fn limits() {
        let f = TimeFunction::new(1.0, |t| t / 2.0);
        let l = limit_at_zero(&f);
        assert_eq!(l.confidence, Confidence::Stable);
        assert!(l.estimate.abs() < 1e-12);
        let osc = TimeFunction::new(1.0, |t: f64| (1.0 / t).sin());
        assert_eq!(limit_at_zero(&osc).confidence, Confidence::Unstable);
    }

    #[test]
    fn integrability_verdicts() {
        let r = integrability_at_zero(&TimeFunction::new(1.0, |s: f64| s.powf(-0.5)), 1.0).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!((r.exponent + 0.5).abs() < 1e-9);
        let r = integrability_at_zero(&TimeFunction::new(1.0, |s| 1.0 / s), 1.0).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!((r.exponent + 1.0).abs() < 1e-9);
        assert!(matches!(
            integrability_at_zero(&TimeFunction::new(1.0, |s| -s), 1.0),
            Err(Error::NegativeNearZero { .. })
        ));
    }

    #[test]
    fn energy_exponent_of_theta_family() {
        let b = theta_power_b(0.9, 1.0, 2.0);
        let bb = b.clone();
        let f = TimeFunction::new(2.0, move |t| {
            bb.analytic_derivative(t).unwrap().powi(2) / bb.eval(t)
        });
        let r = integrability_at_zero(&f, 2.0).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(
            (r.exponent - (2.0 / 0.9 - 3.0)).abs() < 1e-3,
            "{}",
            r.exponent
        );
    }

    #[test]
    fn suite_a_for_square() {
        let r = check_suite(
            Suite::A,
            &ConditionInputs::a(APreset::Square.function(1.0, 2.0)),
            &ctx(1.0, 2.0),
            &SuiteExtras::default(),
        )
        .unwrap();
        assert!(r.all_pass(), "{}", r.to_table());
        assert_eq!(r.grid.len(), GRID_POINTS);
    }

    #[test]
    fn suite_c_theta_one_fails_c2_with_witness() {
        let r = check_suite(
            Suite::C,
            &ConditionInputs::b(theta_power_b(1.0, 1.0, 2.0)),
            &ctx(1.0, 2.0),
            &SuiteExtras::default(),
        )
        .unwrap();
        let c2 = r.verdict("C2").unwrap();
        assert_eq!(c2.status, Status::Fail);
        assert!(!c2.witness.is_empty() && c2.witness[0] < 1e-9);
    }

    #[test]
    fn suite_c_lixu_passes_with_half_delta() {
        let r = check_suite(
            Suite::C,
            &ConditionInputs::b(lixu_sinh_b(1.0, 2.0)),
            &ctx(1.0, 2.0),
            &SuiteExtras {
                delta: Some(0.5),
                eps: None,
            },
        )
        .unwrap();
        assert!(r.all_pass(), "{}", r.to_table());
    }

    #[test]
    fn unbounded_quantity_fails_boundedness() {
        // b = t^2: b'/b^0.9 = 2 t^{-0.8} grows toward 0
        let b = TimeFunction::new(1.0, |t| t * t).with_derivative(|t| 2.0 * t);
        let r = check_suite(
            Suite::C,
            &ConditionInputs::b(b),
            &ctx(1.0, 1.0),
            &SuiteExtras {
                delta: Some(0.9),
                eps: None,
            },
        )
        .unwrap();
        let c3 = r.verdict("C3").unwrap();
        assert_eq!(c3.status, Status::Fail);
        assert!((c3.measured + 0.8).abs() < 1e-6);
    }

    #[test]
    fn unknown_labels_and_missing_inputs() {
        assert!(ConditionId::new(Suite::A, "B1").is_err());
        assert!(ConditionId::new(Suite::Bprime, "B2½").is_ok());
        assert!(check_suite(
            Suite::B,
            &ConditionInputs::default(),
            &ctx(1.0, 1.0),
            &SuiteExtras::default()
        )
        .is_err());
    }

    #[test]
    fn table_rendering_is_aligned() {
        let r = check_suite(
            Suite::A,
            &ConditionInputs::a(APreset::Square.function(1.0, 2.0)),
            &ctx(1.0, 2.0),
            &SuiteExtras::default(),
        )
        .unwrap();
        let t = r.to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("id"));
        let col = lines[0].find("verdict").unwrap();
        assert_eq!(&lines[1][col..col + 4], "pass");
    }
}
