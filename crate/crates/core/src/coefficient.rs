//! Generation of `(beta, psi)` from a coefficient function `b(t)`:
//!
//! ```text
//! beta(t) = 1 - 2k / (b(t) e^{2kt}) ∫_0^t b(s) e^{2ks} ds
//! psi(t)  = n / (8 b(t)) ∫_0^t b'(s)^2 / (b(s) beta(s)) ds
//! ```
//!
//! plus the Qian transform `b = a + 2k ∫ a`, the logarithmic-derivative
//! identity `(2k beta + beta') / (1 - beta) = (ln b)'`, and the linear ODE
//! that `psi` satisfies.

use std::io::Read;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bound::{EstimateContext, GradientBound};
use crate::conditions::{check_suite, ConditionInputs, Suite, SuiteExtras};
use crate::error::{Error, Result};
use crate::ode::{dopri5, Tolerance};
use crate::quad::{integrate, integrate_fn_from_zero, integrate_from_zero, QuadratureSpec};
use crate::special::sinh_minus_x;
use crate::timefn::{differentiate, log_grid, TimeFunction};

// Cached grid: nodes T 2^{-30} ... T at ratio 2^{1/4}.
const GRID_DEPTH: i32 = 30;
const CELLS_PER_OCTAVE: i32 = 4;

struct Tables {
    nodes: Vec<f64>,
    /// `∫_0^s b(u) e^{2k(u-s)} du` at each node.
    weighted: Vec<f64>,
    /// `∫_0^s b'^2/(b beta) du` at each node.
    energy: Vec<f64>,
}

/// Shared state behind a generated bound: the coefficient function and
/// memoized cumulative integrals on a geometric grid.
pub struct Generator {
    ctx: EstimateContext,
    b: TimeFunction,
    spec: QuadratureSpec,
    tables: OnceLock<Result<Tables>>,
}

impl std::fmt::Debug for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Generator")
            .field("ctx", &self.ctx)
            .field("b", &self.b)
            .field("spec", &self.spec)
            .finish()
    }
}

impl Generator {
    /// Validates `k > 0` and `b > 0` on a log grid, then builds the caches.
    pub fn new(
        ctx: EstimateContext,
        b: TimeFunction,
        spec: QuadratureSpec,
    ) -> Result<Arc<Generator>> {
        ctx.validate()?;
        spec.validate()?;
        if ctx.k <= 0.0 {
            return Err(Error::KZeroUnsupported("generated-from-b"));
        }
        for t in log_grid(ctx.horizon * 1e-9, ctx.horizon, 200) {
            let v = b.try_eval(t)?;
            if !(v > 0.0) {
                return Err(Error::NonPositive { t, value: v });
            }
        }
        let g = Arc::new(Generator {
            ctx,
            b,
            spec,
            tables: OnceLock::new(),
        });
        g.tables()?;
        Ok(g)
    }

    pub fn ctx(&self) -> &EstimateContext {
        &self.ctx
    }

    pub fn b(&self) -> &TimeFunction {
        &self.b
    }

    fn b_prime(&self, t: f64) -> f64 {
        match self.b.analytic_derivative(t) {
            Some(d) => d,
            None => differentiate(&self.b, t)
                .map(|d| d.value)
                .unwrap_or(f64::NAN),
        }
    }

    fn tables(&self) -> Result<&Tables> {
        self.tables
            .get_or_init(|| self.build_tables())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_tables(&self) -> Result<Tables> {
        let horizon = self.ctx.horizon;
        let count = (GRID_DEPTH * CELLS_PER_OCTAVE) as usize;
        let mut nodes: Vec<f64> = (0..count)
            .map(|i| horizon * 2f64.powf(-(GRID_DEPTH as f64) + i as f64 / CELLS_PER_OCTAVE as f64))
            .collect();
        nodes.push(horizon);
        let two_k = 2.0 * self.ctx.k;
        let s0 = nodes[0];
        let mut weighted = vec![self.weighted_from_zero(s0)?];
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let cell = integrate(
                |u| self.b.eval(u) * (two_k * (u - b)).exp(),
                a,
                b,
                self.spec.abs_tol,
                self.spec.rel_tol,
            )?;
            let prev = *weighted.last().unwrap();
            weighted.push(prev * (-two_k * (b - a)).exp() + cell);
        }
        let mut tables = Tables {
            nodes,
            weighted,
            energy: Vec::new(),
        };
        let energy0 = integrate_fn_from_zero(
            |u| self.energy_integrand(u, None),
            s0,
            horizon,
            self.b.power_hint.map(|p| p - 2.0),
            &self.spec,
        )?;
        let mut energy = vec![energy0];
        for i in 0..tables.nodes.len() - 1 {
            let (a, b) = (tables.nodes[i], tables.nodes[i + 1]);
            let cell = integrate(
                |u| self.energy_integrand(u, Some(&tables)),
                a,
                b,
                self.spec.abs_tol,
                self.spec.rel_tol,
            )?;
            energy.push(energy[i] + cell);
        }
        tables.energy = energy;
        Ok(tables)
    }

    fn weighted_from_zero(&self, s: f64) -> Result<f64> {
        let two_k = 2.0 * self.ctx.k;
        integrate_fn_from_zero(
            |u| self.b.eval(u) * (two_k * (u - s)).exp(),
            s,
            self.ctx.horizon,
            self.b.power_hint,
            &self.spec,
        )
    }

    fn weighted_at(&self, s: f64, tables: Option<&Tables>) -> Result<f64> {
        let Some(tb) = tables else {
            return self.weighted_from_zero(s);
        };
        if s < tb.nodes[0] {
            return self.weighted_from_zero(s);
        }
        let m = cell_index(&tb.nodes, s);
        let a = tb.nodes[m];
        let two_k = 2.0 * self.ctx.k;
        let part = integrate(
            |u| self.b.eval(u) * (two_k * (u - s)).exp(),
            a,
            s,
            self.spec.abs_tol,
            self.spec.rel_tol,
        )?;
        Ok(tb.weighted[m] * (-two_k * (s - a)).exp() + part)
    }

    fn one_minus_beta_with(&self, s: f64, tables: Option<&Tables>) -> Result<f64> {
        let b = self.b.try_eval(s)?;
        if !(b > 0.0) {
            return Err(Error::NonPositive { t: s, value: b });
        }
        Ok(2.0 * self.ctx.k * self.weighted_at(s, tables)? / b)
    }

    fn energy_integrand(&self, u: f64, tables: Option<&Tables>) -> f64 {
        let beta = match self.one_minus_beta_with(u, tables) {
            Ok(d) => 1.0 - d,
            Err(_) => return f64::NAN,
        };
        let bp = self.b_prime(u);
        bp * bp / (self.b.eval(u) * beta)
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if t > 0.0 && t <= self.ctx.horizon * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                t,
                t_min: 0.0,
                t_max: self.ctx.horizon,
            })
        }
    }

    /// `1 - beta(t)`, without the cancellation of forming `beta` first.
    pub fn one_minus_beta(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        self.one_minus_beta_with(t, Some(self.tables()?))
    }

    pub fn beta(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.one_minus_beta(t)?)
    }

    pub fn psi(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let tb = self.tables()?;
        let energy = if t < tb.nodes[0] {
            integrate_fn_from_zero(
                |u| self.energy_integrand(u, Some(tb)),
                t,
                self.ctx.horizon,
                self.b.power_hint.map(|p| p - 2.0),
                &self.spec,
            )?
        } else {
            let m = cell_index(&tb.nodes, t);
            tb.energy[m]
                + integrate(
                    |u| self.energy_integrand(u, Some(tb)),
                    tb.nodes[m],
                    t,
                    self.spec.abs_tol,
                    self.spec.rel_tol,
                )?
        };
        Ok(self.ctx.nf() / (8.0 * self.b.try_eval(t)?) * energy)
    }

    pub fn beta_fn(self: &Arc<Self>) -> TimeFunction {
        let g = self.clone();
        TimeFunction::new(self.ctx.horizon, move |t| g.beta(t).unwrap_or(f64::NAN))
            .with_zero_limit(1.0)
    }

    pub fn psi_fn(self: &Arc<Self>) -> TimeFunction {
        let g = self.clone();
        TimeFunction::new(self.ctx.horizon, move |t| g.psi(t).unwrap_or(f64::NAN))
    }
}

fn cell_index(nodes: &[f64], s: f64) -> usize {
    nodes
        .partition_point(|&x| x <= s)
        .saturating_sub(1)
        .min(nodes.len() - 2)
}

/// `beta(t)` generated from `b`.
pub fn beta_from_b(ctx: EstimateContext, b: &TimeFunction) -> Result<TimeFunction> {
    Ok(Generator::new(ctx, b.clone(), QuadratureSpec::default())?.beta_fn())
}

/// `psi(t)` generated from `b` (computing `beta` internally).
pub fn psi_from_b(ctx: EstimateContext, b: &TimeFunction) -> Result<TimeFunction> {
    Ok(Generator::new(ctx, b.clone(), QuadratureSpec::default())?.psi_fn())
}

/// Packages the generated `(beta, psi)` as a bound valid on `(0, T]`, after
/// checking (C1) and (C2) on `b`.
pub fn bound_from_b(ctx: EstimateContext, b: &TimeFunction) -> Result<GradientBound> {
    let report = check_suite(
        Suite::C,
        &ConditionInputs::b(b.clone()),
        &ctx,
        &SuiteExtras {
            delta: Some(0.5),
            eps: None,
        },
    )?;
    for id in ["C1", "C2"] {
        let v = report.verdict(id).expect("suite C reports C1 and C2");
        if !v.status.is_pass() {
            return Err(Error::ConditionFailure(format!("{id}: {}", v.describe())));
        }
    }
    let g = Generator::new(ctx, b.clone(), QuadratureSpec::default())?;
    Ok(GradientBound::generated(ctx, g))
}

/// `b = a + 2k ∫_0^t a`, with `b' = a' + 2k a` when `a'` is known.
pub fn qian_to_b(a: &TimeFunction, k: f64) -> Result<TimeFunction> {
    let spec = QuadratureSpec::default();
    let horizon = a.horizon();
    // fail early on a non-integrable a
    integrate_from_zero(a, horizon, &spec)?;
    let aa = a.clone();
    let mut b = TimeFunction::new(horizon, move |t| {
        let integral = integrate_from_zero(&aa, t, &spec).unwrap_or(f64::NAN);
        aa.eval(t) + 2.0 * k * integral
    });
    if a.has_derivative() {
        let aa = a.clone();
        b = b.with_derivative(move |t| aa.analytic_derivative(t).unwrap() + 2.0 * k * aa.eval(t));
    }
    b.power_hint = a.power_hint;
    b.zero_limit_hint = Some(0.0);
    Ok(b)
}

/// `(2k beta + beta') / (1 - beta) - b'/b` at `t`.
pub fn logderiv_identity_residual(
    ctx: &EstimateContext,
    b: &TimeFunction,
    beta: &TimeFunction,
    t: f64,
) -> Result<f64> {
    let be = beta.try_eval(t)?;
    if be >= 1.0 {
        return Err(Error::BetaOutOfRange { t, beta: be });
    }
    let dbeta = differentiate(beta, t)?.value;
    let db = differentiate(b, t)?.value;
    Ok((2.0 * ctx.k * be + dbeta) / (1.0 - be) - db / b.try_eval(t)?)
}

/// Value of the (B5) left-hand side with the `psi'` it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B5Residual {
    pub residual: f64,
    pub dpsi: f64,
    pub lower_accuracy: bool,
}

impl B5Residual {
    /// `|residual| <= 1e-4 (1 + |psi'|)`.
    pub fn within_tolerance(&self) -> bool {
        self.residual.abs() <= 1e-4 * (1.0 + self.dpsi.abs())
    }
}

fn b5_coefficients(ctx: &EstimateContext, beta: f64, dbeta: f64) -> (f64, f64) {
    let q = 2.0 * ctx.k * beta + dbeta;
    let rate = q / (1.0 - beta);
    let source = ctx.nf() * q * q / (8.0 * beta * (1.0 - beta) * (1.0 - beta));
    (rate, source)
}

/// `psi' + (2k beta + beta')/(1 - beta) psi - n (2k beta + beta')^2 / (8 beta (1 - beta)^2)`.
pub fn b5_residual(
    ctx: &EstimateContext,
    beta: &TimeFunction,
    psi: &TimeFunction,
    t: f64,
) -> Result<B5Residual> {
    let be = beta.try_eval(t)?;
    if !(be > 0.0 && be < 1.0) {
        return Err(Error::BetaOutOfRange { t, beta: be });
    }
    let db = differentiate(beta, t)?;
    let dp = differentiate(psi, t)?;
    let (rate, source) = b5_coefficients(ctx, be, db.value);
    Ok(B5Residual {
        residual: dp.value + rate * psi.try_eval(t)? - source,
        dpsi: dp.value,
        lower_accuracy: db.lower_accuracy || dp.lower_accuracy,
    })
}

/// Integrates the (B5) ODE for `psi` forward from `psi(t0) = psi0` to `t1`.
pub fn ode_psi_solve(
    ctx: &EstimateContext,
    beta: &TimeFunction,
    t0: f64,
    psi0: f64,
    t1: f64,
) -> Result<TimeFunction> {
    if !(t0 > 0.0 && t1 > t0 && t1 <= ctx.horizon * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t0 < t1 <= T, got t0 = {t0}, t1 = {t1}"
        )));
    }
    let rhs = |t: f64, psi: f64| -> Result<f64> {
        let be = beta.try_eval(t)?;
        if !(be > 0.0 && be < 1.0) {
            return Err(Error::BetaOutOfRange { t, beta: be });
        }
        let db = differentiate(beta, t)?.value;
        let (rate, source) = b5_coefficients(ctx, be, db);
        Ok(-rate * psi + source)
    };
    let traj = dopri5(
        rhs,
        t0,
        psi0,
        t1,
        Tolerance {
            rtol: 1e-10,
            atol: 1e-10 * psi0.abs().max(1e-300),
        },
    )
    .map_err(|e| {
        // psi blows up where beta reaches 0 or 1; name the cause
        if let Error::StepUnderflow { t } = e {
            let probe = t * (1.0 + 1e-8);
            if let Ok(be) = beta.try_eval(probe) {
                if !(be > 0.0 && be < 1.0) {
                    return Error::BetaOutOfRange { t: probe, beta: be };
                }
            }
        }
        e
    })?;
    let traj = Arc::new(traj);
    let tr = traj.clone();
    Ok(TimeFunction::new(t1, move |t| {
        tr.value(t).unwrap_or(f64::NAN)
    }))
}

/// Named choices of Qian's `a(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "a", deny_unknown_fields)]
pub enum APreset {
    /// `a = t^2`
    Square,
    /// `a = sinh^2(kt)`
    SinhSquared,
    /// `a = t^p`
    Power { p: f64 },
}

impl APreset {
    pub fn function(&self, k: f64, horizon: f64) -> TimeFunction {
        match *self {
            APreset::Square => TimeFunction::new(horizon, |t| t * t)
                .with_derivative(|t| 2.0 * t)
                .with_power(2.0),
            APreset::SinhSquared => TimeFunction::new(horizon, move |t| (k * t).sinh().powi(2))
                .with_derivative(move |t| k * (2.0 * k * t).sinh())
                .with_power(2.0),
            APreset::Power { p } => TimeFunction::new(horizon, move |t| t.powf(p))
                .with_derivative(move |t| p * t.powf(p - 1.0))
                .with_power(p),
        }
        .with_zero_limit(0.0)
    }

    pub fn parse(s: &str) -> Result<APreset> {
        match s {
            "t2" | "square" => Ok(APreset::Square),
            "sinh2" | "sinh-squared" => Ok(APreset::SinhSquared),
            _ => match s.strip_prefix("power:") {
                Some(p) => p
                    .parse()
                    .map(|p| APreset::Power { p })
                    .map_err(|_| Error::InvalidParameter(format!("bad exponent in `{s}`"))),
                None => Err(Error::InvalidParameter(format!(
                    "unknown a-preset `{s}` (t2, sinh2, power:<p>)"
                ))),
            },
        }
    }
}

/// `b = (1 + theta k t) t^{2/theta - 1}`.
pub fn theta_power_b(theta: f64, k: f64, horizon: f64) -> TimeFunction {
    let p = 2.0 / theta - 1.0;
    TimeFunction::new(horizon, move |t| (1.0 + theta * k * t) * t.powf(p))
        .with_derivative(move |t| {
            theta * k * t.powf(p) + (1.0 + theta * k * t) * p * t.powf(p - 1.0)
        })
        .with_power(p)
        .with_zero_limit(0.0)
}

/// `b = sinh^2(kt) + sinh(kt) cosh(kt) - kt`.
pub fn lixu_sinh_b(k: f64, horizon: f64) -> TimeFunction {
    TimeFunction::new(horizon, move |t| {
        let x = k * t;
        x.sinh().powi(2) + 0.5 * sinh_minus_x(2.0 * x)
    })
    .with_derivative(move |t| {
        let x = k * t;
        k * (2.0 * x).sinh() + 2.0 * k * x.sinh().powi(2)
    })
    .with_power(2.0)
    .with_zero_limit(0.0)
}

/// Named coefficient functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "preset", deny_unknown_fields)]
pub enum CoefficientPreset {
    ThetaPower { theta: f64 },
    LixuSinh,
    QianFromA { a: String },
}

impl CoefficientPreset {
    pub fn b_function(&self, k: f64, horizon: f64) -> Result<TimeFunction> {
        match self {
            CoefficientPreset::ThetaPower { theta } => {
                if !(*theta > 0.0 && *theta < 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "theta = {theta} must lie in (0, 2)"
                    )));
                }
                Ok(theta_power_b(*theta, k, horizon))
            }
            CoefficientPreset::LixuSinh => Ok(lixu_sinh_b(k, horizon)),
            CoefficientPreset::QianFromA { a } => {
                qian_to_b(&APreset::parse(a)?.function(k, horizon), k)
            }
        }
    }
}

/// Loads `b` from a CSV table with columns `t, b, bprime` (monotone `t`),
/// interpolated by cubic Hermite pieces. Below the first row the table is
/// continued by the power law matching value and slope there.
pub fn load_b_table(path: &Path, horizon: f64) -> Result<TimeFunction> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    parse_b_table(&text, horizon)
}

pub fn parse_b_table(text: &str, horizon: f64) -> Result<TimeFunction> {
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Table("empty table".into()))?
        .split(',')
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let col = |names: &[&str]| -> Result<usize> {
        header
            .iter()
            .position(|h| names.contains(&h.as_str()))
            .ok_or_else(|| Error::Table(format!("missing column `{}`", names[0])))
    };
    let (ct, cb, cd) = (col(&["t"])?, col(&["b"])?, col(&["bprime", "b'", "db"])?);
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |c: usize| -> Result<f64> {
            cells
                .get(c)
                .ok_or_else(|| Error::Table(format!("row {}: too few columns", i + 2)))?
                .parse::<f64>()
                .map_err(|e| Error::Table(format!("row {}: {e}", i + 2)))
        };
        let row = [get(ct)?, get(cb)?, get(cd)?];
        if let Some(prev) = rows.last() {
            if !(row[0] > prev[0]) {
                return Err(Error::Table(format!("row {}: t is not increasing", i + 2)));
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::Table("need at least two rows".into()));
    }
    if !(rows[0][0] > 0.0) || rows[0][1] <= 0.0 {
        return Err(Error::Table("first row must have t > 0 and b > 0".into()));
    }
    if rows.last().unwrap()[0] < horizon * (1.0 - 1e-12) {
        return Err(Error::Table(format!(
            "table ends before the horizon T = {horizon}"
        )));
    }
    let table = Arc::new(HermiteTable::new(rows));
    let (tv, td) = (table.clone(), table.clone());
    let p = table.power;
    Ok(TimeFunction::new(horizon, move |t| tv.value(t))
        .with_derivative(move |t| td.derivative(t))
        .with_power(p)
        .with_zero_limit(0.0))
}

struct HermiteTable {
    rows: Vec<[f64; 3]>,
    power: f64,
}

impl HermiteTable {
    fn new(rows: Vec<[f64; 3]>) -> Self {
        let [t0, b0, d0] = rows[0];
        HermiteTable {
            power: t0 * d0 / b0,
            rows,
        }
    }

    fn locate(&self, t: f64) -> Option<(usize, f64, f64)> {
        let i = self.rows.partition_point(|r| r[0] <= t).checked_sub(1)?;
        let i = i.min(self.rows.len() - 2);
        let h = self.rows[i + 1][0] - self.rows[i][0];
        Some((i, h, (t - self.rows[i][0]) / h))
    }

    fn value(&self, t: f64) -> f64 {
        let [t0, b0, _] = self.rows[0];
        if t < t0 {
            return b0 * (t / t0).powf(self.power);
        }
        if t > self.rows.last().unwrap()[0] * (1.0 + 1e-12) {
            return f64::NAN;
        }
        let (i, h, s) = self.locate(t).unwrap();
        let ([_, y0, d0], [_, y1, d1]) = (self.rows[i], self.rows[i + 1]);
        let (h00, h10) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
        );
        let (h01, h11) = (s * s * (3.0 - 2.0 * s), s * s * (s - 1.0));
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    fn derivative(&self, t: f64) -> f64 {
        let [t0, b0, _] = self.rows[0];
        if t < t0 {
            return b0 * self.power / t0 * (t / t0).powf(self.power - 1.0);
        }
        if t > self.rows.last().unwrap()[0] * (1.0 + 1e-12) {
            return f64::NAN;
        }
        let (i, h, s) = self.locate(t).unwrap();
        let ([_, y0, d0], [_, y1, d1]) = (self.rows[i], self.rows[i + 1]);
        let dh00 = 6.0 * s * s - 6.0 * s;
        let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
        let dh01 = -dh00;
        let dh11 = 3.0 * s * s - 2.0 * s;
        (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32, k: f64, horizon: f64) -> EstimateContext {
        EstimateContext::new(n, k, horizon).unwrap()
    }

    #[test]
    fn qian_transform_of_square() {
        let a = APreset::Square.function(1.0, 3.0);
        let b = qian_to_b(&a, 1.0).unwrap();
        for t in [0.01, 0.5, 1.0, 3.0] {
            let exact = t * t + 2.0 / 3.0 * t * t * t;
            assert!((b.eval(t) - exact).abs() <= 1e-12 * exact, "t = {t}");
            assert!((b.analytic_derivative(t).unwrap() - (2.0 * t + 2.0 * t * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn qian_transform_of_sinh_squared_is_the_lixu_b() {
        let k = 1.3;
        let b = qian_to_b(&APreset::SinhSquared.function(k, 2.0), k).unwrap();
        let lixu = lixu_sinh_b(k, 2.0);
        for t in [1e-3, 0.1, 1.0, 2.0] {
            assert!((b.eval(t) / lixu.eval(t) - 1.0).abs() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn beta_of_lixu_b_in_closed_form() {
        let k = 1.0;
        let beta = beta_from_b(ctx(2, k, 3.0), &lixu_sinh_b(k, 3.0)).unwrap();
        for t in log_grid(1e-3, 3.0, 25) {
            let exact = 1.0 / (1.0 + crate::special::lixu_ratio(k * t));
            assert!((beta.eval(t) / exact - 1.0).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn beta_lower_bound_and_range() {
        let k = 2.0;
        let beta = beta_from_b(ctx(3, k, 2.0), &theta_power_b(0.3, k, 2.0)).unwrap();
        for t in log_grid(1e-4, 2.0, 40) {
            let v = beta.eval(t);
            assert!(v > 0.0 && v < 1.0);
            assert!(v >= 1.0 - 2.0 * k * t - 1e-14);
        }
    }

    #[test]
    fn beta_via_qian_transform() {
        // beta = 1/(1 + (2k/a) ∫ a) for a = t^2
        let k = 0.7;
        let b = qian_to_b(&APreset::Square.function(k, 2.0), k).unwrap();
        let beta = beta_from_b(ctx(2, k, 2.0), &b).unwrap();
        for t in [0.01, 0.3, 1.0, 2.0] {
            let exact = 1.0 / (1.0 + 2.0 * k * t / 3.0);
            assert!((beta.eval(t) / exact - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn identity_residual_and_negative_control() {
        let (k, c) = (1.0, ctx(2, 1.0, 3.0));
        let b = theta_power_b(0.5, k, 3.0);
        let beta = beta_from_b(c, &b).unwrap();
        let r = logderiv_identity_residual(&c, &b, &beta, 1.0).unwrap();
        let scale = differentiate(&b, 1.0).unwrap().value / b.eval(1.0);
        assert!(r.abs() <= 1e-5 * scale, "{r}");
        let wrong = TimeFunction::constant(3.0, 0.5);
        let r = logderiv_identity_residual(&c, &b, &wrong, 1.0).unwrap();
        assert!(r.abs() > 0.1);
        let one = TimeFunction::constant(3.0, 1.0);
        assert!(logderiv_identity_residual(&c, &b, &one, 1.0).is_err());
    }

    #[test]
    fn b5_shift_by_constant() {
        let c = ctx(2, 1.0, 5.0);
        let q = crate::bound::make_family(c, crate::bound::Family::QianTheta, &[0.5]).unwrap();
        let (beta, psi) = (q.beta_fn(), q.psi_fn());
        let base = b5_residual(&c, &beta, &psi, 1.0).unwrap();
        assert!(base.within_tolerance());
        let shifted = psi.map(|_, v| v + 1.0);
        let r = b5_residual(&c, &beta, &shifted, 1.0).unwrap();
        let be = beta.eval(1.0);
        let db = differentiate(&beta, 1.0).unwrap().value;
        let rate = (2.0 * be + db) / (1.0 - be);
        assert!(rate > 0.0);
        assert!((r.residual - base.residual - rate).abs() < 1e-6);
    }

    #[test]
    fn ode_with_constant_beta() {
        let (n, k, be) = (3u32, 1.5, 0.4);
        let c = ctx(n, k, 4.0);
        let beta = TimeFunction::constant(4.0, be);
        let rate = 2.0 * k * be / (1.0 - be);
        let psi_inf = n as f64 * k / (4.0 * (1.0 - be));
        let psi0 = 7.0;
        let psi = ode_psi_solve(&c, &beta, 0.5, psi0, 4.0).unwrap();
        for t in [0.5, 1.0, 2.5, 4.0] {
            let exact = (psi0 - psi_inf) * (-rate * (t - 0.5)).exp() + psi_inf;
            assert!((psi.eval(t) - exact).abs() < 1e-8 * exact, "t = {t}");
        }
        let flat = ode_psi_solve(&c, &beta, 0.5, psi_inf, 4.0).unwrap();
        assert!((flat.eval(3.0) - psi_inf).abs() < 1e-12);
    }

    #[test]
    fn ode_rejects_beta_outside_unit_interval() {
        let c = ctx(2, 1.0, 2.0);
        let beta = TimeFunction::new(2.0, |t| 0.5 + t);
        let r = ode_psi_solve(&c, &beta, 0.1, 1.0, 2.0);
        assert!(matches!(r, Err(Error::BetaOutOfRange { .. })), "{r:?}");
    }

    #[test]
    fn generator_rejects_non_positive_b_and_zero_k() {
        let c = ctx(2, 1.0, 1.0);
        let b = TimeFunction::new(1.0, |t| t - 0.5);
        assert!(matches!(beta_from_b(c, &b), Err(Error::NonPositive { .. })));
        let b = theta_power_b(0.5, 0.0, 1.0);
        assert!(beta_from_b(ctx(2, 0.0, 1.0), &b).is_err());
    }

    #[test]
    fn psi_of_theta_one_does_not_converge() {
        let c = ctx(2, 1.0, 1.0);
        let e = psi_from_b(c, &theta_power_b(1.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(e, Error::NonConvergence { .. }), "{e:?}");
    }

    #[test]
    fn table_interpolates_cubics_exactly() {
        let mut csv = String::from("t,b,bprime\n");
        for i in 1..=20 {
            let t = i as f64 * 0.1;
            csv.push_str(&format!(
                "{t},{},{}\n",
                t * t + t * t * t,
                2.0 * t + 3.0 * t * t
            ));
        }
        let b = parse_b_table(&csv, 2.0).unwrap();
        for t in [0.15, 0.77, 1.99] {
            assert!((b.eval(t) - (t * t + t * t * t)).abs() < 1e-13);
            assert!((b.analytic_derivative(t).unwrap() - (2.0 * t + 3.0 * t * t)).abs() < 1e-12);
        }
        assert!(b.eval(0.01) > 0.0);
        assert!(matches!(
            parse_b_table("t,b\n1,2\n", 1.0),
            Err(Error::Table(_))
        ));
        assert!(matches!(
            parse_b_table("t,b,bprime\n1,1,1\n0.5,1,1\n", 1.0),
            Err(Error::Table(_))
        ));
    }
}
