//! Checks `β‖∇f‖² - f_t <= ψ` on model data and compares bound families.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{make_family, EstimateContext, Family, GradientBound};
use crate::error::{Error, Result};
use crate::manifolds::{DataKind, LogHeatData};
use crate::numfmt::{csv_row, num};
use crate::roots::bisect;
use crate::timefn::log_grid;

/// Name of the environment variable capping worker threads.
pub const THREADS_ENV: &str = "GRADEST_THREADS";

/// Runs `op` on a pool capped by `GRADEST_THREADS` when it is set.
pub fn with_thread_cap<R: Send>(op: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                Error::InvalidParameter(format!("{THREADS_ENV} = `{v}` is not a positive integer"))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(op))
        }
        Err(_) => Ok(op()),
    }
}

/// Tensor grid of radii and times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
}

impl GridSpec {
    /// `r`: 0 plus 40 log-spaced points up to `r_max/2`; `t`: 60 log-spaced
    /// points across the data window intersected with the bound's domain.
    pub fn default_for(bound: &GradientBound, data: &LogHeatData) -> Result<GridSpec> {
        let half = 0.5 * data.r_max;
        let mut r = vec![0.0];
        r.extend(log_grid(half * 1e-3, half, 40));
        let lo = data.t_range.0.max(bound.t_min() * (1.0 + 1e-9));
        let hi = data.t_range.1.min(bound.ctx().horizon);
        if !(lo < hi) {
            return Err(Error::EmptyIntersection);
        }
        Ok(GridSpec {
            r,
            t: log_grid(lo, hi, 60),
        })
    }
}

/// When a grid value of `G` counts as a violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "tol", rename_all = "lowercase")]
pub enum TolerancePolicy {
    /// `G > tol`.
    Absolute(f64),
    /// `G > tol (|f_t| + ‖∇f‖²)`.
    Relative(f64),
}

impl TolerancePolicy {
    pub fn default_for(data: &LogHeatData) -> Self {
        match data.kind {
            DataKind::Exact => TolerancePolicy::Absolute(1e-9),
            DataKind::Numeric => TolerancePolicy::Relative(1e-3),
        }
    }

    fn allowed(&self, f_t: f64, grad_sq: f64) -> f64 {
        match *self {
            TolerancePolicy::Absolute(tol) => tol,
            TolerancePolicy::Relative(tol) => tol * (f_t.abs() + grad_sq),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub r: f64,
    pub t: f64,
    pub g: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub bound: String,
    pub data: String,
    pub grid: GridSpec,
    pub tolerance: TolerancePolicy,
    pub max_g: f64,
    pub argmax: (f64, f64),
    pub violations: Vec<Violation>,
    /// `(t, min_r -G)`.
    pub margin_curve: Vec<(f64, f64)>,
    pub passed: bool,
    /// `G[t][r]`.
    #[serde(skip)]
    pub g: Vec<Vec<f64>>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Columns `t,margin`.
    pub fn margin_csv(&self) -> String {
        let mut s = String::from("t,margin\n");
        for &(t, m) in &self.margin_curve {
            let _ = writeln!(s, "{}", csv_row(&[t, m]));
        }
        s
    }

    /// Columns `r,t,G`, one row per grid point.
    pub fn g_csv(&self) -> String {
        let mut s = String::from("r,t,G\n");
        for (j, &t) in self.grid.t.iter().enumerate() {
            for (i, &r) in self.grid.r.iter().enumerate() {
                let _ = writeln!(s, "{}", csv_row(&[r, t, self.g[j][i]]));
            }
        }
        s
    }
}

/// Evaluates `G = β‖∇f‖² - f_t - ψ` on the grid.
pub fn verify_bound(
    bound: &GradientBound,
    data: &LogHeatData,
    grid: Option<&GridSpec>,
    tol: Option<TolerancePolicy>,
) -> Result<VerificationReport> {
    let ctx = bound.ctx();
    if data.n != ctx.n {
        return Err(Error::HypothesisMismatch(format!(
            "data dimension {} but bound dimension {}",
            data.n, ctx.n
        )));
    }
    if data.k > ctx.k * (1.0 + 1e-12) {
        return Err(Error::HypothesisMismatch(format!(
            "data needs Ric >= -{} g but the bound assumes Ric >= -{} g",
            data.k, ctx.k
        )));
    }
    let grid = match grid {
        Some(g) => g.clone(),
        None => GridSpec::default_for(bound, data)?,
    };
    if grid.r.is_empty() || grid.t.is_empty() {
        return Err(Error::InvalidParameter("empty verification grid".into()));
    }
    let tol = tol.unwrap_or_else(|| TolerancePolicy::default_for(data));
    let rows: Vec<Result<Vec<(f64, f64)>>> = with_thread_cap(|| {
        grid.t
            .par_iter()
            .map(|&t| {
                let s = bound.evaluate(t)?;
                grid.r
                    .iter()
                    .map(|&r| {
                        let d = data.sample(r, t)?;
                        let g = s.beta * d.grad_sq - d.f_t - s.psi;
                        Ok((g, tol.allowed(d.f_t, d.grad_sq)))
                    })
                    .collect()
            })
            .collect()
    })?;
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut max_g = f64::NEG_INFINITY;
    let mut argmax = (grid.r[0], grid.t[0]);
    let mut violations = Vec::new();
    let mut margin_curve = Vec::with_capacity(grid.t.len());
    let mut g = Vec::with_capacity(grid.t.len());
    for (row, &t) in rows.iter().zip(&grid.t) {
        let mut margin = f64::INFINITY;
        for (&(gv, allowed), &r) in row.iter().zip(&grid.r) {
            if gv > max_g {
                max_g = gv;
                argmax = (r, t);
            }
            if gv > allowed {
                violations.push(Violation {
                    r,
                    t,
                    g: gv,
                    allowed,
                });
            }
            margin = margin.min(-gv);
        }
        margin_curve.push((t, margin));
        g.push(row.iter().map(|p| p.0).collect());
    }
    Ok(VerificationReport {
        bound: bound.id(),
        data: data.id(),
        grid,
        tolerance: tol,
        max_g,
        argmax,
        passed: violations.is_empty(),
        violations,
        margin_curve,
        g,
    })
}

/// `(n/(2t)) / ψ(t)` along `t_seq`.
pub fn sharpness_ratio(bound: &GradientBound, t_seq: &[f64]) -> Result<Vec<f64>> {
    let n = bound.ctx().nf();
    t_seq
        .iter()
        .map(|&t| bound.formula(t).map(|s| n / (2.0 * t) / s.psi))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessLimit {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub limit: f64,
    /// Difference between the last two extrapolations.
    pub spread: f64,
}

impl SharpnessLimit {
    pub fn is_stable(&self) -> bool {
        self.spread <= 1e-4
    }
}

/// Ratios at `t = 2^{-j}`, `j = 5..=20`, extrapolated to `t -> 0`.
pub fn sharpness_limit(bound: &GradientBound) -> Result<SharpnessLimit> {
    let times: Vec<f64> = (5..=20).map(|j| 0.5f64.powi(j)).collect();
    let ratios = sharpness_ratio(bound, &times)?;
    let m = ratios.len();
    let a = aitken(ratios[m - 3], ratios[m - 2], ratios[m - 1]);
    let b = aitken(ratios[m - 4], ratios[m - 3], ratios[m - 2]);
    Ok(SharpnessLimit {
        times,
        ratios,
        limit: a,
        spread: (a - b).abs(),
    })
}

fn aitken(x0: f64, x1: f64, x2: f64) -> f64 {
    let d1 = x2 - x1;
    let denom = d1 - (x1 - x0);
    let v = x2 - d1 * d1 / denom;
    if denom == 0.0 || !v.is_finite() {
        x2
    } else {
        v
    }
}

/// `ψ` values of several bounds on a shared time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub t: Vec<f64>,
    pub ids: Vec<String>,
    /// `psi[row][bound]`, absent outside the bound's domain.
    pub psi: Vec<Vec<Option<f64>>>,
    pub alpha: Vec<Vec<Option<f64>>>,
    pub phi: Vec<Vec<Option<f64>>>,
    /// Index of the bound with minimal `ψ` among those valid at `t`.
    pub dominant: Vec<Option<usize>>,
    /// Index of a bound whose `α` and `φ` are both minimal, if one exists.
    pub alpha_dominant: Vec<Option<usize>>,
}

impl ComparisonTable {
    /// Columns `t`, one `ψ` column per bound, then the dominant bound's id.
    pub fn to_csv(&self) -> String {
        self.csv(&self.psi, &self.dominant)
    }

    /// Same layout with `α` then `φ` per bound and the α-form dominant.
    pub fn alpha_csv(&self) -> String {
        let mut s = String::from("t");
        for id in &self.ids {
            let _ = write!(s, ",alpha:{id},phi:{id}");
        }
        s.push_str(",alpha_dominant\n");
        for (j, &t) in self.t.iter().enumerate() {
            s.push_str(&num(t));
            for i in 0..self.ids.len() {
                for v in [self.alpha[j][i], self.phi[j][i]] {
                    s.push(',');
                    s.push_str(&v.map(num).unwrap_or_default());
                }
            }
            s.push(',');
            s.push_str(
                self.alpha_dominant[j]
                    .map(|i| self.ids[i].as_str())
                    .unwrap_or(""),
            );
            s.push('\n');
        }
        s
    }

    fn csv(&self, values: &[Vec<Option<f64>>], dom: &[Option<usize>]) -> String {
        let mut s = String::from("t");
        for id in &self.ids {
            s.push(',');
            s.push_str(id);
        }
        s.push_str(",dominant\n");
        for (j, &t) in self.t.iter().enumerate() {
            s.push_str(&num(t));
            for v in &values[j] {
                s.push(',');
                s.push_str(&v.map(num).unwrap_or_default());
            }
            s.push(',');
            s.push_str(dom[j].map(|i| self.ids[i].as_str()).unwrap_or(""));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Tabulates `ψ` (and `α`, `φ`) of `bounds` on `t_grid`.
pub fn compare_bounds(bounds: &[GradientBound], t_grid: &[f64]) -> Result<ComparisonTable> {
    let first = bounds
        .first()
        .ok_or_else(|| Error::InvalidParameter("no bounds to compare".into()))?;
    let (n, k) = (first.ctx().n, first.ctx().k);
    if bounds.iter().any(|b| b.ctx().n != n || b.ctx().k != k) {
        return Err(Error::HypothesisMismatch(
            "compared bounds must share n and k".into(),
        ));
    }
    let lo = bounds.iter().map(|b| b.t_min()).fold(0.0, f64::max);
    let hi = bounds
        .iter()
        .map(|b| b.ctx().horizon)
        .fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::EmptyIntersection);
    }
    let ids: Vec<String> = bounds.iter().map(|b| b.id()).collect();
    let rows: Vec<Vec<Option<(f64, f64, f64)>>> = with_thread_cap(|| {
        t_grid
            .par_iter()
            .map(|&t| {
                bounds
                    .iter()
                    .map(|b| b.evaluate(t).ok().map(|s| (s.psi, s.alpha, s.phi)))
                    .collect()
            })
            .collect()
    })?;
    let pick = |vals: &[Option<(f64, f64, f64)>]| -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, v) in vals.iter().enumerate() {
            let Some(v) = v else { continue };
            best = match best {
                None => Some(i),
                Some(b) => {
                    let bv = vals[b].unwrap().0;
                    if v.0 < bv || (v.0 == bv && ids[i] < ids[b]) {
                        Some(i)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    };
    let pareto = |vals: &[Option<(f64, f64, f64)>]| -> Option<usize> {
        let valid: Vec<(usize, (f64, f64, f64))> = vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .collect();
        let mut winners: Vec<usize> = valid
            .iter()
            .filter(|(_, a)| valid.iter().all(|(_, b)| a.1 <= b.1 && a.2 <= b.2))
            .map(|&(i, _)| i)
            .collect();
        winners.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        winners.first().copied()
    };
    let column = |f: fn(&(f64, f64, f64)) -> f64| -> Vec<Vec<Option<f64>>> {
        rows.iter()
            .map(|row| row.iter().map(|v| v.as_ref().map(f)).collect())
            .collect()
    };
    Ok(ComparisonTable {
        t: t_grid.to_vec(),
        psi: column(|v| v.0),
        alpha: column(|v| v.1),
        phi: column(|v| v.2),
        dominant: rows.iter().map(|r| pick(r)).collect(),
        alpha_dominant: rows.iter().map(|r| pareto(r)).collect(),
        ids,
    })
}

/// Time where `ψ₁ - ψ₂` changes sign inside `bracket`, to relative width 1e-10.
pub fn find_crossover(b1: &GradientBound, b2: &GradientBound, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad bracket ({lo}, {hi})")));
    }
    let diff = |t: f64| -> Result<f64> { Ok(b1.formula(t)?.psi - b2.formula(t)?.psi) };
    // sample first so that several roots are reported instead of one
    let ts = log_grid(lo, hi, 257);
    let mut signs = Vec::with_capacity(ts.len());
    for &t in &ts {
        let d = diff(t)?;
        if d != 0.0 {
            signs.push((t, d.signum()));
        }
    }
    let changes: Vec<(f64, f64)> = signs
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[1].0))
        .collect();
    match changes.len() {
        0 => Err(Error::NoSignChange { lo, hi }),
        1 => {
            let (a, b) = changes[0];
            bisect(|t| diff(t).unwrap_or(f64::NAN), a, b, 1e-10)
        }
        count => Err(Error::MultipleSignChanges { lo, hi, count }),
    }
}

/// Extrapolated large-time limit of a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limit {
    Finite(f64),
    Divergent,
}

impl Limit {
    pub fn value(self) -> Option<f64> {
        match self {
            Limit::Finite(v) => Some(v),
            Limit::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimits {
    pub alpha: Limit,
    pub phi: Limit,
}

/// `α` and `φ` along `t = 2^j / k`, `j = 1..=20`, with Aitken extrapolation.
pub fn asymptotic_limits(bound: &GradientBound) -> AsymptoticLimits {
    let k = if bound.ctx().k > 0.0 {
        bound.ctx().k
    } else {
        1.0
    };
    let mut alpha = Vec::new();
    let mut phi = Vec::new();
    for j in 1..=20 {
        match bound.formula(2f64.powi(j) / k) {
            Ok(s) => {
                alpha.push(s.alpha);
                phi.push(s.phi);
            }
            Err(_) => {
                alpha.push(f64::NAN);
                phi.push(f64::NAN);
            }
        }
    }
    AsymptoticLimits {
        alpha: extrapolate(&alpha),
        phi: extrapolate(&phi),
    }
}

fn extrapolate(xs: &[f64]) -> Limit {
    let m = xs.len();
    let (x0, x1, x2) = (xs[m - 3], xs[m - 2], xs[m - 1]);
    if ![x0, x1, x2].iter().all(|v| v.is_finite()) {
        return Limit::Divergent;
    }
    let (d1, d2) = (x1 - x0, x2 - x1);
    let scale = x2.abs().max(1.0);
    if d2.abs() <= 1e-9 * scale {
        return Limit::Finite(x2);
    }
    if d2.abs() < 0.9 * d1.abs() && x2.abs() < 1e12 {
        return Limit::Finite(aitken(x0, x1, x2));
    }
    Limit::Divergent
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub theta0: f64,
    /// QianTheta(θ₀) in β-form at `t₀`.
    pub qian_psi: f64,
    /// ImprovedLYD(β₀) at `t₀`.
    pub improved_psi: f64,
    pub diff: f64,
}

/// Evaluates the θ-family at `θ₀ = (1-β₀)/(kβ₀t₀)` against ImprovedLYD(β₀) at `t₀`.
pub fn improved_equals_qian_at_theta0(
    ctx: &EstimateContext,
    beta0: f64,
    t0: f64,
) -> Result<IdentityCheck> {
    if !(ctx.k > 0.0) {
        return Err(Error::KZeroUnsupported("theta0 comparison"));
    }
    if !(beta0 > 0.0 && beta0 < 1.0) || !(t0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need beta0 in (0,1) and t0 > 0, got {beta0}, {t0}"
        )));
    }
    let theta0 = (1.0 - beta0) / (ctx.k * beta0 * t0);
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta0 = {theta0} must lie in (0,1)"
        )));
    }
    let ctx = EstimateContext {
        horizon: ctx.horizon.max(t0),
        ..*ctx
    };
    let qian = make_family(ctx, Family::QianTheta, &[theta0])?.formula(t0)?;
    let improved = make_family(ctx, Family::ImprovedLyd, &[beta0])?.formula(t0)?;
    Ok(IdentityCheck {
        theta0,
        qian_psi: qian.psi,
        improved_psi: improved.psi,
        diff: (qian.psi - improved.psi).abs(),
    })
}

/// Time beyond which ImprovedLYD(β) has smaller `ψ` than LYD(β).
pub fn improved_lyd_threshold(beta: f64, k: f64) -> f64 {
    (1.0 - beta) / (k * beta) + beta * (1.0 - beta) / (8.0 * k)
}

/// Largest `ψ_ImprovedLYD - ψ_Case2` over `points` times log-spaced from the
/// case-2 threshold to ten times it; non-positive means domination holds.
pub fn case2_domination_gap(
    ctx: &EstimateContext,
    beta: f64,
    gamma: f64,
    points: usize,
) -> Result<f64> {
    let case2 = make_family(*ctx, Family::Cor18Case2, &[beta, gamma])?;
    let improved = make_family(*ctx, Family::ImprovedLyd, &[beta])?;
    // the domain is open at the threshold
    let start = case2.t_min() * (1.0 + 1e-12);
    let mut worst = f64::NEG_INFINITY;
    for t in log_grid(start, 10.0 * start, points) {
        worst = worst.max(improved.formula(t)?.psi - case2.formula(t)?.psi);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bound(n: u32, k: f64, horizon: f64, family: Family, params: &[f64]) -> GradientBound {
        make_family(EstimateContext::new(n, k, horizon).unwrap(), family, params).unwrap()
    }

    #[test]
    fn lyd_holds_on_h3() {
        let b = bound(3, 2.0, 5.0, Family::Lyd, &[0.5]);
        let rep = verify_bound(&b, &LogHeatData::hyperbolic3_kernel(), None, None).unwrap();
        assert!(rep.passed && rep.max_g <= 0.0, "max_g {}", rep.max_g);
        assert_eq!(rep.margin_curve.len(), 60);
        assert_eq!(rep.grid.r.len(), 41);
        assert!(rep.g_csv().starts_with("r,t,G\n0,0.05,"));
    }

    #[test]
    fn hypothesis_mismatch_is_an_error() {
        let b = bound(3, 1.0, 5.0, Family::Lyd, &[0.5]);
        assert!(matches!(
            verify_bound(&b, &LogHeatData::hyperbolic3_kernel(), None, None),
            Err(Error::HypothesisMismatch(_))
        ));
    }

    #[test]
    fn a_too_small_psi_is_caught() {
        // psi = n/(2t) with beta = 1 and k = 0 is the equality case; the
        // H^3 kernel violates it
        let b = bound(3, 2.0, 5.0, Family::Lyd, &[0.999999]);
        let rep = verify_bound(&b, &LogHeatData::hyperbolic3_kernel(), None, None).unwrap();
        assert!(rep.passed);
        let tight = bound(3, 0.0, 5.0, Family::Lyd, &[0.9]);
        let eu = LogHeatData::euclidean_gaussian(3).unwrap();
        assert!(verify_bound(&tight, &eu, None, None).unwrap().passed);
        let d = LogHeatData::hyperbolic3_kernel();
        let zero_k = bound(3, 2.0, 5.0, Family::LixuLinear, &[]);
        assert!(verify_bound(&zero_k, &d, None, None).unwrap().passed);
    }

    #[test]
    fn sharpness() {
        let lyd = bound(2, 1.0, 1.0, Family::Lyd, &[0.5]);
        assert!((sharpness_limit(&lyd).unwrap().limit - 0.5).abs() < 1e-6);
        let lx = bound(2, 1.0, 1.0, Family::LixuLinear, &[]);
        let s = sharpness_limit(&lx).unwrap();
        assert!((s.limit - 1.0).abs() < 1e-6 && s.is_stable());
        let q = bound(2, 1.0, 1.0, Family::QianTheta, &[0.5]);
        assert!((sharpness_limit(&q).unwrap().limit - 8.0 / 9.0).abs() < 1e-6);
    }

    #[test]
    fn crossover_lyd_improved() {
        let a = bound(3, 1.0, 5.0, Family::Lyd, &[0.5]);
        let b = bound(3, 1.0, 5.0, Family::ImprovedLyd, &[0.5]);
        let t = find_crossover(&a, &b, (1.001, 3.0)).unwrap();
        assert!((t - 1.03125).abs() < 1e-8);
        assert_eq!(improved_lyd_threshold(0.5, 1.0), 1.03125);
        assert!(matches!(
            find_crossover(&a, &a, (1.001, 3.0)),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn comparison_table() {
        let a = bound(3, 1.0, 5.0, Family::Lyd, &[0.5]);
        let b = bound(3, 1.0, 5.0, Family::ImprovedLyd, &[0.5]);
        let ts = log_grid(0.5, 5.0, 30);
        let tab = compare_bounds(&[a.clone(), b.clone()], &ts).unwrap();
        for (j, &t) in ts.iter().enumerate() {
            if t <= 1.0 {
                assert_eq!(tab.psi[j][1], None);
                assert_eq!(tab.dominant[j], Some(0));
            } else if t > 1.03125 {
                assert_eq!(tab.dominant[j], Some(1));
            }
        }
        let rev = compare_bounds(&[b, a], &ts).unwrap();
        for j in 0..ts.len() {
            assert_eq!(
                tab.dominant[j].map(|i| &tab.ids[i]),
                rev.dominant[j].map(|i| &rev.ids[i])
            );
        }
        let csv = tab.to_csv();
        assert!(csv.starts_with("t,lyd(0.5),improved-lyd(0.5),dominant\n0.5,"));
    }

    #[test]
    fn lyd_beats_linear_in_alpha_form_at_large_t() {
        let a = bound(2, 1.0, 1000.0, Family::Lyd, &[0.5]);
        let b = bound(2, 1.0, 1000.0, Family::LixuLinear, &[]);
        let tab = compare_bounds(&[a, b], &[100.0, 1000.0]).unwrap();
        assert_eq!(tab.alpha_dominant, vec![Some(0), Some(0)]);
    }

    #[test]
    fn asymptotics() {
        let h = asymptotic_limits(&bound(2, 1.0, 1.0, Family::LixuHyperbolic, &[]));
        assert!((h.alpha.value().unwrap() - 2.0).abs() < 1e-6);
        assert!((h.phi.value().unwrap() - 2.0).abs() < 1e-6);
        let l = asymptotic_limits(&bound(2, 1.0, 1.0, Family::LixuLinear, &[]));
        assert_eq!(l.alpha, Limit::Divergent);
        let lyd = asymptotic_limits(&bound(3, 1.0, 1.0, Family::Lyd, &[0.5]));
        assert!((lyd.alpha.value().unwrap() - 2.0).abs() < 1e-12);
        assert!((lyd.phi.value().unwrap() - 3.0 * 4.0 / 4.0).abs() < 1e-6);
    }

    #[test]
    fn theta0_identity() {
        let ctx = EstimateContext::new(3, 1.0, 5.0).unwrap();
        let c = improved_equals_qian_at_theta0(&ctx, 0.5, 2.0).unwrap();
        assert_eq!(c.theta0, 0.5);
        assert!((c.improved_psi - 1.546875).abs() < 1e-12 && c.diff <= 1e-12);
        let ctx2 = EstimateContext::new(3, 2.0, 5.0).unwrap();
        assert!(improved_equals_qian_at_theta0(&ctx2, 1.0 / 3.0, 1.0).is_err());
    }

    #[test]
    fn thread_cap_is_validated() {
        // only checks parsing; the variable is process-global
        assert!(with_thread_cap(|| 1).is_ok());
    }
}
