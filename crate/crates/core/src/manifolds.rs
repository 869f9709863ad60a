//! Log-heat-kernel data on model spaces: exact kernels on `R^n` and `H^3`,
//! and a Crank-Nicolson radial solver on `H^n` (curvature -1).
//!
//! All quantities refer to `f = ln u` for a positive radial solution `u(r, t)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::num;
use crate::special::{coth, inv_minus_coth, inv_sinh2_minus_inv_r2, ln_r_over_sinh, r_coth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Exact,
    Numeric,
}

/// `f`, `‖∇f‖²`, `f_t` and the radial Laplacian `Δf` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogHeatSample {
    pub f: f64,
    pub grad_sq: f64,
    pub f_t: f64,
    pub laplacian: f64,
}

impl LogHeatSample {
    /// `Δf + ‖∇f‖² - f_t`.
    pub fn heat_residual(&self) -> f64 {
        self.laplacian + self.grad_sq - self.f_t
    }
}

#[derive(Clone)]
enum Model {
    Euclidean,
    Hyperbolic3,
    Radial(Arc<RadialSolution>),
}

/// Radial log-heat data with its validity window `r in [0, r_max]`,
/// `t in [t_range.0, t_range.1]`.
#[derive(Clone)]
pub struct LogHeatData {
    pub n: u32,
    /// Valid Ricci constant: `Ric >= -k g`.
    pub k: f64,
    pub kind: DataKind,
    pub r_max: f64,
    pub t_range: (f64, f64),
    model: Model,
}

impl fmt::Debug for LogHeatData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogHeatData")
            .field("id", &self.id())
            .field("k", &self.k)
            .field("r_max", &self.r_max)
            .field("t_range", &self.t_range)
            .finish()
    }
}

impl LogHeatData {
    /// The Euclidean heat kernel on `R^n`, `k = 0`.
    pub fn euclidean_gaussian(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(LogHeatData {
            n,
            k: 0.0,
            kind: DataKind::Exact,
            r_max: 16.0,
            t_range: (0.01, 5.0),
            model: Model::Euclidean,
        })
    }

    /// The heat kernel of `H^3` with curvature -1, so `k = 2`.
    pub fn hyperbolic3_kernel() -> Self {
        LogHeatData {
            n: 3,
            k: 2.0,
            kind: DataKind::Exact,
            r_max: 16.0,
            t_range: (0.05, 5.0),
            model: Model::Hyperbolic3,
        }
    }

    pub fn from_solution(sol: RadialSolution) -> Self {
        LogHeatData {
            n: sol.n,
            k: (sol.n - 1) as f64,
            kind: DataKind::Numeric,
            r_max: sol.r_max(),
            t_range: sol.window,
            model: Model::Radial(Arc::new(sol)),
        }
    }

    /// Shrinks or moves the window of exact data.
    pub fn with_window(mut self, r_max: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(r_max > 0.0 && t_lo > 0.0 && t_hi > t_lo) {
            return Err(Error::InvalidParameter(format!(
                "bad window r <= {r_max}, t in [{t_lo}, {t_hi}]"
            )));
        }
        if let Model::Radial(sol) = &self.model {
            if r_max > sol.r_max() || t_lo < sol.window.0 || t_hi > sol.window.1 {
                return Err(Error::InvalidParameter(
                    "numeric data window can only shrink".into(),
                ));
            }
        }
        self.r_max = r_max;
        self.t_range = (t_lo, t_hi);
        Ok(self)
    }

    pub fn id(&self) -> String {
        match &self.model {
            Model::Euclidean => format!("euclidean({})", self.n),
            Model::Hyperbolic3 => "h3".to_string(),
            Model::Radial(s) => format!(
                "radial(n={}, N={}, r_max={})",
                s.n,
                s.r.len(),
                num(s.r_max())
            ),
        }
    }

    pub fn solution(&self) -> Option<&RadialSolution> {
        match &self.model {
            Model::Radial(s) => Some(s),
            _ => None,
        }
    }

    pub fn contains(&self, r: f64, t: f64) -> bool {
        let eps = 1e-12 * self.t_range.1;
        (0.0..=self.r_max).contains(&r) && t >= self.t_range.0 - eps && t <= self.t_range.1 + eps
    }

    pub fn sample(&self, r: f64, t: f64) -> Result<LogHeatSample> {
        if !self.contains(r, t) {
            return Err(Error::OutsideWindow { r, t });
        }
        match &self.model {
            Model::Euclidean => {
                let n = self.n as f64;
                let f = -0.5 * n * (4.0 * std::f64::consts::PI * t).ln() - r * r / (4.0 * t);
                let fr = -r / (2.0 * t);
                // f_rr + (n-1) f_r / r with f_r / r = -1/(2t)
                let laplacian = -1.0 / (2.0 * t) - (n - 1.0) / (2.0 * t);
                Ok(LogHeatSample {
                    f,
                    grad_sq: fr * fr,
                    f_t: -n / (2.0 * t) + r * r / (4.0 * t * t),
                    laplacian,
                })
            }
            Model::Hyperbolic3 => {
                let f = -1.5 * (4.0 * std::f64::consts::PI * t).ln() + ln_r_over_sinh(r)
                    - t
                    - r * r / (4.0 * t);
                let fr = inv_minus_coth(r) - r / (2.0 * t);
                let frr = inv_sinh2_minus_inv_r2(r) - 1.0 / (2.0 * t);
                // coth(r) f_r = r coth(r) (f_r / r), finite at the pole
                let fr_over_r = if r < 1e-3 {
                    let r2 = r * r;
                    -(1.0 / 3.0 - r2 * (1.0 / 45.0 - r2 * 2.0 / 945.0)) - 1.0 / (2.0 * t)
                } else {
                    fr / r
                };
                let laplacian = frr + 2.0 * r_coth(r) * fr_over_r;
                Ok(LogHeatSample {
                    f,
                    grad_sq: fr * fr,
                    f_t: -1.5 / t - 1.0 + r * r / (4.0 * t * t),
                    laplacian,
                })
            }
            Model::Radial(sol) => sol.sample(r, t),
        }
    }

    pub fn grad_sq(&self, r: f64, t: f64) -> Result<f64> {
        self.sample(r, t).map(|s| s.grad_sq)
    }

    pub fn f_t(&self, r: f64, t: f64) -> Result<f64> {
        self.sample(r, t).map(|s| s.f_t)
    }

    pub fn u(&self, r: f64, t: f64) -> Result<f64> {
        self.sample(r, t).map(|s| s.f.exp())
    }

    /// `Δf + ‖∇f‖² - f_t` at each point.
    pub fn heat_residual(&self, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        points
            .iter()
            .map(|&(r, t)| self.sample(r, t).map(|s| s.heat_residual()))
            .collect()
    }
}

/// Grid and time-step policy of the radial solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSolverConfig {
    pub n: u32,
    pub r_max: f64,
    /// Number of nodes on `[0, r_max]`, both ends included.
    pub n_r: usize,
    pub dt0: f64,
    pub growth: f64,
    /// Largest step; `None` picks `0.99 dr^2 / n`, where the explicit half of
    /// the scheme is monotone and positivity cannot be lost.
    #[serde(default)]
    pub dt_max: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    /// Number of stored output times.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
}

fn default_checkpoints() -> usize {
    100
}

impl Default for RadialSolverConfig {
    fn default() -> Self {
        RadialSolverConfig {
            n: 3,
            r_max: 12.0,
            n_r: 1200,
            dt0: 1e-6,
            growth: 1.05,
            dt_max: None,
            t_start: 0.01,
            t_end: 2.0,
            checkpoints: default_checkpoints(),
        }
    }
}

impl RadialSolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n < 2 {
            return bad(format!("dimension n = {} < 2", self.n));
        }
        if !(self.r_max > 0.0) || self.n_r < 200 {
            return bad(format!(
                "need r_max > 0 and N_r >= 200, got {} and {}",
                self.r_max, self.n_r
            ));
        }
        if !(self.t_start > 0.0 && self.t_end > self.t_start) {
            return bad(format!(
                "need 0 < t_start < t_end, got {} and {}",
                self.t_start, self.t_end
            ));
        }
        if !(self.dt0 > 0.0) || !(self.growth >= 1.0) || self.dt_max.is_some_and(|d| !(d > 0.0)) {
            return bad("need dt0 > 0, growth >= 1, dt_max > 0".into());
        }
        if self.checkpoints < 4 {
            return bad("need at least 4 checkpoints".into());
        }
        Ok(())
    }

    pub fn dr(&self) -> f64 {
        self.r_max / (self.n_r - 1) as f64
    }

    /// Same run with half the space step and a quarter of the time steps.
    pub fn refined(&self) -> Self {
        RadialSolverConfig {
            n_r: 2 * (self.n_r - 1) + 1,
            dt0: self.dt0 / 4.0,
            growth: self.growth.sqrt(),
            dt_max: self.dt_max.map(|d| d / 4.0),
            ..*self
        }
    }

    /// Output times: log-spaced on `[min(10 t_start, sqrt(t_start t_end)), t_end]`.
    pub fn checkpoint_times(&self) -> Vec<f64> {
        let lo = (10.0 * self.t_start).min((self.t_start * self.t_end).sqrt());
        crate::timefn::log_grid(lo, self.t_end, self.checkpoints)
    }
}

/// Initial profile: exact `H^3` kernel for `n = 3`, parametrix otherwise.
fn parametrix(n: u32, r: f64, t: f64) -> f64 {
    let n = n as f64;
    let m = n - 1.0;
    (-0.5 * n * (4.0 * std::f64::consts::PI * t).ln() + 0.5 * m * ln_r_over_sinh(r)
        - m * m * t / 4.0
        - r * r / (4.0 * t))
        .exp()
}

/// Stored solution: for every checkpoint `t_j` the profiles at `t_j - h_j`,
/// `t_j`, `t_j + h_j` so that `f_t` is a centered ratio across stored steps.
#[derive(Clone)]
pub struct RadialSolution {
    pub n: u32,
    pub r: Vec<f64>,
    /// `(t, u(., t))`, in triples around each checkpoint.
    pub rows: Vec<(f64, Vec<f64>)>,
    pub window: (f64, f64),
    derived: Vec<Derived>,
    centers: Vec<f64>,
}

// Nodal f-quantities at one checkpoint; NaN where u is not positive.
#[derive(Clone)]
struct Derived {
    f: Vec<f64>,
    fr: Vec<f64>,
    lap: Vec<f64>,
    ft: Vec<f64>,
}

impl fmt::Debug for RadialSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RadialSolution(n={}, nodes={}, rows={}, window={:?})",
            self.n,
            self.r.len(),
            self.rows.len(),
            self.window
        )
    }
}

// Tridiagonal system solved by the Thomas algorithm with a cached factorization.
struct Factored {
    dt: f64,
    lower: Vec<f64>,
    inv_diag: Vec<f64>,
    upper: Vec<f64>,
}

struct Operator {
    // L u_i = lo_i u_{i-1} + di_i u_i + up_i u_{i+1}, for the unknowns 0..m
    lo: Vec<f64>,
    di: Vec<f64>,
    up: Vec<f64>,
}

impl Operator {
    /// Finite-volume Laplacian on `H^n` with cells `[r_i - dr/2, r_i + dr/2]`.
    fn new(n: u32, r: &[f64], dr: f64) -> Self {
        let m = r.len() - 1; // last node is the Dirichlet boundary
        let p = (n - 1) as i32;
        let area = |s: f64| s.sinh().powi(p);
        let volume = |a: f64, b: f64| {
            // 5-point Gauss-Legendre on the cell
            const X: [f64; 5] = [
                -0.906_179_845_938_664,
                -0.538_469_310_105_683,
                0.0,
                0.538_469_310_105_683,
                0.906_179_845_938_664,
            ];
            const W: [f64; 5] = [
                0.236_926_885_056_189,
                0.478_628_670_499_366,
                0.568_888_888_888_889,
                0.478_628_670_499_366,
                0.236_926_885_056_189,
            ];
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            h * X
                .iter()
                .zip(W)
                .map(|(x, w)| w * area(c + h * x))
                .sum::<f64>()
        };
        let (mut lo, mut di, mut up) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for i in 0..m {
            let a_out = area(r[i] + 0.5 * dr);
            let a_in = if i == 0 { 0.0 } else { area(r[i] - 0.5 * dr) };
            let v = volume((r[i] - 0.5 * dr).max(0.0), r[i] + 0.5 * dr) * dr;
            lo[i] = a_in / v;
            up[i] = a_out / v;
            di[i] = -(a_in + a_out) / v;
        }
        Operator { lo, di, up }
    }

    fn factor(&self, dt: f64) -> Factored {
        let m = self.di.len();
        let h = 0.5 * dt;
        let mut lower = vec![0.0; m];
        let mut inv_diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut prev_c = 0.0;
        for i in 0..m {
            let a = -h * self.lo[i];
            let b = 1.0 - h * self.di[i];
            let c = -h * self.up[i];
            let d = b - a * prev_c;
            lower[i] = a;
            inv_diag[i] = 1.0 / d;
            upper[i] = c * inv_diag[i];
            prev_c = upper[i];
        }
        Factored {
            dt,
            lower,
            inv_diag,
            upper,
        }
    }

    /// One Crank-Nicolson step of size `fac.dt`; `u` has the boundary node last.
    fn step(&self, fac: &Factored, u: &[f64], out: &mut [f64]) -> Result<()> {
        let m = self.di.len();
        let h = 0.5 * fac.dt;
        let mut prev = 0.0;
        for i in 0..m {
            let left = if i == 0 { 0.0 } else { u[i - 1] };
            let rhs = u[i] + h * (self.lo[i] * left + self.di[i] * u[i] + self.up[i] * u[i + 1]);
            let y = (rhs - fac.lower[i] * prev) * fac.inv_diag[i];
            if !y.is_finite() {
                return Err(Error::Solver(format!(
                    "tridiagonal solve produced {y} at node {i}"
                )));
            }
            out[i] = y;
            prev = y;
        }
        for i in (0..m.saturating_sub(1)).rev() {
            out[i] -= fac.upper[i] * out[i + 1];
        }
        out[m] = 0.0;
        Ok(())
    }
}

/// Crank-Nicolson march of `u_t = u_rr + (n-1) coth(r) u_r` on `[0, r_max]`,
/// symmetric at the pole and absorbing at `r_max`.
pub fn radial_heat_solve(cfg: &RadialSolverConfig) -> Result<RadialSolution> {
    cfg.validate()?;
    let dr = cfg.dr();
    let r: Vec<f64> = (0..cfg.n_r).map(|i| i as f64 * dr).collect();
    let op = Operator::new(cfg.n, &r, dr);
    let dt_max = cfg.dt_max.unwrap_or(0.99 * dr * dr / cfg.n as f64);
    let mut u: Vec<f64> = r
        .iter()
        .map(|&ri| parametrix(cfg.n, ri, cfg.t_start))
        .collect();
    *u.last_mut().unwrap() = 0.0;
    let mut next = vec![0.0; u.len()];
    let mut t = cfg.t_start;
    let mut dt = cfg.dt0.min(dt_max);
    let mut fac: Option<Factored> = None;

    // advances to `target` exactly; positivity failures halve the step
    let mut advance =
        |u: &mut Vec<f64>, t: &mut f64, target: f64, dt: &mut f64, cap: f64| -> Result<()> {
            while *t < target {
                let mut h = dt.min(cap).min(target - *t);
                if target - (*t + h) < 1e-12 * target {
                    h = target - *t;
                }
                loop {
                    if fac.as_ref().is_none_or(|f| f.dt != h) {
                        fac = Some(op.factor(h));
                    }
                    op.step(fac.as_ref().unwrap(), u, &mut next)?;
                    if next[..next.len() - 1].iter().all(|&v| v >= 0.0) {
                        break;
                    }
                    h *= 0.5;
                    *dt = h;
                    if h < 1e-14 * target {
                        return Err(Error::Solver(format!(
                            "positivity lost at t = {t}; step underflow"
                        )));
                    }
                }
                std::mem::swap(u, &mut next);
                *t = if (target - (*t + h)).abs() <= 1e-12 * target {
                    target
                } else {
                    *t + h
                };
                if h == dt.min(cap) {
                    *dt = (*dt * cfg.growth).min(dt_max);
                }
            }
            Ok(())
        };

    let centers = cfg.checkpoint_times();
    let mut rows = Vec::with_capacity(3 * centers.len());
    let mut prev = t;
    for &c in &centers {
        let h = dt_max.min(0.1 * (c - prev));
        advance(&mut u, &mut t, c - h, &mut dt, dt_max)?;
        rows.push((c - h, u.clone()));
        advance(&mut u, &mut t, c, &mut dt, h)?;
        rows.push((c, u.clone()));
        advance(&mut u, &mut t, c + h, &mut dt, h)?;
        rows.push((c + h, u.clone()));
        prev = c + h;
    }
    RadialSolution::from_rows(cfg.n, r, rows)
}

impl RadialSolution {
    fn from_rows(n: u32, r: Vec<f64>, rows: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        if rows.len() < 12 || rows.len() % 3 != 0 {
            return Err(Error::Table(format!(
                "expected at least 4 checkpoint triples, got {} rows",
                rows.len()
            )));
        }
        if r.len() < 8 || rows.iter().any(|(_, u)| u.len() != r.len()) {
            return Err(Error::Table("row length does not match the r grid".into()));
        }
        let dr = r[1] - r[0];
        if r[0] != 0.0 || r.windows(2).any(|w| ((w[1] - w[0]) - dr).abs() > 1e-9 * dr) {
            return Err(Error::Table("r grid must be uniform and start at 0".into()));
        }
        let mut derived = Vec::with_capacity(rows.len() / 3);
        let mut centers = Vec::with_capacity(rows.len() / 3);
        for tri in rows.chunks(3) {
            let (tm, um) = (&tri[0].0, &tri[0].1);
            let (tc, uc) = (&tri[1].0, &tri[1].1);
            let (tp, up) = (&tri[2].0, &tri[2].1);
            let h = tc - tm;
            if !(h > 0.0) || ((tp - tc) - h).abs() > 1e-6 * h {
                return Err(Error::Table(format!(
                    "rows around t = {tc} are not a symmetric triple"
                )));
            }
            centers.push(*tc);
            derived.push(Derived::new(n, &r, dr, um, uc, up, h));
        }
        if centers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Table("checkpoint times must increase".into()));
        }
        let window = (
            resolved_from(n, r[r.len() - 1], dr).clamp(centers[0], centers[centers.len() - 4]),
            centers[centers.len() - 1],
        );
        Ok(RadialSolution {
            n,
            r,
            rows,
            window,
            derived,
            centers,
        })
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    pub fn dr(&self) -> f64 {
        self.r[1]
    }

    pub fn checkpoint_times(&self) -> &[f64] {
        &self.centers
    }

    /// `u(r_i, t_j)` at checkpoint `j`.
    pub fn profile(&self, j: usize) -> &[f64] {
        &self.rows[3 * j + 1].1
    }

    fn sample(&self, r: f64, t: f64) -> Result<LogHeatSample> {
        let dr = self.dr();
        // stencils in r and t, each 4 points wide
        let ri = lagrange_stencil_uniform(r, dr, self.r.len());
        let tj = lagrange_stencil(&self.centers, t);
        let mut acc = [0.0; 4];
        for &(j, wt) in &tj {
            let d = &self.derived[j];
            for &(i, wr) in &ri {
                let w = wt * wr;
                acc[0] += w * d.f[i];
                acc[1] += w * d.fr[i];
                acc[2] += w * d.ft[i];
                acc[3] += w * d.lap[i];
            }
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonPositive { t, value: r });
        }
        Ok(LogHeatSample {
            f: acc[0],
            grad_sq: acc[1] * acc[1],
            f_t: acc[2],
            laplacian: acc[3],
        })
    }

    /// Portable CSV: `n,<n>`, `k,<k>`, `r,<r_0>,...`, then `t,u_0,...` per row.
    pub fn to_csv(&self) -> String {
        let mut s = format!("n,{}\nk,{}\n", self.n, self.n - 1);
        s.push_str(&format!("r,{}\n", crate::numfmt::csv_row(&self.r)));
        for (t, u) in &self.rows {
            let mut row = vec![*t];
            row.extend_from_slice(u);
            s.push_str(&crate::numfmt::csv_row(&row));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut header = |name: &str| -> Result<Vec<String>> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Table(format!("missing `{name}` line")))?;
            let mut cells = line.split(',').map(|c| c.trim().to_string());
            if cells.next().as_deref() != Some(name) {
                return Err(Error::Table(format!("expected `{name},...`, got `{line}`")));
            }
            Ok(cells.collect())
        };
        let parse = |c: &str| {
            c.parse::<f64>()
                .map_err(|_| Error::Table(format!("bad number `{c}`")))
        };
        let n: u32 = header("n")?
            .first()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::Table("bad dimension".into()))?;
        let k = parse(header("k")?.first().map(String::as_str).unwrap_or(""))?;
        if n < 2 || k != (n - 1) as f64 {
            return Err(Error::Table(format!(
                "expected k = n - 1 for curvature -1, got n = {n}, k = {k}"
            )));
        }
        let r = header("r")?
            .iter()
            .map(|c| parse(c))
            .collect::<Result<Vec<f64>>>()?;
        let mut rows = Vec::new();
        for line in lines {
            let vals = line
                .split(',')
                .map(|c| parse(c.trim()))
                .collect::<Result<Vec<f64>>>()?;
            let (t, u) = vals
                .split_first()
                .ok_or_else(|| Error::Table("empty row".into()))?;
            rows.push((*t, u.to_vec()));
        }
        RadialSolution::from_rows(n, r, rows)
    }
}

/// Earliest time at which the grid resolves the kernel on `r <= r_max/2`.
///
/// The scheme's relative truncation error in `f_t` is about
/// `dr^2 |f_r|^2 / 24`, and `|f_r| <= r/(2t) + (n-1)/2` for these kernels;
/// the window starts where that bound is `5e-4`.
fn resolved_from(n: u32, r_max: f64, dr: f64) -> f64 {
    let max_slope = (24.0 * 5e-4f64).sqrt() / dr - 0.5 * (n - 1) as f64;
    if max_slope <= 0.0 {
        return f64::INFINITY;
    }
    0.5 * r_max / (2.0 * max_slope)
}

impl Derived {
    fn new(n: u32, r: &[f64], dr: f64, um: &[f64], uc: &[f64], up: &[f64], h: f64) -> Self {
        let len = r.len();
        let lnu = |i: usize| if uc[i] > 0.0 { uc[i].ln() } else { f64::NAN };
        let f: Vec<f64> = (0..len).map(lnu).collect();
        let mut fr = vec![f64::NAN; len];
        let mut lap = vec![f64::NAN; len];
        let nf = n as f64;
        fr[0] = 0.0;
        lap[0] = nf * 2.0 * (f[1] - f[0]) / (dr * dr);
        for i in 1..len - 1 {
            let d1 = (f[i + 1] - f[i - 1]) / (2.0 * dr);
            let d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dr * dr);
            fr[i] = d1;
            lap[i] = d2 + (nf - 1.0) * coth(r[i]) * d1;
        }
        let ft = (0..len)
            .map(|i| {
                if uc[i] > 0.0 {
                    (up[i] - um[i]) / (2.0 * h * uc[i])
                } else {
                    f64::NAN
                }
            })
            .collect();
        Derived { f, fr, lap, ft }
    }
}

/// Indices and weights of the 4-point Lagrange stencil on a sorted grid.
fn lagrange_stencil(xs: &[f64], x: f64) -> [(usize, f64); 4] {
    let pos = xs.partition_point(|&v| v <= x);
    let i0 = pos.saturating_sub(2).min(xs.len() - 4);
    weights(i0, |i| xs[i], x)
}

fn lagrange_stencil_uniform(x: f64, h: f64, len: usize) -> [(usize, f64); 4] {
    let pos = (x / h).floor() as usize;
    let i0 = pos.saturating_sub(1).min(len - 4);
    weights(i0, |i| i as f64 * h, x)
}

fn weights(i0: usize, node: impl Fn(usize) -> f64, x: f64) -> [(usize, f64); 4] {
    let mut out = [(0, 0.0); 4];
    for a in 0..4 {
        let xa = node(i0 + a);
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                let xb = node(i0 + b);
                w *= (x - xb) / (xa - xb);
            }
        }
        out[a] = (i0 + a, w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_identity() {
        let d = LogHeatData::euclidean_gaussian(3).unwrap();
        for &(r, t) in &[(0.0, 0.5), (1.0, 1.0), (3.0, 0.2)] {
            let s = d.sample(r, t).unwrap();
            assert!((s.grad_sq - s.f_t - 1.5 / t).abs() < 1e-12 * (1.0 + s.grad_sq));
        }
        assert!(d.heat_residual(&[(1.0, 1.0)]).unwrap()[0].abs() <= 1e-12);
        assert!(LogHeatData::euclidean_gaussian(0).is_err());
    }

    #[test]
    fn hyperbolic_kernel_satisfies_heat_equation() {
        let d = LogHeatData::hyperbolic3_kernel();
        for i in 0..20 {
            for j in 0..20 {
                let r = 0.1 + 7.9 * i as f64 / 19.0;
                let t = 0.05 * 100f64.powf(j as f64 / 19.0);
                let res = d.heat_residual(&[(r, t)]).unwrap()[0];
                assert!(res.abs() <= 1e-8, "residual {res} at ({r}, {t})");
            }
        }
        assert!(d.heat_residual(&[(2.0, 0.5)]).unwrap()[0].abs() <= 1e-8);
        // across the series switch and at the pole
        for &r in &[0.0, 1e-6, 9.99e-4, 1.001e-3] {
            assert!(d.heat_residual(&[(r, 0.3)]).unwrap()[0].abs() <= 1e-8);
        }
        assert_eq!(d.grad_sq(0.0, 1.0).unwrap(), 0.0);
        let s = d.sample(0.0, 0.05).unwrap();
        assert!((s.grad_sq - s.f_t - (1.5 / 0.05 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn outside_window_is_an_error() {
        let d = LogHeatData::hyperbolic3_kernel();
        assert!(matches!(
            d.sample(20.0, 1.0),
            Err(Error::OutsideWindow { .. })
        ));
        assert!(matches!(
            d.sample(1.0, 0.001),
            Err(Error::OutsideWindow { .. })
        ));
    }

    #[test]
    fn parametrix_is_the_h3_kernel() {
        let d = LogHeatData::hyperbolic3_kernel();
        for &(r, t) in &[(0.0, 0.5), (2.0, 1.0), (5.0, 0.3)] {
            let exact = d.u(r, t).unwrap();
            assert!((parametrix(3, r, t) / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lagrange_weights_reproduce_cubics() {
        let xs = [0.1, 0.3, 0.35, 0.8, 1.2, 2.0];
        for &x in &[0.1, 0.33, 0.9, 1.99] {
            let v: f64 = lagrange_stencil(&xs, x)
                .iter()
                .map(|&(i, w)| w * xs[i].powi(3))
                .sum();
            assert!((v - x.powi(3)).abs() < 1e-12);
        }
    }

    fn small_cfg(n: u32) -> RadialSolverConfig {
        RadialSolverConfig {
            n,
            n_r: 600,
            r_max: 12.0,
            t_end: 1.0,
            checkpoints: 20,
            ..Default::default()
        }
    }

    #[test]
    fn small_run_is_positive_and_consistent() {
        let sol = radial_heat_solve(&small_cfg(2)).unwrap();
        for (_, u) in &sol.rows {
            assert!(u[..u.len() - 1].iter().all(|&v| v > 0.0));
        }
        // maximum principle on the stored checkpoints
        let maxes: Vec<f64> = (0..sol.centers.len())
            .map(|j| sol.profile(j).iter().cloned().fold(0.0, f64::max))
            .collect();
        assert!(maxes.windows(2).all(|w| w[1] <= w[0]));
        let data = LogHeatData::from_solution(sol);
        assert_eq!(data.k, 1.0);
        let (lo, hi) = data.t_range;
        for &t in &[lo, (lo * hi).sqrt(), hi] {
            for &r in &[0.0, 1.0, 3.0] {
                let s = data.sample(r, t).unwrap();
                let scale = s.f_t.abs() + s.grad_sq;
                assert!(
                    s.heat_residual().abs() <= 1e-2 * (1.0 + scale),
                    "{:?} at ({r},{t})",
                    s
                );
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let sol = radial_heat_solve(&small_cfg(3)).unwrap();
        let text = sol.to_csv();
        assert!(text.starts_with("n,3\nk,2\nr,0,"));
        let back = RadialSolution::from_csv(&text).unwrap();
        assert_eq!(back.rows, sol.rows);
        assert_eq!(back.r, sol.r);
        assert_eq!(back.to_csv(), text);
        assert!(RadialSolution::from_csv("n,3\nk,1\nr,0,1\n").is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RadialSolverConfig::default();
        assert!(c.validate().is_ok());
        c.n_r = 100;
        assert!(c.validate().is_err());
        let c = RadialSolverConfig {
            t_start: 2.0,
            t_end: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert_eq!(RadialSolverConfig::default().refined().n_r, 2399);
    }
}
