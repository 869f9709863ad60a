//! Dormand-Prince 5(4) integrator for scalar initial value problems.

use crate::error::{Error, Result};

/// Accepted steps of an integration, with the fourth-order continuous
/// extension of the method as dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    // per step: y_old, y_new - y_old, and three interpolation coefficients
    cont: Vec<[f64; 5]>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, f64) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    /// Interpolated value; `None` outside the integrated interval.
    pub fn value(&self, t: f64) -> Option<f64> {
        let (t0, t1) = (self.t[0], *self.t.last().unwrap());
        if !(t >= t0 && t <= t1) {
            return None;
        }
        let i = match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            p if p >= self.t.len() => self.t.len() - 2,
            p => p - 1,
        };
        if self.t.len() == 1 {
            return Some(self.y[0]);
        }
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let s1 = 1.0 - s;
        let r = &self.cont[i];
        Some(r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4]))))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// continuous extension weights
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates `y' = f(t, y)` from `(t0, y0)` to `t1 > t0`.
pub fn dopri5(
    f: impl Fn(f64, f64) -> Result<f64>,
    t0: f64,
    y0: f64,
    t1: f64,
    tol: Tolerance,
) -> Result<Trajectory> {
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!(
            "need t1 > t0, got [{t0}, {t1}]"
        )));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y)?;
    let mut traj = Trajectory {
        t: vec![t],
        y: vec![y],
        dy: vec![k1],
        cont: Vec::new(),
    };
    let scale = tol.atol + tol.rtol * y.abs();
    let mut h = (0.01 * (t1 - t0)).min(if k1 != 0.0 {
        0.1 * scale.powf(0.2) * y.abs().max(scale) / k1.abs()
    } else {
        f64::INFINITY
    });
    h = h.max(1e-10 * (t1 - t0));
    let mut k = [0.0; 7];
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        if h < 1e-14 * t.abs().max(1e-300) {
            return Err(Error::StepUnderflow { t });
        }
        k[0] = k1;
        for s in 1..7 {
            let ys = y + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s] = f(t + C[s] * h, ys)?;
        }
        let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err_abs = h * (0..7).map(|j| E[j] * k[j]).sum::<f64>();
        let err = err_abs.abs() / (tol.atol + tol.rtol * y.abs().max(y_new.abs()));
        if err <= 1.0 {
            let diff = y_new - y;
            let bspl = h * k[0] - diff;
            // k[6] is f at the new point (first-same-as-last)
            traj.cont.push([
                y,
                diff,
                bspl,
                diff - h * k[6] - bspl,
                h * (0..7).map(|j| D[j] * k[j]).sum::<f64>(),
            ]);
            t = if (t1 - (t + h)).abs() <= 1e-15 * t1.abs() {
                t1
            } else {
                t + h
            };
            y = y_new;
            k1 = k[6];
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k1);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let tol = Tolerance {
            rtol: 1e-10,
            atol: 1e-12,
        };
        let tr = dopri5(|_, y| Ok(-2.0 * y), 0.0, 1.0, 3.0, tol).unwrap();
        let (t, y) = tr.last();
        assert_eq!(t, 3.0);
        assert!((y - (-6.0f64).exp()).abs() < 1e-11);
        let mid = tr.value(1.2345).unwrap();
        assert!((mid - (-2.469f64).exp()).abs() < 1e-9);
        assert!(tr.value(3.5).is_none());
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = -y/t + 1, y(1) = 1 => y = t/2 + 1/(2t)
        let tol = Tolerance {
            rtol: 1e-10,
            atol: 1e-12,
        };
        let tr = dopri5(|t, y| Ok(-y / t + 1.0), 1.0, 1.0, 4.0, tol).unwrap();
        assert!((tr.last().1 - (2.0 + 0.125)).abs() < 1e-9);
    }
}
