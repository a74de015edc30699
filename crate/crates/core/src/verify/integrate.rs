//! Fixed-step RK4 and adaptive Runge–Kutta–Fehlberg 4(5) for autonomous flows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    Rk4 { dt: f64 },
    Rkf45 { tol: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Rk4 { dt: 1e-3 }
    }
}

/// States at every accepted step.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub steps: usize,
    pub rejected: usize,
    /// Local error estimate of each accepted step (adaptive method only).
    pub error_estimates: Vec<f64>,
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for &(w, k) in terms {
        if w == 0.0 {
            continue;
        }
        for (o, &ki) in out.iter_mut().zip(k) {
            *o += h * w * ki;
        }
    }
    out
}

fn halted(t: f64, e: Error) -> Error {
    match e {
        Error::Halted { .. } => e,
        other => Error::Halted {
            t,
            reason: other.to_string(),
        },
    }
}

/// One classical RK4 step.
pub fn rk4_step<F>(flow: &F, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let k1 = flow(y)?;
    let k2 = flow(&axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = flow(&axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = flow(&axpy(y, h, &[(1.0, &k3)]))?;
    let out = axpy(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    );
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "RK4 step".into(),
        });
    }
    Ok(out)
}

/// Fehlberg step: returns the fifth-order solution and the embedded error.
fn rkf45_step<F>(flow: &F, y: &[f64], h: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let k1 = flow(y)?;
    let k2 = flow(&axpy(y, h, &[(0.25, &k1)]))?;
    let k3 = flow(&axpy(y, h, &[(3.0 / 32.0, &k1), (9.0 / 32.0, &k2)]))?;
    let k4 = flow(&axpy(
        y,
        h,
        &[(1932.0 / 2197.0, &k1), (-7200.0 / 2197.0, &k2), (7296.0 / 2197.0, &k3)],
    ))?;
    let k5 = flow(&axpy(
        y,
        h,
        &[
            (439.0 / 216.0, &k1),
            (-8.0, &k2),
            (3680.0 / 513.0, &k3),
            (-845.0 / 4104.0, &k4),
        ],
    ))?;
    let k6 = flow(&axpy(
        y,
        h,
        &[
            (-8.0 / 27.0, &k1),
            (2.0, &k2),
            (-3544.0 / 2565.0, &k3),
            (1859.0 / 4104.0, &k4),
            (-11.0 / 40.0, &k5),
        ],
    ))?;
    let y5 = axpy(
        y,
        h,
        &[
            (16.0 / 135.0, &k1),
            (6656.0 / 12825.0, &k3),
            (28561.0 / 56430.0, &k4),
            (-9.0 / 50.0, &k5),
            (2.0 / 55.0, &k6),
        ],
    );
    let y4 = axpy(
        y,
        h,
        &[
            (25.0 / 216.0, &k1),
            (1408.0 / 2565.0, &k3),
            (2197.0 / 4104.0, &k4),
            (-0.2, &k5),
        ],
    );
    let err = y5
        .iter()
        .zip(&y4)
        .zip(y)
        .map(|((a, b), y0)| (a - b).abs() / (1.0 + y0.abs().max(a.abs())))
        .fold(0.0, f64::max);
    Ok((y5, err))
}

/// Integrates `ẏ = flow(y)` from `y0` over `[0, t_final]`.
pub fn integrate<F>(flow: F, y0: &[f64], t_final: f64, method: Method) -> Result<Trajectory>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidParams(format!("t_final = {t_final}")));
    }
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y0.to_vec()],
        ..Default::default()
    };
    match method {
        Method::Rk4 { dt } => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidParams(format!("dt = {dt}")));
            }
            let steps = ((t_final / dt) - 1e-9).ceil().max(0.0) as usize;
            if steps == 0 {
                return Ok(traj);
            }
            let h = t_final / steps as f64;
            let mut y = y0.to_vec();
            for i in 0..steps {
                let t = i as f64 * h;
                y = rk4_step(&flow, &y, h).map_err(|e| halted(t, e))?;
                traj.times.push((i + 1) as f64 * h);
                traj.states.push(y.clone());
                traj.steps += 1;
            }
        }
        Method::Rkf45 { tol } => {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::InvalidParams(format!("tol = {tol}")));
            }
            let mut t = 0.0;
            let mut y = y0.to_vec();
            let mut h = (t_final * 1e-3).max(1e-6).min(t_final);
            while t < t_final {
                if t + h > t_final {
                    h = t_final - t;
                }
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Halted {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
                let (y_new, err) = rkf45_step(&flow, &y, h).map_err(|e| halted(t, e))?;
                let finite = y_new.iter().all(|v| v.is_finite()) && err.is_finite();
                if finite && err <= tol {
                    t += h;
                    y = y_new;
                    traj.times.push(t);
                    traj.states.push(y.clone());
                    traj.error_estimates.push(err);
                    traj.steps += 1;
                } else {
                    traj.rejected += 1;
                }
                let factor = if !finite {
                    0.2
                } else if err == 0.0 {
                    5.0
                } else {
                    (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            }
        }
    }
    Ok(traj)
}
