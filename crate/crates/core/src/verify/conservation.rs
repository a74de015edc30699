use serde::Serialize;

use crate::error::{Error, Result};

use super::integrate::Trajectory;

/// Floor of the drift denominator.
pub const DRIFT_EPS: f64 = 1e-12;

/// A named real function of the integrated state.
pub struct Observable<'a> {
    pub name: String,
    pub eval: Box<dyn Fn(&[f64]) -> Result<f64> + 'a>,
}

impl<'a> Observable<'a> {
    pub fn new(name: impl Into<String>, eval: impl Fn(&[f64]) -> Result<f64> + 'a) -> Self {
        Self {
            name: name.into(),
            eval: Box::new(eval),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
    pub drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryReport {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<Vec<f64>>,
    pub series: Vec<Series>,
    pub steps: usize,
    pub rejected: usize,
}

impl TrajectoryReport {
    pub fn drift(&self, name: &str) -> Option<f64> {
        self.series.iter().find(|s| s.name == name).map(|s| s.drift)
    }
}

/// `max_t |O(t) − O(0)| / max(|O(0)|, ε)`.
pub fn drift(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    let scale = first.abs().max(DRIFT_EPS);
    values.iter().map(|v| (v - first).abs()).fold(0.0, f64::max) / scale
}

/// Evaluates each observable along `traj` and reports its drift.
pub fn conservation_report(traj: &Trajectory, observables: &[Observable<'_>]) -> Result<TrajectoryReport> {
    let mut series = Vec::with_capacity(observables.len());
    for obs in observables {
        let mut values = Vec::with_capacity(traj.states.len());
        for (t, y) in traj.times.iter().zip(&traj.states) {
            let v = (obs.eval)(y).map_err(|e| Error::Halted {
                t: *t,
                reason: format!("observable {}: {e}", obs.name),
            })?;
            values.push(v);
        }
        series.push(Series {
            name: obs.name.clone(),
            drift: drift(&values),
            values,
        });
    }
    Ok(TrajectoryReport {
        times: traj.times.clone(),
        states: traj.states.clone(),
        series,
        steps: traj.steps,
        rejected: traj.rejected,
    })
}
