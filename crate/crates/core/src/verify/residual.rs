use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diffkit::{merge_singular, SingularSet};
use crate::error::{Error, Result};
use crate::extension::GSolution;
use crate::poisson::{apply_xl2_complex, HamiltonianSystem};

use super::integrate::rk4_step;
use super::sampling::{sample_points, SampleSpec};

/// Added to residual denominators so that zeros of `G` do not give `0/0`.
pub const RESIDUAL_EPS: f64 = 1e-12;

/// Step of the flow-based derivative used by [`kn_residual`].
pub const FLOW_STEP: f64 = 1e-6;

/// `|a + b| / (|a| + |b| + ε)`.
pub fn relative_residual(a: Complex64, b: Complex64) -> f64 {
    (a + b).norm() / (a.norm() + b.norm() + RESIDUAL_EPS)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub point: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub evaluated: usize,
    pub max: f64,
    pub mean: f64,
    /// Point of the largest residual.
    pub worst_point: Vec<f64>,
    pub residuals: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub skipped: Vec<SkippedPoint>,
    /// Candidates rejected by the sampler for lying near a singular set.
    pub rejected: usize,
}

impl ResidualReport {
    fn assemble(outcomes: Vec<(Vec<f64>, Result<f64>)>, rejected: usize) -> Result<Self> {
        let mut report = ResidualReport {
            evaluated: 0,
            max: 0.0,
            mean: 0.0,
            worst_point: Vec::new(),
            residuals: Vec::new(),
            points: Vec::new(),
            skipped: Vec::new(),
            rejected,
        };
        for (x, r) in outcomes {
            match r {
                Ok(v) => {
                    if report.worst_point.is_empty() || v > report.max {
                        report.max = v;
                        report.worst_point = x.clone();
                    }
                    report.residuals.push(v);
                    report.points.push(x);
                }
                Err(e) => report.skipped.push(SkippedPoint {
                    point: x,
                    reason: e.to_string(),
                }),
            }
        }
        report.evaluated = report.residuals.len();
        if report.evaluated == 0 {
            return Err(Error::Degenerate(format!(
                "all {} sample points were singular or outside the domain",
                report.skipped.len()
            )));
        }
        report.mean = report.residuals.iter().sum::<f64>() / report.evaluated as f64;
        Ok(report)
    }
}

/// Singular set of `L` merged with that of `G`.
pub fn system_singular(sys: &HamiltonianSystem, extra: Option<SingularSet>) -> Option<SingularSet> {
    merge_singular(sys.hamiltonian.singular_set(), extra)
}

fn sample_for(spec: &SampleSpec, singular: Option<SingularSet>) -> Result<super::sampling::Sampled> {
    match singular {
        Some(p) => {
            let pred = move |x: &[f64], m: f64| p(x, m);
            sample_points(spec, Some(&pred))
        }
        None => sample_points(spec, None),
    }
}

/// Relative residual of `X_L² G + 2(cL + c₀) G` at points drawn from `spec`.
pub fn pde_residual(
    sys: &HamiltonianSystem,
    gsol: &GSolution,
    c: f64,
    c0: f64,
    spec: &SampleSpec,
) -> Result<ResidualReport> {
    if spec.intervals.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: spec.intervals.len(),
        });
    }
    let sampled = sample_for(spec, system_singular(sys, gsol.field.singular_set()))?;
    let outcomes: Vec<_> = sampled
        .points
        .into_par_iter()
        .map(|x| {
            let r = (|| {
                let lhs = apply_xl2_complex(sys, &gsol.field, &x)?;
                let l = sys.hamiltonian.value(&x)?;
                let g = gsol.field.value_complex(&x)?;
                Ok(relative_residual(lhs, g * (2.0 * (c * l + c0))))
            })();
            (x, r)
        })
        .collect();
    ResidualReport::assemble(outcomes, sampled.rejected)
}

/// A solution known only pointwise (possibly on one branch), differentiated
/// along the flow rather than through jets.
pub trait LocalSolution: Sync {
    fn label(&self) -> String;
    /// Fails outside the domain or branch where the solution is defined.
    fn value(&self, x: &[f64]) -> Result<Complex64>;
    fn is_singular(&self, _x: &[f64], _margin: f64) -> bool {
        false
    }
}

impl LocalSolution for GSolution {
    fn label(&self) -> String {
        self.field.label().to_string()
    }

    fn value(&self, x: &[f64]) -> Result<Complex64> {
        self.field.value_complex(x)
    }

    fn is_singular(&self, x: &[f64], margin: f64) -> bool {
        self.field.is_singular(x, margin)
    }
}

/// `X_L G` at `x` as the central difference of `G` along the flow of `L`.
pub fn flow_derivative(sys: &HamiltonianSystem, g: &dyn LocalSolution, x: &[f64], h: f64) -> Result<Complex64> {
    let flow = |y: &[f64]| sys.flow(y);
    let fwd = rk4_step(&flow, x, h)?;
    let bwd = rk4_step(&flow, x, -h)?;
    Ok((g.value(&fwd)? - g.value(&bwd)?) / (2.0 * h))
}

/// Relative residual of `X_L G = sign·√(−2(cL + c₀)) G` (principal root),
/// with `X_L G` from [`flow_derivative`]. Points outside the domain of `G`
/// are skipped and listed.
pub fn kn_residual(
    sys: &HamiltonianSystem,
    g: &dyn LocalSolution,
    c: f64,
    c0: f64,
    sign: f64,
    spec: &SampleSpec,
) -> Result<ResidualReport> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidParams(format!("sign must be +1 or -1, got {sign}")));
    }
    if spec.intervals.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: spec.intervals.len(),
        });
    }
    let sing = sys.hamiltonian.singular_set();
    let pred = |x: &[f64], m: f64| sing.as_ref().is_some_and(|p| p(x, m)) || g.is_singular(x, m);
    let sampled = sample_points(spec, Some(&pred))?;
    let outcomes: Vec<_> = sampled
        .points
        .into_par_iter()
        .map(|x| {
            let r = (|| {
                let value = g.value(&x)?;
                let xg = flow_derivative(sys, g, &x, FLOW_STEP)?;
                let l = sys.hamiltonian.value(&x)?;
                let root = Complex64::new(-2.0 * (c * l + c0), 0.0).sqrt();
                Ok(relative_residual(xg, -(root * value * sign)))
            })();
            (x, r)
        })
        .collect();
    ResidualReport::assemble(outcomes, sampled.rejected)
}
