use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poisson::{contract, PoissonStructure};

/// Central finite-difference gradient with step `h`.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParams(format!("finite-difference step h = {h}")));
    }
    let mut y = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let fp = f(&y)?;
        y[i] = x[i] - h;
        let fm = f(&y)?;
        y[i] = x[i];
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdBracket {
    pub value: f64,
    /// `|∇F| |π|_F |∇G|`.
    pub scale: f64,
}

impl FdBracket {
    /// `|value| / scale` (zero when both vanish).
    pub fn normalized(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.abs() / self.scale
        } else {
            self.value.abs()
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `{F, G}` at `x` from finite-difference gradients contracted with `π(x)`.
pub fn fd_bracket(
    structure: &PoissonStructure,
    f: &dyn Fn(&[f64]) -> Result<f64>,
    g: &dyn Fn(&[f64]) -> Result<f64>,
    x: &[f64],
    h: f64,
) -> Result<FdBracket> {
    let pi = structure.matrix(x)?;
    let df = fd_gradient(f, x, h)?;
    let dg = fd_gradient(g, x, h)?;
    Ok(FdBracket {
        value: contract(structure.dim(), &pi, &df, &dg),
        scale: norm(&df) * norm(&pi) * norm(&dg),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub min_rank: usize,
    pub ranks: Vec<usize>,
    /// Singular values (descending) at the state realizing the minimum.
    pub singular_values: Vec<f64>,
}

/// Numerical rank of the stacked gradients of `fields`, minimized over
/// `states`. Rows are normalized; singular values below
/// `threshold · σ_max` count as zero.
pub fn independence_rank(
    fields: &[&dyn Fn(&[f64]) -> Result<f64>],
    states: &[Vec<f64>],
    h: f64,
    threshold: f64,
) -> Result<RankReport> {
    if states.is_empty() || fields.is_empty() {
        return Err(Error::Degenerate(
            "rank test needs at least one field and one state".into(),
        ));
    }
    let mut report = RankReport {
        min_rank: usize::MAX,
        ranks: Vec::with_capacity(states.len()),
        singular_values: Vec::new(),
    };
    for x in states {
        let mut rows = Vec::with_capacity(fields.len() * x.len());
        for f in fields {
            let g = fd_gradient(*f, x, h)?;
            let n = norm(&g);
            rows.extend(g.iter().map(|v| if n > 0.0 { v / n } else { 0.0 }));
        }
        let m = DMatrix::from_row_slice(fields.len(), x.len(), &rows);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let top = sv.first().copied().unwrap_or(0.0);
        let rank = sv.iter().filter(|&&s| top > 0.0 && s > threshold * top).count();
        if rank < report.min_rank {
            report.min_rank = rank;
            report.singular_values = sv;
        }
        report.ranks.push(rank);
    }
    Ok(report)
}
