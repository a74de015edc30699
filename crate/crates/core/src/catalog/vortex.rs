//! Two point-vortices in the coordinates
//! `X̃₁ = (X₁ − X₂)/2, X̃₂ = (X₁ + X₂)/2, Ỹ₁ = Y₁ − Y₂, Ỹ₂ = Y₁ + Y₂`,
//! ordered `(X̃₁, Ỹ₁, X̃₂, Ỹ₂)` with Darboux pairs `{X̃ᵢ, Ỹᵢ} = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::diffkit::{Jet2, ScalarField};
use crate::error::Result;
use crate::extension::GlobalStatus;
use crate::poisson::{HamiltonianSystem, PoissonStructure};

use super::params::{require, ParamReader};
use super::{Built, Seed};

/// Tolerance for the integrality of the single-valuedness exponent.
pub const INTEGER_TOL: f64 = 1e-9;

pub const COORDS: [&str; 4] = ["X1t", "Y1t", "X2t", "Y2t"];

/// `(X₁, Y₁, X₂, Y₂) ↦ (X̃₁, Ỹ₁, X̃₂, Ỹ₂)`.
pub fn to_tilde(x: [f64; 4]) -> [f64; 4] {
    let [x1, y1, x2, y2] = x;
    [(x1 - x2) / 2.0, y1 - y2, (x1 + x2) / 2.0, y1 + y2]
}

/// Inverse of [`to_tilde`].
pub fn from_tilde(t: [f64; 4]) -> [f64; 4] {
    let [xt1, yt1, xt2, yt2] = t;
    [xt2 + xt1, (yt1 + yt2) / 2.0, xt2 - xt1, (yt2 - yt1) / 2.0]
}

/// Whether the exponent is within [`INTEGER_TOL`] of an integer.
pub fn is_single_valued(exponent: f64) -> bool {
    (exponent - exponent.round()).abs() <= INTEGER_TOL
}

fn structure() -> PoissonStructure {
    PoissonStructure::custom(4, |x| {
        let one = Jet2::constant(x.len(), 1.0);
        let zero = Jet2::constant(x.len(), 0.0);
        vec![one.clone(), zero.clone(), zero.clone(), zero.clone(), zero, one]
    })
}

fn names() -> Vec<String> {
    COORDS.iter().map(|s| s.to_string()).collect()
}

struct Common {
    k: f64,
    c0: f64,
    alpha: f64,
    f1: Complex64,
    f2: Complex64,
}

fn common(r: &mut ParamReader) -> Result<Common> {
    let k = r.f64("k", 1.0)?;
    let c = r.f64("c", 0.0)?;
    let c0 = r.f64("c0", 0.5)?;
    let alpha = r.f64("alpha", 1.0 / (8.0 * PI))?;
    let f1 = r.complex("F1", Complex64::new(1.0, 0.0))?;
    let f2 = r.complex("F2", Complex64::new(0.0, 0.0))?;
    require(k > 0.0, "vortex entries require k > 0")?;
    require(c == 0.0, "the vortex G solutions are known for c = 0 only")?;
    require(c0 > 0.0, "vortex entries require c0 > 0")?;
    require(alpha != 0.0, "alpha must be nonzero")?;
    require(
        f1 != Complex64::new(0.0, 0.0) || f2 != Complex64::new(0.0, 0.0),
        "F1 and F2 must not both vanish",
    )?;
    Ok(Common { k, c0, alpha, f1, f2 })
}

/// `k₁ = k₂ = k`: `L = −αk² ln(4X̃₁² + Ỹ₁²/k²)`,
/// `G = F₁ (ζ/√Q₁)^e + F₂ (ζ/√Q₁)^{−e}` with `ζ = Ỹ₁ + 2ikX̃₁`,
/// `Q₁ = k² e^{−L/(αk²)} = 4k²X̃₁² + Ỹ₁²` and `e = Q₁√(2c₀)/(4αk³)`.
pub(super) fn vortex_equal(r: &mut ParamReader) -> Result<Built> {
    let Common { k, c0, alpha, f1, f2 } = common(r)?;
    let near_core = move |x: &[f64], m: f64| 4.0 * k * k * x[0] * x[0] + x[1] * x[1] <= (m * m).max(1e-24);
    let l = ScalarField::real(4, "-alpha k^2 ln(4 X1t^2 + Y1t^2/k^2)", move |x| {
        (x[0].square() * 4.0 + x[1].square() / (k * k)).ln() * (-alpha * k * k)
    })
    .with_singular(near_core);
    let rate = (2.0 * c0).sqrt() / (4.0 * alpha * k.powi(3));
    let exponent = ScalarField::real(4, "exponent", move |x| {
        (x[0].square() * (4.0 * k * k) + x[1].square()) * rate
    })
    .with_singular(near_core);
    let g = ScalarField::complex(4, "F1 (zeta/sqrt Q1)^e + F2 (zeta/sqrt Q1)^-e", move |x| {
        let q1 = x[0].square() * (4.0 * k * k) + x[1].square();
        let zeta = &x[1] + x[0].scale(Complex64::new(0.0, 2.0 * k));
        let log_ratio = zeta.ln() - q1.ln() * 0.5;
        let e = q1 * rate;
        let phase = &e * &log_ratio;
        phase.exp().scale(f1) + (-phase).exp().scale(f2)
    })
    .with_singular(move |x, m| near_core(x, m) || (x[0].abs() <= m.max(0.0) && x[1] < 0.0));
    let system = HamiltonianSystem::new(structure(), l, names())?
        .with_observable("exponent", exponent)
        .with_observable("X2t", ScalarField::coordinate(4, 2, "X2t"))
        .with_observable("Y2t", ScalarField::coordinate(4, 3, "Y2t"));
    Ok(Built {
        system,
        seeds: vec![Seed {
            field: g,
            constraints: "c = 0, c0 > 0, k > 0; single-valued when the exponent is an integer".into(),
            global: GlobalStatus::ConditionallySingleValued,
        }],
        regime: Some((0.0, c0)),
        domain: vec![(-1.0, 1.0); 4],
        margin: 0.05,
    })
}

/// `k₂ = −k₁ = −k`: `L = αk² ln(4X̃₁² + Ỹ₂²/k²)`,
/// `G = F₁ sin ψ + F₂ cos ψ` with `ψ = √(2c₀) Q₂ X̃₂ / (2αk²Ỹ₂)` and
/// `Q₂ = k² e^{L/(αk²)} = 4k²X̃₁² + Ỹ₂²`.
pub(super) fn vortex_opposite(r: &mut ParamReader) -> Result<Built> {
    let Common { k, c0, alpha, f1, f2 } = common(r)?;
    let near_core = move |x: &[f64], m: f64| 4.0 * k * k * x[0] * x[0] + x[3] * x[3] <= (m * m).max(1e-24);
    let l = ScalarField::real(4, "alpha k^2 ln(4 X1t^2 + Y2t^2/k^2)", move |x| {
        (x[0].square() * 4.0 + x[3].square() / (k * k)).ln() * (alpha * k * k)
    })
    .with_singular(near_core);
    let scale = (2.0 * c0).sqrt() / (2.0 * alpha * k * k);
    let psi = move |x: &[Jet2<f64>]| (x[0].square() * (4.0 * k * k) + x[3].square()) * &x[2] / &x[3] * scale;
    let label = "F1 sin(psi) + F2 cos(psi)";
    let g = if f1.im == 0.0 && f2.im == 0.0 {
        let (a, b) = (f1.re, f2.re);
        ScalarField::real(4, label, move |x| {
            let p = psi(x);
            p.sin() * a + p.cos() * b
        })
    } else {
        ScalarField::complex(4, label, move |x| {
            let p = (x[0].square() * (4.0 * k * k) + x[3].square()) * &x[2] / &x[3] * scale;
            p.sin().scale(f1) + p.cos().scale(f2)
        })
    }
    .with_singular(move |x, m| x[3].abs() <= m.max(1e-12));
    let system = HamiltonianSystem::new(structure(), l, names())?
        .with_observable("X1t", ScalarField::coordinate(4, 0, "X1t"))
        .with_observable("Y2t", ScalarField::coordinate(4, 3, "Y2t"));
    Ok(Built {
        system,
        seeds: vec![Seed {
            field: g,
            constraints: "c = 0, c0 > 0, k > 0; singular at Y2t = 0".into(),
            global: GlobalStatus::GloballyDefined,
        }],
        regime: Some((0.0, c0)),
        domain: vec![(-1.0, 1.0); 4],
        margin: 0.1,
    })
}
