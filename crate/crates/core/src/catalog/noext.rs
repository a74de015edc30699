//! Systems with no known globally defined `G`.

use crate::diffkit::{Jet2, ScalarField};
use crate::error::Result;
use crate::poisson::{HamiltonianSystem, PoissonStructure};

use super::params::{require, ParamReader};
use super::Built;

/// `π = ((0, A), (−A, 0))`, `A = −x^{1+g} y^{1+a} e^{−by−dx}`,
/// `L = x^{−g} y^{−a} e^{dx+by}` on `x, y > 0`.
pub(super) fn lotka_volterra(r: &mut ParamReader) -> Result<Built> {
    let a = r.f64("a", 1.0)?;
    let b = r.f64("b", 1.0)?;
    let d = r.f64("d", 1.0)?;
    let g = r.f64("g", 1.0)?;
    let positive = |x: &[f64], m: f64| x[0] <= m.max(0.0) || x[1] <= m.max(0.0);
    let structure = PoissonStructure::custom(2, move |x| {
        let (lx, ly) = (x[0].ln(), x[1].ln());
        let big_a = -(lx * (1.0 + g) + ly * (1.0 + a) - &x[1] * b - &x[0] * d).exp();
        vec![big_a]
    });
    let l = ScalarField::real(2, "x^-g y^-a e^(dx+by)", move |x| {
        (x[0].ln() * (-g) - x[1].ln() * a + &x[0] * d + &x[1] * b).exp()
    })
    .with_singular(positive);
    Ok(Built {
        system: HamiltonianSystem::new(structure, l, vec!["x".into(), "y".into()])?,
        seeds: Vec::new(),
        regime: None,
        domain: vec![(0.2, 3.0), (0.2, 3.0)],
        margin: 0.05,
    })
}

/// Euler top: `L = ½ Σ mᵢ²/Iᵢ` with the `so(3)` bivector; Casimir `M = |m|²`.
pub(super) fn euler_top(r: &mut ParamReader) -> Result<Built> {
    let i1 = r.f64("I1", 1.0)?;
    let i2 = r.f64("I2", 2.0)?;
    let i3 = r.f64("I3", 3.0)?;
    require(
        i1 > 0.0 && i2 > 0.0 && i3 > 0.0,
        "euler_top requires positive moments of inertia",
    )?;
    require(
        i1 != i2 && i2 != i3 && i1 != i3,
        "euler_top requires distinct moments of inertia",
    )?;
    let structure = PoissonStructure::custom(3, |x: &[Jet2<f64>]| vec![-&x[2], x[1].clone(), -&x[0]]);
    let l = ScalarField::real(3, "(m1^2/I1 + m2^2/I2 + m3^2/I3)/2", move |x| {
        (x[0].square() / i1 + x[1].square() / i2 + x[2].square() / i3) * 0.5
    });
    let casimir = ScalarField::real(3, "M", |x| x[0].square() + x[1].square() + x[2].square());
    let system = HamiltonianSystem::new(structure, l, vec!["m1".into(), "m2".into(), "m3".into()])?
        .with_observable("M", casimir);
    Ok(Built {
        system,
        seeds: Vec::new(),
        regime: None,
        domain: vec![(-1.0, 1.0); 3],
        margin: 0.0,
    })
}
