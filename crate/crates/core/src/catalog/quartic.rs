//! Hamiltonians quartic in the momenta, and the square of a natural
//! Hamiltonian in polar-type coordinates.

use crate::diffkit::{Jet2, ScalarField};
use crate::error::Result;
use crate::extension::GlobalStatus;
use crate::poisson::{HamiltonianSystem, PoissonStructure};

use super::params::{require, ParamReader};
use super::{Built, Seed};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// `L = W²/(256C₁²) − c₀/c` with
/// `W = 16C₁p² + 8C₁fp + 2cC₁q² + 4cC₂q + C₁f² + 8C₁C₃`; `G = C₁q + C₂`.
pub(super) fn quartic1(r: &mut ParamReader) -> Result<Built> {
    let c1 = r.f64("C1", 1.0)?;
    let c2 = r.f64("C2", 0.0)?;
    let c3 = r.f64("C3", 0.0)?;
    let f = r.function("f")?;
    let c = r.f64("c", 1.0)?;
    let c0 = r.f64("c0", 1.0)?;
    require(c1 != 0.0, "quartic1 requires C1 != 0")?;
    require(c != 0.0, "quartic1 requires c != 0 (L contains -c0/c)")?;
    let l = ScalarField::real(2, "quartic1 L", move |x| {
        let (q, p) = (&x[0], &x[1]);
        let fq = f.apply(q);
        let w = p.square() * (16.0 * c1)
            + &fq * p * (8.0 * c1)
            + q.square() * (2.0 * c * c1)
            + q * (4.0 * c * c2)
            + fq.square() * c1
            + 8.0 * c1 * c3;
        w.square() / (256.0 * c1 * c1) - c0 / c
    });
    let g = ScalarField::real(2, "C1 q + C2", move |x| &x[0] * c1 + c2);
    Ok(Built {
        system: HamiltonianSystem::new(PoissonStructure::canonical(1), l, names(&["q", "p"]))?,
        seeds: vec![Seed {
            field: g,
            constraints: "c != 0, C1 != 0; f arbitrary".into(),
            global: GlobalStatus::GloballyDefined,
        }],
        regime: Some((c, c0)),
        domain: vec![(-1.5, 1.5), (-1.5, 1.5)],
        margin: 0.0,
    })
}

fn pole_q(c1: f64, c2: f64) -> impl Fn(&[f64], f64) -> bool + Send + Sync + Clone {
    move |x: &[f64], m: f64| (c1 * x[0] + c2).abs() <= m.max(1e-12) * c1.abs()
}

fn quartic2_common(r: &mut ParamReader) -> Result<(f64, f64, f64, f64, f64, f64)> {
    let c1 = r.f64("C1", 1.0)?;
    let c2 = r.f64("C2", 0.5)?;
    let c3 = r.f64("C3", 0.3)?;
    let c4 = r.f64("C4", 0.2)?;
    let c = r.f64("c", 1.0)?;
    let c0 = r.f64("c0", 1.0)?;
    require(c1 != 0.0, "quartic2 requires C1 != 0")?;
    require(c != 0.0, "quartic2 requires c != 0")?;
    Ok((c1, c2, c3, c4, c, c0))
}

fn quartic2_built(l: ScalarField, c1: f64, c2: f64, c: f64, c0: f64, constraints: &str) -> Result<Built> {
    let pole = pole_q(c1, c2);
    let l = l.with_singular(pole.clone());
    let g = ScalarField::real(2, "(C1 q + C2) p", move |x| (&x[0] * c1 + c2) * &x[1]).with_singular(pole);
    Ok(Built {
        system: HamiltonianSystem::new(PoissonStructure::canonical(1), l, names(&["q", "p"]))?,
        seeds: vec![Seed {
            field: g,
            constraints: constraints.into(),
            global: GlobalStatus::GloballyDefined,
        }],
        regime: Some((c, c0)),
        domain: vec![(-1.5, 1.5), (-1.5, 1.5)],
        margin: 0.2,
    })
}

/// `L = p⁴ + fp² + f²/4 − c₀/c` with
/// `f = cq²/16 + cC₂q/(8C₁) − C₃/(2C₁(C₁q + C₂)²) + C₄`; `G = (C₁q + C₂)p`.
pub(super) fn quartic2a(r: &mut ParamReader) -> Result<Built> {
    let (c1, c2, c3, c4, c, c0) = quartic2_common(r)?;
    let l = ScalarField::real(2, "quartic2a L", move |x| {
        let (q, p) = (&x[0], &x[1]);
        let lin = q * c1 + c2;
        let f = q.square() * (c / 16.0) + q * (c * c2 / (8.0 * c1)) - lin.square().recip() * (c3 / (2.0 * c1)) + c4;
        p.powi(4) + &f * p.square() + f.square() * 0.25 - c0 / c
    });
    quartic2_built(l, c1, c2, c, c0, "c != 0, C1 != 0; singular at C1 q + C2 = 0")
}

/// `L = p⁴ + fp² + V` with `f = c(C₁q + C₂)²/(16C₁²) + C₃/(C₁q + C₂)²` and the
/// degree-eight `V` of the second branch; `G = (C₁q + C₂)p`.
pub(super) fn quartic2b(r: &mut ParamReader) -> Result<Built> {
    let (c1, c2, c3, c4, c, c0) = quartic2_common(r)?;
    let l = ScalarField::real(2, "quartic2b L", move |x| {
        let (q, p) = (&x[0], &x[1]);
        let lin = q * c1 + c2;
        let f = lin.square() * (c / (16.0 * c1 * c1)) + lin.square().recip() * c3;
        let cube = c * c * c;
        let coeffs = [
            -8.0 * c2.powi(7) * cube + 4096.0 * c0 * c1.powi(4) * c2.powi(3)
                - 128.0 * c1 * c1 * c2.powi(3) * c3 * c * c,
            -28.0 * c1 * c2.powi(6) * cube + 6144.0 * c0 * c1.powi(5) * c2 * c2
                - 192.0 * c1.powi(3) * c2 * c2 * c3 * c * c,
            4096.0 * c0 * c1.powi(6) * c2 - 128.0 * c1.powi(4) * c2 * c3 * c * c - 56.0 * c1 * c1 * c2.powi(5) * cube,
            -70.0 * c1.powi(3) * c2.powi(4) * cube + 1024.0 * c0 * c1.powi(7) - 32.0 * c1.powi(5) * c3 * c * c,
            -56.0 * c1.powi(4) * c2.powi(3) * cube,
            -28.0 * c1.powi(5) * c2 * c2 * cube,
            -8.0 * c1.powi(6) * c2 * cube,
            -c1.powi(7) * cube,
        ];
        let mut inner = Jet2::constant(2, 0.0);
        for &a in coeffs.iter().rev() {
            inner = inner * q + a;
        }
        let v = (-(q * &inner) / (1024.0 * c * c1.powi(3)) + c4) / lin.powi(4);
        p.powi(4) + &f * p.square() + v
    });
    quartic2_built(
        l,
        c1,
        c2,
        c,
        c0,
        "c != 0, C1 != 0; singular at C1 q + C2 = 0; closed-form V gated numerically",
    )
}

/// `L = (p₁² + p₂²/q₁² + V)²` with `c₀ = 0` and
/// `G = (C₂ sin q₂ + C₃ cos q₂) q₁ + C₁`.
pub(super) fn square_polar(r: &mut ParamReader) -> Result<Built> {
    let c1 = r.f64("C1", 0.5)?;
    let c2 = r.f64("C2", 0.3)?;
    let c3 = r.f64("C3", 1.0)?;
    let f = r.function("F")?;
    let c = r.f64("c", 1.0)?;
    let c0 = r.f64("c0", 0.0)?;
    require(c0 == 0.0, "square_polar requires c0 = 0")?;
    require(c != 0.0, "square_polar requires c != 0 since c0 = 0")?;
    require(c3 != 0.0, "square_polar requires C3 != 0")?;
    let singular = move |x: &[f64], m: f64| {
        let m = m.max(1e-12);
        x[1].cos().abs() <= m || x[0].abs() <= m || (x[1].tan() * c3 - c2).abs() <= m
    };
    let l = ScalarField::real(4, "square_polar L", move |x| {
        let (q1, q2, p1, p2) = (&x[0], &x[1], &x[2], &x[3]);
        let (s, co, t) = (q2.sin(), q2.cos(), q2.tan());
        let a = &s * c3 - &co * c2;
        let d = &t * c3 - c2;
        let quad = a.square() * (&t * (2.0 * c2 * c3) + (c3 * c3 - c2 * c2)) / (d.square() * (c3 * c3));
        let lin = &a * c1 / (&d * c3);
        let arg = (&s * c3 - &co * c2) * q1;
        let v = quad * q1.square() * (c / 8.0) + lin * q1 * (c / 4.0) + f.apply(&arg);
        (p1.square() + p2.square() / q1.square() + v).square()
    })
    .with_singular(singular);
    let g = ScalarField::real(4, "(C2 sin q2 + C3 cos q2) q1 + C1", move |x| {
        (x[1].sin() * c2 + x[1].cos() * c3) * &x[0] + c1
    });
    Ok(Built {
        system: HamiltonianSystem::new(PoissonStructure::canonical(2), l, names(&["q1", "q2", "p1", "p2"]))?,
        seeds: vec![Seed {
            field: g,
            constraints: "c0 = 0, c != 0, C3 != 0; F arbitrary".into(),
            global: GlobalStatus::GloballyDefined,
        }],
        regime: Some((c, c0)),
        domain: vec![(0.5, 2.0), (-1.2, 1.2), (-1.0, 1.0), (-1.0, 1.0)],
        margin: 0.05,
    })
}
