//! The Euler-top solution of `X_L G = ±√(−2(cL + c₀)) G` built from an
//! incomplete elliptic integral. It is defined only locally, so it is
//! checked through [`kn_residual`](super::residual::kn_residual) and never
//! used as an extension seed.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::quadrature::elliptic_f;
use super::residual::LocalSolution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerKuruNegro {
    pub inertia: [f64; 3],
    pub c: f64,
    pub c0: f64,
    /// `+1` or `−1`: the sign of the root in the first-order equation.
    pub sign: f64,
    /// Constant value of the free function `f(L, M)`.
    pub amplitude: f64,
}

/// Intermediate quantities at a point of the valid domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnChart {
    pub x1: f64,
    pub x2: f64,
    pub phi: f64,
    pub k2: f64,
    /// Local time along the flow: `X_L τ = sgn(ṁ₁)`.
    pub tau: f64,
}

impl EulerKuruNegro {
    pub fn new(inertia: [f64; 3], c: f64, c0: f64, sign: f64) -> Result<Self> {
        let [i1, i2, i3] = inertia;
        if !inertia.iter().all(|v| v.is_finite() && *v > 0.0) || i1 == i2 || i2 == i3 || i1 == i3 {
            return Err(Error::InvalidParams(
                "moments of inertia must be positive and distinct".into(),
            ));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidParams(format!("sign must be +1 or -1, got {sign}")));
        }
        Ok(Self {
            inertia,
            c,
            c0,
            sign,
            amplitude: 1.0,
        })
    }

    fn a(&self) -> f64 {
        let [i1, i2, i3] = self.inertia;
        i2 * (i1 - i3)
    }

    fn b(&self) -> f64 {
        let [i1, i2, i3] = self.inertia;
        i3 * (i1 - i2)
    }

    pub fn energy(&self, m: &[f64]) -> f64 {
        let [i1, i2, i3] = self.inertia;
        0.5 * (m[0] * m[0] / i1 + m[1] * m[1] / i2 + m[2] * m[2] / i3)
    }

    /// `ṁ₁` under the Euler flow.
    pub fn m1_rate(&self, m: &[f64]) -> f64 {
        let [_, i2, i3] = self.inertia;
        m[1] * m[2] * (1.0 / i3 - 1.0 / i2)
    }

    fn domain(reason: String) -> Error {
        Error::Domain {
            what: "Euler Kuru-Negro solution".into(),
            reason,
        }
    }

    /// `X₁ = I₁I₂(M − 2I₃L)`, `X₂ = I₁I₃(2I₂L − M)`, amplitude
    /// `φ = asin(m₁√(a/X₁))`, parameter `k² = −bX₁/(aX₂)` and
    /// `τ = I₁I₂I₃/√(aX₂) · F(φ | k²)`, where `a = I₂(I₁ − I₃)`, `b = I₃(I₁ − I₂)`.
    pub fn chart(&self, m: &[f64]) -> Result<KnChart> {
        if m.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: m.len(),
            });
        }
        let [i1, i2, i3] = self.inertia;
        let l = self.energy(m);
        let big_m = m.iter().map(|v| v * v).sum::<f64>();
        let x1 = i1 * i2 * (big_m - 2.0 * i3 * l);
        let x2 = i1 * i3 * (2.0 * i2 * l - big_m);
        let (a, b) = (self.a(), self.b());
        if !(a / x1 > 0.0 && a * x2 > 0.0) {
            return Err(Self::domain(format!(
                "needs a/X1 > 0 and a*X2 > 0 (X1 = {x1:e}, X2 = {x2:e})"
            )));
        }
        let s = m[0] * (a / x1).sqrt();
        if s.abs() >= 1.0 {
            return Err(Self::domain(format!("|sin(phi)| = {} >= 1", s.abs())));
        }
        let phi = s.asin();
        let k2 = -b * x1 / (a * x2);
        let tau = i1 * i2 * i3 / (a * x2).sqrt() * elliptic_f(phi, k2)?;
        Ok(KnChart { x1, x2, phi, k2, tau })
    }
}

impl LocalSolution for EulerKuruNegro {
    fn label(&self) -> String {
        format!("euler-kn(sign={:+})", self.sign)
    }

    /// `G = f exp(−sign·√(−2Λ)·τ)` on the branch `ṁ₁ < 0`, where
    /// `X_L τ = −1` and hence `X_L G = sign·√(−2Λ)·G`.
    fn value(&self, m: &[f64]) -> Result<Complex64> {
        if self.m1_rate(m) >= 0.0 {
            return Err(Self::domain("branch requires dm1/dt < 0".into()));
        }
        let chart = self.chart(m)?;
        let lambda = self.c * self.energy(m) + self.c0;
        let root = Complex64::new(-2.0 * lambda, 0.0).sqrt();
        Ok((-(root * chart.tau * self.sign)).exp() * self.amplitude)
    }

    fn is_singular(&self, m: &[f64], margin: f64) -> bool {
        // turning points of m₁ separate the branches
        self.m1_rate(m).abs() <= margin
    }
}
