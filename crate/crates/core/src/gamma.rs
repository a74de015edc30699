//! The `γ(u)` family solving `γ' + cγ² + C = 0`.
//!
//! For `c ≠ 0` the solution is written with tagged trigonometric functions of
//! `κ = C/c`, which switch between circular (`κ > 0`), linear (`κ = 0`) and
//! hyperbolic (`κ < 0`) behaviour.

use crate::error::{Error, Result};

/// Values closer to zero than this are treated as poles / zeros.
pub const POLE_EPS: f64 = 1e-12;

/// `S_κ(x)` and `C_κ(x)`; `T_κ = S_κ / C_κ` via [`TaggedTrig::t`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedTrig {
    pub s: f64,
    pub c: f64,
}

impl TaggedTrig {
    pub fn at(kappa: f64, x: f64) -> Self {
        if kappa > 0.0 {
            let r = kappa.sqrt();
            Self {
                s: (r * x).sin() / r,
                c: (r * x).cos(),
            }
        } else if kappa < 0.0 {
            let r = (-kappa).sqrt();
            Self {
                s: (r * x).sinh() / r,
                c: (r * x).cosh(),
            }
        } else {
            Self { s: x, c: 1.0 }
        }
    }

    pub fn t(&self) -> Result<f64> {
        if self.c.abs() <= POLE_EPS {
            return Err(Error::Degenerate("T_kappa undefined: C_kappa(x) = 0".into()));
        }
        Ok(self.s / self.c)
    }
}

/// `(S_κ(x), C_κ(x), T_κ(x))`.
pub fn tagged_trig(kappa: f64, x: f64) -> Result<(f64, f64, f64)> {
    let tt = TaggedTrig::at(kappa, x);
    Ok((tt.s, tt.c, tt.t()?))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaParams {
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    /// Translation of the origin of `u`.
    #[serde(default)]
    pub u0: f64,
}

impl GammaParams {
    pub fn new(c: f64, big_c: f64) -> Self {
        Self { c, big_c, u0: 0.0 }
    }

    pub fn with_offset(mut self, u0: f64) -> Self {
        self.u0 = u0;
        self
    }

    /// `κ = C/c`, defined only for `c ≠ 0`.
    pub fn kappa(&self) -> Option<f64> {
        (self.c != 0.0).then(|| self.big_c / self.c)
    }

    /// `γ ≡ 0` (only possible for `c = C = 0`).
    pub fn is_identically_zero(&self) -> bool {
        self.c == 0.0 && self.big_c == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub gamma: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `γ(u)`, `γ'(u)` and `γ''(u) = −2cγγ'`.
pub fn gamma_eval(params: &GammaParams, u: f64) -> Result<GammaValue> {
    let c = params.c;
    let shifted = u - params.u0;
    let (gamma, d1) = match params.kappa() {
        None => (-params.big_c * shifted, -params.big_c),
        Some(kappa) => {
            let tt = TaggedTrig::at(kappa, c * shifted);
            if tt.s.abs() <= POLE_EPS {
                return Err(Error::Pole {
                    what: "gamma".into(),
                    u,
                });
            }
            (tt.c / tt.s, -c / (tt.s * tt.s))
        }
    };
    let value = GammaValue {
        gamma,
        d1,
        d2: -2.0 * c * gamma * d1,
    };
    if !(value.gamma.is_finite() && value.d1.is_finite() && value.d2.is_finite()) {
        return Err(Error::Pole {
            what: "gamma".into(),
            u,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn tagged_linear_case() {
        let (s, c, t) = tagged_trig(0.0, 1.7).unwrap();
        assert_eq!((s, c, t), (1.7, 1.0, 1.7));
    }

    #[test]
    fn tagged_circular_pole() {
        assert!(tagged_trig(1.0, FRAC_PI_2).is_err());
        let tt = TaggedTrig::at(1.0, FRAC_PI_2);
        assert!((tt.s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tagged_hyperbolic() {
        let (s, c, t) = tagged_trig(-4.0, 0.3).unwrap();
        assert!((s - 0.6f64.sinh() / 2.0).abs() < 1e-15);
        assert!((c - 0.6f64.cosh()).abs() < 1e-15);
        assert!((t - 0.6f64.tanh() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_eval(&GammaParams::new(0.0, 2.0), 3.0).unwrap();
        assert_eq!((g.gamma, g.d1, g.d2), (-6.0, -2.0, 0.0));

        let g = gamma_eval(&GammaParams::new(1.0, 0.0), 2.0).unwrap();
        assert_eq!((g.gamma, g.d1, g.d2), (0.5, -0.25, 0.25));

        let g = gamma_eval(&GammaParams::new(1.0, 1.0), FRAC_PI_4).unwrap();
        assert!((g.gamma - 1.0).abs() < 1e-15);
        assert!((g.d1 + 2.0).abs() < 1e-14);
        assert!((g.d2 - 4.0).abs() < 1e-14);
    }

    #[test]
    fn pole_at_origin() {
        assert!(matches!(
            gamma_eval(&GammaParams::new(1.0, 1.0), 0.0),
            Err(Error::Pole { .. })
        ));
        assert!(gamma_eval(&GammaParams::new(1.0, 1.0).with_offset(0.5), 0.5).is_err());
        assert!(gamma_eval(&GammaParams::new(0.0, 1.0), 0.0).is_ok());
    }
}
