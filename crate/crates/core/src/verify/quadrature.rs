//! Adaptive Gauss–Kronrod (7/15) quadrature and the incomplete elliptic
//! integral of the first kind.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod estimate and its distance from the embedded
/// 7-point Gauss estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let sum = f(center - x) + f(center + x);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: (f64, f64), tol: f64, depth: u32) -> Result<(f64, f64)> {
    let (value, err) = whole;
    if err <= tol || depth == 0 {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                what: "quadrature".into(),
            });
        }
        if err > tol {
            return Err(Error::Degenerate(format!(
                "quadrature did not converge on [{a}, {b}] (error {err:e})"
            )));
        }
        return Ok((value, err));
    }
    let mid = 0.5 * (a + b);
    let left = gk15(f, a, mid);
    let right = gk15(f, mid, b);
    let (lv, le) = adapt(f, a, mid, left, 0.5 * tol, depth - 1)?;
    let (rv, re) = adapt(f, mid, b, right, 0.5 * tol, depth - 1)?;
    Ok((lv + rv, le + re))
}

/// `∫_a^b f` to absolute tolerance `tol`; returns the value and error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let whole = gk15(&f, a, b);
    adapt(&f, a, b, whole, tol, 40)
}

/// `F(φ | k²) = ∫_0^φ dθ / √(1 − k² sin²θ)` for amplitude `φ` and parameter
/// `k²` (which may be negative). Requires `k² sin²θ < 1` on `[0, φ]`.
pub fn elliptic_f(phi: f64, k2: f64) -> Result<f64> {
    if !(phi.is_finite() && k2.is_finite()) {
        return Err(Error::NonFinite {
            what: "elliptic integral arguments".into(),
        });
    }
    let max_sin2 = if phi.abs() >= std::f64::consts::FRAC_PI_2 {
        1.0
    } else {
        phi.sin().powi(2)
    };
    if k2 * max_sin2 >= 1.0 {
        return Err(Error::Domain {
            what: "incomplete elliptic integral".into(),
            reason: format!("k^2 sin^2(theta) reaches {} >= 1", k2 * max_sin2),
        });
    }
    let (value, _) = integrate_adaptive(|t| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-15)?;
    Ok(value)
}
