//! Extended Hamiltonians and their characteristic first integrals.
//!
//! Given `L` on a Poisson manifold and a non-null `G` with
//! `X_L² G = −2(cL + c₀) G`, the extension on `(u, p_u, x)` is
//!
//! ```text
//! H = p_u²/2 − k² γ'(u) L + k² c₀ γ(u)² + Ω / γ(u)²,     k = m/n,
//! ```
//!
//! and the characteristic first integral is `K_{m,n} = U_{m,n}^m (G_n)` with
//! `U_{m,n} = p_u + (m/n²) γ X_L` (for `Ω = 0`), or
//! `K̄_{2s,r} = (U_{2s,r}² + 2Ω/γ²)^s (G_r)` in general.
//!
//! Everything here works inside the derivation algebra generated by `G`,
//! `X_L G` and `L`, where `X_L(X_L G) = −2ΛG` with `Λ = cL + c₀` and
//! `X_L Λ = 0`. Only the pair `(G, X_L G)` at a point and `Λ` are needed to
//! evaluate any element of it.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffkit::{PhasePoint, Scalar, ScalarField};
use crate::error::{Error, Result};
use crate::gamma::{gamma_eval, GammaParams, GammaValue, POLE_EPS};
use crate::poisson::{apply_xl_complex, extend_structure, ham_vector_field, HamiltonianSystem, PoissonStructure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionParams {
    pub c: f64,
    pub c0: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    #[serde(rename = "Omega", default)]
    pub omega: f64,
    pub m: u32,
    pub n: u32,
    #[serde(default)]
    pub u0: f64,
}

/// Which characteristic integral an extension carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IntegralIndices {
    /// `K_{m,n}`, used when `Ω = 0`.
    Plain { m: u32, n: u32 },
    /// `K̄_{2s,r}`.
    Bar { s: u32, r: u32 },
}

impl ExtensionParams {
    pub fn new(c: f64, c0: f64, big_c: f64, omega: f64, m: u32, n: u32) -> Self {
        Self {
            c,
            c0,
            big_c,
            omega,
            m,
            n,
            u0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.c, self.c0, self.big_c, self.omega, self.u0]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("extension parameters must be finite".into()));
        }
        if self.c == 0.0 && self.c0 == 0.0 {
            return Err(Error::InvalidParams("(c, c0) must not both vanish".into()));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParams("m and n must be positive".into()));
        }
        if self.omega != 0.0 && self.gamma_params().is_identically_zero() {
            return Err(Error::InvalidParams(
                "gamma vanishes identically (c = C = 0) but Omega != 0".into(),
            ));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn kappa(&self) -> Option<f64> {
        self.gamma_params().kappa()
    }

    pub fn gamma_params(&self) -> GammaParams {
        GammaParams::new(self.c, self.big_c).with_offset(self.u0)
    }

    /// `Λ = cL + c₀`.
    pub fn lambda(&self, l: f64) -> f64 {
        self.c * l + self.c0
    }

    /// A `u`-interval on which `γ` has no pole and (for `κ > 0`) no zero:
    /// `c(u − u₀) ∈ [0.2, 0.8]·π/(2√κ)` for `κ > 0`, `∈ [0.3, 1.5]` for
    /// `κ ≤ 0`, and `u − u₀ ∈ [0.5, 1.5]` for `c = 0`.
    pub fn regular_u_interval(&self) -> (f64, f64) {
        let (lo, hi) = match self.kappa() {
            None => return (self.u0 + 0.5, self.u0 + 1.5),
            Some(k) if k > 0.0 => {
                let quarter = std::f64::consts::FRAC_PI_2 / k.sqrt();
                (0.2 * quarter, 0.8 * quarter)
            }
            Some(_) => (0.3, 1.5),
        };
        let (a, b) = (self.u0 + lo / self.c, self.u0 + hi / self.c);
        (a.min(b), a.max(b))
    }

    /// `K_{m,n}` for `Ω = 0`; otherwise `K̄` with the first index even,
    /// doubling both indices when `m` is odd.
    pub fn indices(&self) -> IntegralIndices {
        if self.omega == 0.0 {
            IntegralIndices::Plain { m: self.m, n: self.n }
        } else if self.m.is_multiple_of(2) {
            IntegralIndices::Bar {
                s: self.m / 2,
                r: self.n,
            }
        } else {
            IntegralIndices::Bar {
                s: self.m,
                r: 2 * self.n,
            }
        }
    }
}

/// An element of the derivation algebra at a point: its value and its
/// `X_L` derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtDerivValue<S> {
    pub value: S,
    pub xl: S,
}

impl<S: Scalar> ExtDerivValue<S> {
    pub fn new(value: S, xl: S) -> Self {
        Self { value, xl }
    }

    pub fn constant(value: S) -> Self {
        Self { value, xl: S::zero() }
    }

    pub fn scale(self, s: S) -> Self {
        Self {
            value: self.value * s,
            xl: self.xl * s,
        }
    }

    pub fn powu(self, e: u32) -> Self {
        let mut out = Self::constant(S::one());
        for _ in 0..e {
            out = out * self;
        }
        out
    }
}

impl<S: Scalar> Add for ExtDerivValue<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            xl: self.xl + rhs.xl,
        }
    }
}

impl<S: Scalar> Sub for ExtDerivValue<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            xl: self.xl - rhs.xl,
        }
    }
}

impl<S: Scalar> Mul for ExtDerivValue<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            value: self.value * rhs.value,
            xl: self.xl * rhs.value + self.value * rhs.xl,
        }
    }
}

/// The pair `(X_L G, X_L² G) = (xg, −2Λg)` given `(g, xg)`.
pub fn xl_of_seed<S: Scalar>(g: ExtDerivValue<S>, lambda: f64) -> ExtDerivValue<S> {
    ExtDerivValue::new(g.xl, S::from_real(-2.0 * lambda) * g.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlobalStatus {
    GloballyDefined,
    ConditionallySingleValued,
    MultiValued,
}

impl GlobalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            GlobalStatus::GloballyDefined => "globally-defined",
            GlobalStatus::ConditionallySingleValued => "conditionally-single-valued",
            GlobalStatus::MultiValued => "multi-valued",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verification {
    Unchecked,
    Passed { max_residual: f64 },
    Failed { max_residual: f64 },
}

/// A known solution `G` of `X_L² G = −2(cL + c₀) G`.
#[derive(Debug, Clone)]
pub struct GSolution {
    pub field: ScalarField,
    pub c: f64,
    pub c0: f64,
    pub constraints: String,
    pub global: GlobalStatus,
    pub verification: Verification,
}

impl GSolution {
    /// Rejects a seed that vanishes at every probe point.
    pub fn new(
        field: ScalarField,
        c: f64,
        c0: f64,
        constraints: impl Into<String>,
        global: GlobalStatus,
        probes: &[Vec<f64>],
    ) -> Result<Self> {
        let mut evaluated = 0;
        let mut nonzero = false;
        for p in probes {
            if let Ok(v) = field.value_complex(p) {
                evaluated += 1;
                nonzero |= v.norm() > 0.0;
            }
        }
        if evaluated == 0 {
            return Err(Error::Degenerate(format!(
                "G `{}` could not be evaluated at any probe point",
                field.label()
            )));
        }
        if !nonzero {
            return Err(Error::Degenerate(format!("G `{}` is the null solution", field.label())));
        }
        Ok(Self {
            field,
            c,
            c0,
            constraints: constraints.into(),
            global,
            verification: Verification::Unchecked,
        })
    }

    pub fn matches(&self, params: &ExtensionParams) -> bool {
        self.c == params.c && self.c0 == params.c0
    }
}

/// A point `(u, p_u, x)` of the extended manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    pub u: f64,
    pub p_u: f64,
    pub base: PhasePoint,
}

impl ExtendedState {
    pub fn new(u: f64, p_u: f64, base: Vec<f64>) -> Result<Self> {
        if !(u.is_finite() && p_u.is_finite()) {
            return Err(Error::NonFinite {
                what: "extended state".into(),
            });
        }
        Ok(Self {
            u,
            p_u,
            base: PhasePoint::new(base)?,
        })
    }

    /// Flat layout `[u, p_u, x…]`.
    pub fn from_slice(y: &[f64]) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: y.len(),
            });
        }
        Self::new(y[0], y[1], y[2..].to_vec())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.base.dim() + 2);
        y.push(self.u);
        y.push(self.p_u);
        y.extend_from_slice(&self.base);
        y
    }
}

/// `(G, X_L G)` at `x` together with `L(x)`.
pub fn seed_pair(sys: &HamiltonianSystem, gsol: &GSolution, x: &[f64]) -> Result<(ExtDerivValue<Complex64>, f64)> {
    let g = gsol.field.value_complex(x)?;
    let xg = apply_xl_complex(sys, &gsol.field, x)?;
    let l = sys.hamiltonian.value(x)?;
    Ok((ExtDerivValue::new(g, xg), l))
}

/// `(G_n, X_L G_n)` by iterating `G_{j+1} = X_L(G) G_j + (1/j) G X_L(G_j)`.
///
/// `G_j` is homogeneous of degree `j` in `(G, X_L G)`; the iteration runs on
/// its coefficient vector (index = power of `G`) and evaluates at the end.
pub fn gn_recursive<S: Scalar>(n: u32, g: ExtDerivValue<S>, lambda: f64) -> ExtDerivValue<S> {
    assert!(n >= 1, "G_n is defined for n >= 1");
    // coeffs[a] multiplies G^a (X_L G)^(deg - a)
    let mut coeffs = vec![0.0, 1.0];
    for j in 1..n {
        let deg = j as usize;
        let d = derive_homogeneous(&coeffs, lambda);
        let mut next = vec![0.0; deg + 2];
        for a in 0..=deg {
            // X_L(G) * G_j keeps the power of G
            next[a] += coeffs[a];
            // (1/j) G * X_L(G_j) raises it by one
            next[a + 1] += d[a] / j as f64;
        }
        coeffs = next;
    }
    let value = eval_homogeneous(&coeffs, g.value, g.xl);
    let xl = eval_homogeneous(&derive_homogeneous(&coeffs, lambda), g.value, g.xl);
    ExtDerivValue::new(value, xl)
}

/// `X_L` of a homogeneous polynomial: `X_L(G^a Y^b) = a G^{a−1} Y^{b+1} − 2Λ b G^{a+1} Y^{b−1}`.
fn derive_homogeneous(coeffs: &[f64], lambda: f64) -> Vec<f64> {
    let deg = coeffs.len() - 1;
    let mut out = vec![0.0; deg + 1];
    for (a, &k) in coeffs.iter().enumerate() {
        if k == 0.0 {
            continue;
        }
        let b = deg - a;
        if a > 0 {
            out[a - 1] += a as f64 * k;
        }
        if b > 0 {
            out[a + 1] += -2.0 * lambda * b as f64 * k;
        }
    }
    out
}

fn eval_homogeneous<S: Scalar>(coeffs: &[f64], g: S, y: S) -> S {
    let deg = coeffs.len() - 1;
    coeffs.iter().enumerate().fold(S::zero(), |acc, (a, &k)| {
        if k == 0.0 {
            acc
        } else {
            acc + S::from_real(k) * g.powi(a as i32) * y.powi((deg - a) as i32)
        }
    })
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `G_n = Σ_k C(n, 2k+1) (−2Λ)^k G^{2k+1} (X_L G)^{n−2k−1}`, with its `X_L`
/// derivative carried through the ring operations.
pub fn gn_closed<S: Scalar>(n: u32, g: ExtDerivValue<S>, lambda: f64) -> ExtDerivValue<S> {
    assert!(n >= 1, "G_n is defined for n >= 1");
    let xg = xl_of_seed(g, lambda);
    let mut acc = ExtDerivValue::constant(S::zero());
    for k in 0..=((n - 1) / 2) {
        let coeff = binomial(n, 2 * k + 1) * (-2.0 * lambda).powi(k as i32);
        let term = g.powu(2 * k + 1) * xg.powu(n - 2 * k - 1);
        acc = acc + term.scale(S::from_real(coeff));
    }
    acc
}

/// Coefficients of `U_{m,n}^r (G_n) = P G_n + D X_L(G_n)`.
pub fn pd_coeffs(m: u32, n: u32, r: u32, p_u: f64, gamma: f64, lambda: f64) -> Result<(f64, f64)> {
    if r > m {
        return Err(Error::InvalidParams(format!("power r = {r} exceeds m = {m}")));
    }
    let a = m as f64 / n as f64 * gamma;
    let mut p = 0.0;
    for j in 0..=(r / 2) {
        p += binomial(r, 2 * j) * a.powi(2 * j as i32) * p_u.powi((r - 2 * j) as i32) * (-2.0 * lambda).powi(j as i32);
    }
    let mut d = 0.0;
    if r >= 1 {
        for j in 0..=((r - 1) / 2) {
            d += binomial(r, 2 * j + 1)
                * a.powi(2 * j as i32 + 1)
                * p_u.powi((r - 2 * j - 1) as i32)
                * (-2.0 * lambda).powi(j as i32);
        }
    }
    Ok((p, d / n as f64))
}

fn u_power(
    m: u32,
    n: u32,
    r: u32,
    p_u: f64,
    gamma: f64,
    lambda: f64,
    gn: ExtDerivValue<Complex64>,
) -> Result<Complex64> {
    let (p, d) = pd_coeffs(m, n, r, p_u, gamma, lambda)?;
    Ok(gn.value * p + gn.xl * d)
}

fn gamma_at(params: &ExtensionParams, u: f64) -> Result<GammaValue> {
    gamma_eval(&params.gamma_params(), u)
}

/// `K_{m,n}` at an extended state (`Ω = 0` only). Real seeds give a zero
/// imaginary part.
pub fn k_char(
    sys: &HamiltonianSystem,
    gsol: &GSolution,
    params: &ExtensionParams,
    state: &ExtendedState,
) -> Result<Complex64> {
    if params.omega != 0.0 {
        return Err(Error::InvalidParams("K_{m,n} requires Omega = 0; use kbar_char".into()));
    }
    let gamma = gamma_at(params, state.u)?;
    let (seed, l) = seed_pair(sys, gsol, &state.base)?;
    let lambda = params.lambda(l);
    let gn = gn_closed(params.n, seed, lambda);
    u_power(params.m, params.n, params.m, state.p_u, gamma.gamma, lambda, gn)
}

/// `K̄_{2s,r} = Σ_j C(s,j) (2Ω/γ²)^j U_{2s,r}^{2(s−j)} (G_r)`, with indices
/// from [`ExtensionParams::indices`] (odd `m` is doubled).
pub fn kbar_char(
    sys: &HamiltonianSystem,
    gsol: &GSolution,
    params: &ExtensionParams,
    state: &ExtendedState,
) -> Result<Complex64> {
    let (s, r) = match params.indices() {
        IntegralIndices::Bar { s, r } => (s, r),
        IntegralIndices::Plain { m, n } if m % 2 == 0 => (m / 2, n),
        IntegralIndices::Plain { m, n } => (m, 2 * n),
    };
    kbar_with(sys, gsol, params, s, r, state)
}

/// `K̄_{2s,r}` with explicit indices.
pub fn kbar_with(
    sys: &HamiltonianSystem,
    gsol: &GSolution,
    params: &ExtensionParams,
    s: u32,
    r: u32,
    state: &ExtendedState,
) -> Result<Complex64> {
    let gamma = gamma_at(params, state.u)?;
    if params.omega != 0.0 && gamma.gamma.abs() <= POLE_EPS {
        return Err(Error::Pole {
            what: "Omega / gamma^2".into(),
            u: state.u,
        });
    }
    let (seed, l) = seed_pair(sys, gsol, &state.base)?;
    let lambda = params.lambda(l);
    let gn = gn_closed(r, seed, lambda);
    let w = if params.omega == 0.0 {
        0.0
    } else {
        2.0 * params.omega / (gamma.gamma * gamma.gamma)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=s {
        let weight = binomial(s, j) * w.powi(j as i32);
        if weight == 0.0 {
            continue;
        }
        acc += u_power(2 * s, r, 2 * (s - j), state.p_u, gamma.gamma, lambda, gn)? * weight;
    }
    Ok(acc)
}

/// `H = p_u²/2 − k²γ'L + k²c₀γ² + Ω/γ²`.
pub fn h_extended(sys: &HamiltonianSystem, params: &ExtensionParams, state: &ExtendedState) -> Result<f64> {
    let gamma = gamma_at(params, state.u)?;
    let l = sys.hamiltonian.value(&state.base)?;
    h_from_parts(params, state.p_u, l, &gamma, state.u)
}

fn h_from_parts(params: &ExtensionParams, p_u: f64, l: f64, gamma: &GammaValue, u: f64) -> Result<f64> {
    let k2 = params.k() * params.k();
    let mut h = 0.5 * p_u * p_u - k2 * gamma.d1 * l + k2 * params.c0 * gamma.gamma * gamma.gamma;
    if params.omega != 0.0 {
        if gamma.gamma.abs() <= POLE_EPS {
            return Err(Error::Pole {
                what: "Omega / gamma^2".into(),
                u,
            });
        }
        h += params.omega / (gamma.gamma * gamma.gamma);
    }
    Ok(h)
}

/// Time derivative of `[u, p_u, x…]` under the flow of `H` with the
/// extended structure.
pub fn extended_flow(sys: &HamiltonianSystem, params: &ExtensionParams, state: &ExtendedState) -> Result<Vec<f64>> {
    let gamma = gamma_at(params, state.u)?;
    let l = sys.hamiltonian.value(&state.base)?;
    let k2 = params.k() * params.k();
    let mut dp_u = k2 * gamma.d2 * l - 2.0 * k2 * params.c0 * gamma.gamma * gamma.d1;
    if params.omega != 0.0 {
        if gamma.gamma.abs() <= POLE_EPS {
            return Err(Error::Pole {
                what: "Omega / gamma^2".into(),
                u: state.u,
            });
        }
        dp_u += 2.0 * params.omega * gamma.d1 / gamma.gamma.powi(3);
    }
    let xl = ham_vector_field(sys, &state.base)?;
    let mut out = Vec::with_capacity(xl.len() + 2);
    out.push(state.p_u);
    out.push(dp_u);
    out.extend(xl.into_iter().map(|v| -k2 * gamma.d1 * v));
    Ok(out)
}

/// A fully specified extension: base system, seed, parameters.
#[derive(Debug, Clone)]
pub struct Extension {
    pub system: HamiltonianSystem,
    pub seed: GSolution,
    pub params: ExtensionParams,
}

impl Extension {
    pub fn new(system: HamiltonianSystem, seed: GSolution, params: ExtensionParams) -> Result<Self> {
        params.validate()?;
        if !seed.matches(&params) {
            return Err(Error::InvalidParams(format!(
                "G solves the extension equation for (c, c0) = ({}, {}), not ({}, {})",
                seed.c, seed.c0, params.c, params.c0
            )));
        }
        if seed.field.dim() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                got: seed.field.dim(),
            });
        }
        Ok(Self { system, seed, params })
    }

    pub fn dim(&self) -> usize {
        self.system.dim() + 2
    }

    pub fn structure(&self) -> PoissonStructure {
        extend_structure(&self.system.structure)
    }

    pub fn indices(&self) -> IntegralIndices {
        self.params.indices()
    }

    pub fn hamiltonian(&self, y: &[f64]) -> Result<f64> {
        h_extended(&self.system, &self.params, &ExtendedState::from_slice(y)?)
    }

    /// The characteristic first integral selected by [`Self::indices`].
    pub fn integral(&self, y: &[f64]) -> Result<Complex64> {
        let state = ExtendedState::from_slice(y)?;
        match self.indices() {
            IntegralIndices::Plain { .. } => k_char(&self.system, &self.seed, &self.params, &state),
            IntegralIndices::Bar { s, r } => kbar_with(&self.system, &self.seed, &self.params, s, r, &state),
        }
    }

    pub fn flow(&self, y: &[f64]) -> Result<Vec<f64>> {
        extended_flow(&self.system, &self.params, &ExtendedState::from_slice(y)?)
    }

    pub fn base_hamiltonian(&self, y: &[f64]) -> Result<f64> {
        self.system.hamiltonian.value(&y[2..])
    }

    /// Whether `y` lies within `margin` of a singular set of `L`, `G`, or of
    /// `γ` (pole, or zero when `Ω ≠ 0`).
    pub fn is_singular(&self, y: &[f64], margin: f64) -> bool {
        let base = &y[2..];
        if self.system.hamiltonian.is_singular(base, margin) || self.seed.field.is_singular(base, margin) {
            return true;
        }
        match gamma_at(&self.params, y[0]) {
            Err(_) => true,
            Ok(g) => {
                let near_pole = g.d1.abs() > 1.0 / margin.max(POLE_EPS).powi(2);
                near_pole || (self.params.omega != 0.0 && g.gamma.abs() <= margin.max(POLE_EPS))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffkit::ScalarField;
    use crate::poisson::PoissonStructure;

    fn oscillator(omega: f64) -> (HamiltonianSystem, GSolution) {
        let l = ScalarField::real(2, "osc", move |x| {
            (x[1].square() + x[0].square() * (omega * omega)) * 0.5
        });
        let sys = HamiltonianSystem::new(PoissonStructure::canonical(1), l, vec!["q".into(), "p".into()]).unwrap();
        let g = GSolution::new(
            ScalarField::coordinate(2, 0, "q"),
            0.0,
            omega * omega / 2.0,
            "",
            GlobalStatus::GloballyDefined,
            &[vec![1.0, 0.0]],
        )
        .unwrap();
        (sys, g)
    }

    #[test]
    fn seed_pair_oscillator() {
        let (sys, g) = oscillator(2.0);
        let (pair, l) = seed_pair(&sys, &g, &[1.0, 3.0]).unwrap();
        assert_eq!(pair.value, Complex64::new(1.0, 0.0));
        assert_eq!(pair.xl, Complex64::new(3.0, 0.0));
        assert_eq!(l, 6.5);
    }

    #[test]
    fn null_seed_rejected() {
        let zero = ScalarField::constant(2, 0.0);
        let err = GSolution::new(
            zero,
            0.0,
            1.0,
            "",
            GlobalStatus::GloballyDefined,
            &[vec![1.0, 2.0], vec![0.5, 0.1]],
        );
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn gn_low_orders() {
        let g = ExtDerivValue::new(0.7, -1.3);
        let lam = 0.45;
        assert_eq!(gn_recursive(1, g, lam), g);
        assert_eq!(gn_closed(1, g, lam), g);
        let g2 = gn_recursive(2, g, lam);
        assert!((g2.value - 2.0 * 0.7 * -1.3).abs() < 1e-15);
        let g3 = gn_recursive(3, g, lam);
        let expect = 3.0 * 0.7 * 1.3 * 1.3 - 2.0 * lam * 0.7f64.powi(3);
        assert!((g3.value - expect).abs() < 1e-14);
        assert!((gn_closed(3, g, lam).value - expect).abs() < 1e-14);
    }

    #[test]
    fn vanishing_seed_gives_vanishing_gn() {
        let z = ExtDerivValue::new(0.0, 0.0);
        for n in 1..6 {
            assert_eq!(gn_closed(n, z, 1.3).value, 0.0);
            assert_eq!(gn_recursive(n, z, 1.3).xl, 0.0);
        }
    }

    #[test]
    fn pd_examples() {
        let (p, d) = pd_coeffs(1, 1, 1, 0.4, 1.7, 0.2).unwrap();
        assert_eq!((p, d), (0.4, 1.7));
        let (p, d) = pd_coeffs(3, 2, 1, 0.4, 1.7, 0.2).unwrap();
        assert!((p - 0.4).abs() < 1e-15 && (d - 3.0 / 4.0 * 1.7).abs() < 1e-15);
        let (m, n, pu, g, lam) = (3u32, 2u32, 0.4, 1.7, 0.2);
        let a = m as f64 / n as f64 * g;
        let (p, d) = pd_coeffs(m, n, 2, pu, g, lam).unwrap();
        assert!((p - (pu * pu - 2.0 * lam * a * a)).abs() < 1e-14);
        assert!((d - 2.0 * m as f64 / (n * n) as f64 * g * pu).abs() < 1e-14);
        let (p, d) = pd_coeffs(4, 3, 3, 0.9, 0.0, 2.0).unwrap();
        assert!((p - 0.9f64.powi(3)).abs() < 1e-15 && d == 0.0);
        assert!(pd_coeffs(2, 1, 3, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn h_example() {
        let l = ScalarField::constant(2, 3.0);
        let sys = HamiltonianSystem::new(PoissonStructure::canonical(1), l, vec!["q".into(), "p".into()]).unwrap();
        let params = ExtensionParams::new(0.0, 0.5, 1.0, 0.0, 2, 1);
        let state = ExtendedState::new(2.0, 1.0, vec![0.0, 0.0]).unwrap();
        assert!((h_extended(&sys, &params, &state).unwrap() - 20.5).abs() < 1e-13);
    }

    #[test]
    fn h_pole_with_omega() {
        let l = ScalarField::constant(2, 3.0);
        let sys = HamiltonianSystem::new(PoissonStructure::canonical(1), l, vec!["q".into(), "p".into()]).unwrap();
        let params = ExtensionParams::new(0.0, 0.5, 1.0, 0.3, 2, 1);
        let state = ExtendedState::new(0.0, 1.0, vec![0.0, 0.0]).unwrap();
        assert!(matches!(h_extended(&sys, &params, &state), Err(Error::Pole { .. })));
    }

    #[test]
    fn first_order_integral() {
        let (sys, g) = oscillator(2.0);
        let params = ExtensionParams::new(0.0, 2.0, 1.5, 0.0, 1, 1);
        let state = ExtendedState::new(0.8, -0.3, vec![0.4, 1.1]).unwrap();
        let gamma = -1.5 * 0.8;
        let k = k_char(&sys, &g, &params, &state).unwrap();
        assert!((k.re - (-0.3 * 0.4 + gamma * 1.1)).abs() < 1e-14);
        assert_eq!(k.im, 0.0);
    }

    #[test]
    fn kbar_reduces_without_omega() {
        let (sys, g) = oscillator(1.3);
        let params = ExtensionParams::new(0.0, 0.845, 0.7, 0.0, 4, 3);
        let state = ExtendedState::new(1.1, 0.6, vec![-0.2, 0.9]).unwrap();
        let k = k_char(&sys, &g, &params, &state).unwrap();
        let kb = kbar_char(&sys, &g, &params, &state).unwrap();
        assert!((k - kb).norm() <= 1e-12 * k.norm());
    }

    #[test]
    fn kbar_first_order_by_hand() {
        let (sys, g) = oscillator(1.0);
        let omega = 0.25;
        let params = ExtensionParams::new(0.0, 0.5, 1.0, omega, 2, 1);
        let state = ExtendedState::new(0.9, 0.35, vec![0.6, -0.4]).unwrap();
        let gamma = -0.9;
        let lam = 0.5;
        let (gv, xg) = (0.6, -0.4);
        let p = 0.35 * 0.35 - 2.0 * lam * (2.0 * gamma) * (2.0 * gamma);
        let d = 2.0 * 2.0 * gamma * 0.35;
        let expect = p * gv + d * xg + 2.0 * omega / (gamma * gamma) * gv;
        let kb = kbar_char(&sys, &g, &params, &state).unwrap();
        assert!((kb.re - expect).abs() < 1e-13);
    }

    #[test]
    fn auto_doubling_indices() {
        let p = ExtensionParams::new(1.0, 0.0, 1.0, 0.5, 3, 2);
        assert_eq!(p.indices(), IntegralIndices::Bar { s: 3, r: 4 });
        let p = ExtensionParams::new(1.0, 0.0, 1.0, 0.5, 4, 3);
        assert_eq!(p.indices(), IntegralIndices::Bar { s: 2, r: 3 });
        let p = ExtensionParams::new(1.0, 0.0, 1.0, 0.0, 3, 2);
        assert_eq!(p.indices(), IntegralIndices::Plain { m: 3, n: 2 });
    }

    #[test]
    fn params_validation() {
        assert!(ExtensionParams::new(0.0, 0.0, 1.0, 0.0, 1, 1).validate().is_err());
        assert!(ExtensionParams::new(1.0, 0.0, 1.0, 0.0, 0, 1).validate().is_err());
        assert!(ExtensionParams::new(0.0, 1.0, 0.0, 0.5, 1, 1).validate().is_err());
        assert!(ExtensionParams::new(0.0, 1.0, 0.0, 0.0, 1, 1).validate().is_ok());
    }

    #[test]
    fn flow_for_linear_gamma() {
        // c = 0: γ = −Cu, γ' = −C, γ'' = 0 ⇒ ṗ_u = −2k²c₀C²u
        let (sys, g) = oscillator(1.0);
        let params = ExtensionParams::new(0.0, 0.5, 2.0, 0.0, 3, 2);
        let ext = Extension::new(sys.clone(), g, params).unwrap();
        let y = [0.7, 0.0, 0.3, -0.2];
        let f = ext.flow(&y).unwrap();
        let k2 = 2.25;
        assert!((f[1] - (-2.0 * k2 * 0.5 * 4.0 * 0.7)).abs() < 1e-14);
        let xl = ham_vector_field(&sys, &y[2..]).unwrap();
        assert!((f[2] - k2 * 2.0 * xl[0]).abs() < 1e-14);
        assert!((f[3] - k2 * 2.0 * xl[1]).abs() < 1e-14);
    }

    #[test]
    fn extension_rejects_mismatched_regime() {
        let (sys, g) = oscillator(1.0);
        let params = ExtensionParams::new(0.0, 0.7, 1.0, 0.0, 1, 1);
        assert!(Extension::new(sys, g, params).is_err());
    }
}
