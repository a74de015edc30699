//! Second-order forward jets.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar expression
//! with respect to the coordinates of a phase point. Arithmetic and the
//! elementary functions propagate all three orders at once, so a single
//! evaluation of a [`ScalarField`] yields exact (to rounding) first and second
//! derivatives. Both real (`f64`) and complex (`Complex64`) scalars are
//! supported; complex fields are still differentiated with respect to real
//! coordinates.

use std::fmt::Debug;
use std::ops::{Add, Deref, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar types a jet can carry. Implemented for `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_real(x: f64) -> Self;
    fn zero() -> Self {
        Self::from_real(0.0)
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
    fn exp(self) -> Self;
    /// Principal branch for complex scalars.
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    /// Principal branch for complex scalars.
    fn sqrt(self) -> Self;
    fn powf(self, e: f64) -> Self;
    fn powi(self, e: i32) -> Self;
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn powi(self, e: i32) -> Self {
        f64::powi(self, e)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn sinh(self) -> Self {
        Complex64::sinh(self)
    }
    fn cosh(self) -> Self {
        Complex64::cosh(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn powf(self, e: f64) -> Self {
        Complex64::powf(self, e)
    }
    fn powi(self, e: i32) -> Self {
        Complex64::powi(&self, e)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Coordinates of a point on the base (or extended) manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(Vec<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "phase point".into(),
            });
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PhasePoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Value, gradient and Hessian of a scalar expression at a point.
///
/// The Hessian is stored row-major as a flat `dim * dim` vector and is
/// symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2<S> {
    pub value: S,
    pub gradient: Vec<S>,
    pub hessian: Vec<S>,
}

impl<S: Scalar> Jet2<S> {
    pub fn constant(dim: usize, value: S) -> Self {
        Self {
            value,
            gradient: vec![S::zero(); dim],
            hessian: vec![S::zero(); dim * dim],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(dim: usize, index: usize, value: S) -> Self {
        let mut jet = Self::constant(dim, value);
        jet.gradient[index] = S::one();
        jet
    }

    /// Seeds one variable jet per coordinate.
    pub fn variables(point: &[f64]) -> Vec<Self> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Self::variable(n, i, S::from_real(x)))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> S {
        self.hessian[i * self.dim() + j]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|g| g.is_finite())
            && self.hessian.iter().all(|h| h.is_finite())
    }

    /// Composes with a scalar function given its value and first two
    /// derivatives at `self.value`.
    pub fn chain(&self, f0: S, f1: S, f2: S) -> Self {
        let n = self.dim();
        let gradient: Vec<S> = self.gradient.iter().map(|&g| f1 * g).collect();
        let mut hessian = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                hessian.push(f1 * self.hess(i, j) + f2 * self.gradient[i] * self.gradient[j]);
            }
        }
        Self {
            value: f0,
            gradient,
            hessian,
        }
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            value: self.value * s,
            gradient: self.gradient.iter().map(|&g| g * s).collect(),
            hessian: self.hessian.iter().map(|&h| h * s).collect(),
        }
    }

    pub fn shift(&self, s: S) -> Self {
        let mut out = self.clone();
        out.value = out.value + s;
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        let inv = S::one() / v;
        self.chain(inv, -inv * inv, S::from_real(2.0) * inv * inv * inv)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        let inv = S::one() / v;
        self.chain(v.ln(), inv, -inv * inv)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Self {
        let t = self.value.sin() / self.value.cos();
        let sec2 = S::one() + t * t;
        self.chain(t, sec2, S::from_real(2.0) * t * sec2)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        let half = S::from_real(0.5);
        let d1 = half / r;
        self.chain(r, d1, -d1 * half / self.value)
    }

    pub fn powi(&self, e: i32) -> Self {
        match e {
            0 => Self::constant(self.dim(), S::one()),
            1 => self.clone(),
            _ => {
                let v = self.value;
                let ef = S::from_real(e as f64);
                let d2 = if e == 2 {
                    S::from_real(2.0)
                } else {
                    ef * S::from_real((e - 1) as f64) * v.powi(e - 2)
                };
                self.chain(v.powi(e), ef * v.powi(e - 1), d2)
            }
        }
    }

    pub fn powf(&self, e: f64) -> Self {
        let v = self.value;
        self.chain(
            v.powf(e),
            S::from_real(e) * v.powf(e - 1.0),
            S::from_real(e * (e - 1.0)) * v.powf(e - 2.0),
        )
    }

    /// `self ^ exponent` with a coordinate-dependent exponent, via
    /// `exp(exponent * ln(self))` on the principal branch.
    pub fn pow_jet(&self, exponent: &Self) -> Self {
        (exponent * &self.ln()).exp()
    }
}

impl Jet2<f64> {
    pub fn to_complex(&self) -> Jet2<Complex64> {
        Jet2 {
            value: self.value.to_complex(),
            gradient: self.gradient.iter().map(|g| g.to_complex()).collect(),
            hessian: self.hessian.iter().map(|h| h.to_complex()).collect(),
        }
    }
}

fn jet_add<S: Scalar>(a: &Jet2<S>, b: &Jet2<S>) -> Jet2<S> {
    Jet2 {
        value: a.value + b.value,
        gradient: a.gradient.iter().zip(&b.gradient).map(|(&x, &y)| x + y).collect(),
        hessian: a.hessian.iter().zip(&b.hessian).map(|(&x, &y)| x + y).collect(),
    }
}

fn jet_sub<S: Scalar>(a: &Jet2<S>, b: &Jet2<S>) -> Jet2<S> {
    Jet2 {
        value: a.value - b.value,
        gradient: a.gradient.iter().zip(&b.gradient).map(|(&x, &y)| x - y).collect(),
        hessian: a.hessian.iter().zip(&b.hessian).map(|(&x, &y)| x - y).collect(),
    }
}

fn jet_mul<S: Scalar>(a: &Jet2<S>, b: &Jet2<S>) -> Jet2<S> {
    let n = a.dim();
    let gradient = a
        .gradient
        .iter()
        .zip(&b.gradient)
        .map(|(&ga, &gb)| a.value * gb + b.value * ga)
        .collect();
    let mut hessian = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            hessian.push(
                a.value * b.hess(i, j)
                    + b.value * a.hess(i, j)
                    + a.gradient[i] * b.gradient[j]
                    + b.gradient[i] * a.gradient[j],
            );
        }
    }
    Jet2 {
        value: a.value * b.value,
        gradient,
        hessian,
    }
}

fn jet_div<S: Scalar>(a: &Jet2<S>, b: &Jet2<S>) -> Jet2<S> {
    jet_mul(a, &b.recip())
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $f:ident) => {
        impl<S: Scalar> $tr<&Jet2<S>> for &Jet2<S> {
            type Output = Jet2<S>;
            fn $method(self, rhs: &Jet2<S>) -> Jet2<S> {
                $f(self, rhs)
            }
        }
        impl<S: Scalar> $tr<Jet2<S>> for Jet2<S> {
            type Output = Jet2<S>;
            fn $method(self, rhs: Jet2<S>) -> Jet2<S> {
                $f(&self, &rhs)
            }
        }
        impl<S: Scalar> $tr<&Jet2<S>> for Jet2<S> {
            type Output = Jet2<S>;
            fn $method(self, rhs: &Jet2<S>) -> Jet2<S> {
                $f(&self, rhs)
            }
        }
        impl<S: Scalar> $tr<Jet2<S>> for &Jet2<S> {
            type Output = Jet2<S>;
            fn $method(self, rhs: Jet2<S>) -> Jet2<S> {
                $f(self, &rhs)
            }
        }
    };
}

jet_binop!(Add, add, jet_add);
jet_binop!(Sub, sub, jet_sub);
jet_binop!(Mul, mul, jet_mul);
jet_binop!(Div, div, jet_div);

macro_rules! jet_f64_ops {
    ($($lhs:ty),*) => {$(
        impl<S: Scalar> Add<f64> for $lhs {
            type Output = Jet2<S>;
            fn add(self, rhs: f64) -> Jet2<S> {
                self.shift(S::from_real(rhs))
            }
        }
        impl<S: Scalar> Sub<f64> for $lhs {
            type Output = Jet2<S>;
            fn sub(self, rhs: f64) -> Jet2<S> {
                self.shift(S::from_real(-rhs))
            }
        }
        impl<S: Scalar> Mul<f64> for $lhs {
            type Output = Jet2<S>;
            fn mul(self, rhs: f64) -> Jet2<S> {
                self.scale(S::from_real(rhs))
            }
        }
        impl<S: Scalar> Div<f64> for $lhs {
            type Output = Jet2<S>;
            fn div(self, rhs: f64) -> Jet2<S> {
                self.scale(S::from_real(1.0 / rhs))
            }
        }
        impl<S: Scalar> Neg for $lhs {
            type Output = Jet2<S>;
            fn neg(self) -> Jet2<S> {
                self.scale(S::from_real(-1.0))
            }
        }
    )*};
}

jet_f64_ops!(Jet2<S>, &Jet2<S>);

macro_rules! f64_jet_ops {
    ($($rhs:ty),*) => {$(
        impl<S: Scalar> Add<$rhs> for f64 {
            type Output = Jet2<S>;
            fn add(self, rhs: $rhs) -> Jet2<S> {
                rhs.shift(S::from_real(self))
            }
        }
        impl<S: Scalar> Sub<$rhs> for f64 {
            type Output = Jet2<S>;
            fn sub(self, rhs: $rhs) -> Jet2<S> {
                rhs.scale(S::from_real(-1.0)).shift(S::from_real(self))
            }
        }
        impl<S: Scalar> Mul<$rhs> for f64 {
            type Output = Jet2<S>;
            fn mul(self, rhs: $rhs) -> Jet2<S> {
                rhs.scale(S::from_real(self))
            }
        }
        impl<S: Scalar> Div<$rhs> for f64 {
            type Output = Jet2<S>;
            fn div(self, rhs: $rhs) -> Jet2<S> {
                rhs.recip().scale(S::from_real(self))
            }
        }
    )*};
}

f64_jet_ops!(Jet2<S>, &Jet2<S>);

pub type RealRule = Arc<dyn Fn(&[Jet2<f64>]) -> Jet2<f64> + Send + Sync>;
pub type ComplexRule = Arc<dyn Fn(&[Jet2<Complex64>]) -> Jet2<Complex64> + Send + Sync>;

/// `pred(x, margin)` is true when `x` lies within `margin` of the singular set.
pub type SingularSet = Arc<dyn Fn(&[f64], f64) -> bool + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Codomain {
    Real,
    Complex,
}

#[derive(Clone)]
enum Rule {
    Real(RealRule),
    Complex(ComplexRule),
}

/// An evaluable scalar function of a phase point.
///
/// Parameters are captured by the rule closure at construction and never
/// change afterwards, so a field can be shared across threads freely.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    label: String,
    rule: Rule,
    singular: Option<SingularSet>,
}

impl Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("codomain", &self.codomain())
            .finish()
    }
}

impl ScalarField {
    pub fn real<F>(dim: usize, label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(&[Jet2<f64>]) -> Jet2<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            label: label.into(),
            rule: Rule::Real(Arc::new(rule)),
            singular: None,
        }
    }

    pub fn complex<F>(dim: usize, label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(&[Jet2<Complex64>]) -> Jet2<Complex64> + Send + Sync + 'static,
    {
        Self {
            dim,
            label: label.into(),
            rule: Rule::Complex(Arc::new(rule)),
            singular: None,
        }
    }

    /// The coordinate function `x_index`.
    pub fn coordinate(dim: usize, index: usize, label: impl Into<String>) -> Self {
        Self::real(dim, label, move |x| x[index].clone())
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::real(dim, format!("{value}"), move |_| Jet2::constant(dim, value))
    }

    pub fn with_singular<P>(mut self, pred: P) -> Self
    where
        P: Fn(&[f64], f64) -> bool + Send + Sync + 'static,
    {
        self.singular = Some(Arc::new(pred));
        self
    }

    pub fn with_singular_set(mut self, pred: Option<SingularSet>) -> Self {
        self.singular = pred;
        self
    }

    pub fn singular_set(&self) -> Option<SingularSet> {
        self.singular.clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn codomain(&self) -> Codomain {
        match self.rule {
            Rule::Real(_) => Codomain::Real,
            Rule::Complex(_) => Codomain::Complex,
        }
    }

    pub fn is_singular(&self, x: &[f64], margin: f64) -> bool {
        self.singular.as_ref().is_some_and(|p| p(x, margin))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if self.is_singular(x, 0.0) {
            return Err(Error::Singular {
                what: self.label.clone(),
                at: x.to_vec(),
            });
        }
        Ok(())
    }

    fn non_finite(&self) -> Error {
        Error::NonFinite {
            what: self.label.clone(),
        }
    }

    /// Value, exact gradient and exact Hessian of a real field at `x`.
    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2<f64>> {
        self.check_point(x)?;
        let Rule::Real(rule) = &self.rule else {
            return Err(Error::ComplexCodomain {
                what: self.label.clone(),
            });
        };
        let jet = rule(&Jet2::variables(x));
        if !jet.is_finite() {
            return Err(self.non_finite());
        }
        Ok(jet)
    }

    /// Jet of the field in complex arithmetic; real fields are lifted.
    pub fn eval_jet2_complex(&self, x: &[f64]) -> Result<Jet2<Complex64>> {
        self.check_point(x)?;
        let jet = match &self.rule {
            Rule::Real(rule) => rule(&Jet2::variables(x)).to_complex(),
            Rule::Complex(rule) => rule(&Jet2::variables(x)),
        };
        if !jet.is_finite() {
            return Err(self.non_finite());
        }
        Ok(jet)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_jet2(x)?.value)
    }

    pub fn value_complex(&self, x: &[f64]) -> Result<Complex64> {
        Ok(self.eval_jet2_complex(x)?.value)
    }

    /// Pointwise product; the singular sets are merged.
    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let label = format!("({})*({})", self.label, other.label);
        let singular = merge_singular(self.singular.clone(), other.singular.clone());
        let field = match (&self.rule, &other.rule) {
            (Rule::Real(a), Rule::Real(b)) => {
                let (a, b) = (a.clone(), b.clone());
                ScalarField::real(self.dim, label, move |x| a(x) * b(x))
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                ScalarField::complex(self.dim, label, move |x| a.apply_complex(x) * b.apply_complex(x))
            }
        };
        field.with_singular_set(singular)
    }

    /// Applies the rule to already-seeded complex jets (used to compose fields).
    pub fn apply_complex(&self, x: &[Jet2<Complex64>]) -> Jet2<Complex64> {
        match &self.rule {
            Rule::Complex(rule) => rule(x),
            Rule::Real(rule) => {
                // real rules only ever see real coordinates
                let real: Vec<Jet2<f64>> = x
                    .iter()
                    .map(|j| Jet2 {
                        value: j.value.re,
                        gradient: j.gradient.iter().map(|g| g.re).collect(),
                        hessian: j.hessian.iter().map(|h| h.re).collect(),
                    })
                    .collect();
                rule(&real).to_complex()
            }
        }
    }
}

pub fn merge_singular(a: Option<SingularSet>, b: Option<SingularSet>) -> Option<SingularSet> {
    match (a, b) {
        (None, None) => None,
        (Some(p), None) | (None, Some(p)) => Some(p),
        (Some(p), Some(q)) => Some(Arc::new(move |x: &[f64], m: f64| p(x, m) || q(x, m))),
    }
}

/// Value, gradient and Hessian of `field` at `x`.
pub fn eval_jet2(field: &ScalarField, x: &PhasePoint) -> Result<Jet2<f64>> {
    field.eval_jet2(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn square_jet() {
        let f = ScalarField::real(1, "x^2", |x| x[0].square());
        let j = f.eval_jet2(&[3.0]).unwrap();
        assert_eq!(j.value, 9.0);
        assert_eq!(j.gradient, vec![6.0]);
        assert_eq!(j.hessian, vec![2.0]);
    }

    #[test]
    fn constant_jet() {
        let f = ScalarField::constant(3, 5.0);
        let j = f.eval_jet2(&[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(j.value, 5.0);
        assert!(j.gradient.iter().all(|&g| g == 0.0));
        assert!(j.hessian.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn exp_of_product() {
        let f = ScalarField::real(2, "exp(xy)", |x| (&x[0] * &x[1]).exp());
        let j = f.eval_jet2(&[1.0, 2.0]).unwrap();
        let e2 = 2f64.exp();
        assert!(close(j.value, e2, 1e-15));
        assert!(close(j.gradient[0], 2.0 * e2, 1e-15));
        assert!(close(j.gradient[1], e2, 1e-15));
        assert!(close(j.hess(0, 0), 4.0 * e2, 1e-15));
        assert!(close(j.hess(0, 1), 3.0 * e2, 1e-15));
        assert!(close(j.hess(1, 0), 3.0 * e2, 1e-15));
        assert!(close(j.hess(1, 1), e2, 1e-15));
    }

    #[test]
    fn errors() {
        let f = ScalarField::real(2, "1/x", |x| x[0].recip()).with_singular(|x, m| x[0].abs() <= m);
        assert!(matches!(f.eval_jet2(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(f.eval_jet2(&[0.0, 1.0]), Err(Error::Singular { .. })));
        let g = ScalarField::real(1, "ln", |x| x[0].ln());
        assert!(matches!(g.eval_jet2(&[-1.0]), Err(Error::NonFinite { .. })));
        let h = ScalarField::complex(1, "z", |x| x[0].clone());
        assert!(matches!(h.eval_jet2(&[1.0]), Err(Error::ComplexCodomain { .. })));
        assert!(h.eval_jet2_complex(&[1.0]).is_ok());
    }

    #[test]
    fn elementary_derivatives() {
        let x = 0.7;
        let cases: Vec<(Box<dyn Fn(&Jet2<f64>) -> Jet2<f64>>, f64, f64, f64)> = vec![
            (Box::new(|j| j.sin()), x.sin(), x.cos(), -x.sin()),
            (Box::new(|j| j.cos()), x.cos(), -x.sin(), -x.cos()),
            (
                Box::new(|j| j.tan()),
                x.tan(),
                1.0 / x.cos().powi(2),
                2.0 * x.tan() / x.cos().powi(2),
            ),
            (Box::new(|j| j.sinh()), x.sinh(), x.cosh(), x.sinh()),
            (Box::new(|j| j.cosh()), x.cosh(), x.sinh(), x.cosh()),
            (Box::new(|j| j.sqrt()), x.sqrt(), 0.5 / x.sqrt(), -0.25 * x.powf(-1.5)),
            (Box::new(|j| j.ln()), x.ln(), 1.0 / x, -1.0 / (x * x)),
            (Box::new(|j| j.powi(3)), x.powi(3), 3.0 * x * x, 6.0 * x),
            (
                Box::new(|j| j.powf(2.5)),
                x.powf(2.5),
                2.5 * x.powf(1.5),
                3.75 * x.powf(0.5),
            ),
            (Box::new(|j| j.recip()), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)),
        ];
        for (f, v, d1, d2) in cases {
            let j = f(&Jet2::variable(1, 0, x));
            assert!(close(j.value, v, 1e-14));
            assert!(close(j.gradient[0], d1, 1e-14));
            assert!(close(j.hessian[0], d2, 1e-14));
        }
    }

    #[test]
    fn complex_power_with_variable_exponent() {
        // z^w with w = x, z = 1 + i x: compare against the closed form derivative.
        let x0 = 0.4;
        let f = ScalarField::complex(1, "z^x", |x| {
            let z = x[0].scale(Complex64::i()).shift(Complex64::new(1.0, 0.0));
            z.pow_jet(&x[0])
        });
        let j = f.eval_jet2_complex(&[x0]).unwrap();
        let z = Complex64::new(1.0, x0);
        let val = (Complex64::new(x0, 0.0) * z.ln()).exp();
        let d1 = val * (z.ln() + Complex64::new(x0, 0.0) * Complex64::i() / z);
        assert!((j.value - val).norm() < 1e-15);
        assert!((j.gradient[0] - d1).norm() < 1e-14);
    }
}
