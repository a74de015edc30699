//! Poisson structures, Hamiltonian vector fields and brackets.
//!
//! Sign convention: `{F, G} = ∇F · π ∇G` and `X_L F = {F, L}`, so the flow
//! of `L` is `ẋ = π ∇L`. With the canonical matrix `((0, I), (-I, 0))` on
//! coordinates `(q…, p…)` this gives `X_L q = ∂L/∂p`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::diffkit::{Jet2, Scalar, ScalarField};
use crate::error::{Error, Result};

/// Strictly upper-triangular bivector entries `π_ij, i < j`, row-major.
pub type BivectorRule = Arc<dyn Fn(&[Jet2<f64>]) -> Vec<Jet2<f64>> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    /// Constant Darboux matrix.
    Canonical,
    Custom,
}

#[derive(Clone)]
enum Repr {
    /// `((0, I), (-I, 0))` on `(q_1..q_dof, p_1..p_dof)`.
    Canonical {
        dof: usize,
    },
    Custom(BivectorRule),
    /// `(u, p_u)` Darboux block followed by the base structure.
    Extended(Arc<PoissonStructure>),
}

#[derive(Clone)]
pub struct PoissonStructure {
    dim: usize,
    repr: Repr,
}

impl std::fmt::Debug for PoissonStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonStructure")
            .field("dim", &self.dim)
            .field("kind", &self.kind())
            .finish()
    }
}

impl PoissonStructure {
    pub fn canonical(dof: usize) -> Self {
        Self {
            dim: 2 * dof,
            repr: Repr::Canonical { dof },
        }
    }

    /// A bivector given by its strictly upper-triangular entries.
    pub fn custom<F>(dim: usize, upper: F) -> Self
    where
        F: Fn(&[Jet2<f64>]) -> Vec<Jet2<f64>> + Send + Sync + 'static,
    {
        Self {
            dim,
            repr: Repr::Custom(Arc::new(upper)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> StructureKind {
        if self.is_constant() {
            StructureKind::Canonical
        } else {
            StructureKind::Custom
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.repr {
            Repr::Canonical { .. } => true,
            Repr::Custom(_) => false,
            Repr::Extended(base) => base.is_constant(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// The bivector matrix at `x`, row-major `dim × dim`.
    pub fn matrix(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let n = self.dim;
        let mut m = vec![0.0; n * n];
        match &self.repr {
            Repr::Canonical { dof } => {
                for i in 0..*dof {
                    m[i * n + dof + i] = 1.0;
                    m[(dof + i) * n + i] = -1.0;
                }
            }
            Repr::Custom(rule) => {
                let upper = rule(&Jet2::variables(x));
                fill_antisymmetric(n, upper.iter().map(|j| j.value), &mut m);
            }
            Repr::Extended(base) => {
                m[1] = 1.0;
                m[n] = -1.0;
                let b = base.matrix(&x[2..])?;
                let bn = base.dim;
                for i in 0..bn {
                    for j in 0..bn {
                        m[(i + 2) * n + j + 2] = b[i * bn + j];
                    }
                }
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "Poisson bivector".into(),
            });
        }
        Ok(m)
    }

    /// Bivector entries as jets (value and derivatives in the coordinates).
    pub fn matrix_jet(&self, x: &[f64]) -> Result<Vec<Jet2<f64>>> {
        self.check_dim(x)?;
        let n = self.dim;
        match &self.repr {
            Repr::Custom(rule) => {
                let upper = rule(&Jet2::variables(x));
                let zero = Jet2::constant(n, 0.0);
                let mut m = vec![zero; n * n];
                let mut k = 0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        m[j * n + i] = -&upper[k];
                        m[i * n + j] = upper[k].clone();
                        k += 1;
                    }
                }
                Ok(m)
            }
            Repr::Extended(base) if !base.is_constant() => {
                let bn = base.dim;
                let inner = base.matrix_jet(&x[2..])?;
                let mut m: Vec<Jet2<f64>> = vec![Jet2::constant(n, 0.0); n * n];
                m[1] = Jet2::constant(n, 1.0);
                m[n] = Jet2::constant(n, -1.0);
                for i in 0..bn {
                    for j in 0..bn {
                        m[(i + 2) * n + j + 2] = pad_jet(&inner[i * bn + j], 2, n);
                    }
                }
                Ok(m)
            }
            _ => Ok(self.matrix(x)?.into_iter().map(|v| Jet2::constant(n, v)).collect()),
        }
    }
}

fn fill_antisymmetric(n: usize, upper: impl Iterator<Item = f64>, m: &mut [f64]) {
    let mut it = upper;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = it.next().expect("bivector rule returned too few entries");
            m[i * n + j] = v;
            m[j * n + i] = -v;
        }
    }
}

/// Re-embeds a jet over `k` coordinates as a jet over `dim` coordinates whose
/// first `offset` coordinates it does not depend on.
fn pad_jet(j: &Jet2<f64>, offset: usize, dim: usize) -> Jet2<f64> {
    let k = j.dim();
    let mut out = Jet2::constant(dim, j.value);
    for a in 0..k {
        out.gradient[a + offset] = j.gradient[a];
        for b in 0..k {
            out.hessian[(a + offset) * dim + b + offset] = j.hess(a, b);
        }
    }
    out
}

/// Structure on `(u, p_u, x…)`: Darboux block on `(u, p_u)`, `π` on `x`,
/// zero coupling.
pub fn extend_structure(base: &PoissonStructure) -> PoissonStructure {
    PoissonStructure {
        dim: base.dim + 2,
        repr: Repr::Extended(Arc::new(base.clone())),
    }
}

/// `Σ_{i<j} π_ij (a_i b_j − a_j b_i)`, i.e. `a · π b` for antisymmetric `π`.
pub fn contract<S: Scalar>(n: usize, pi: &[f64], a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = pi[i * n + j];
            if p != 0.0 {
                acc = acc + S::from_real(p) * (a[i] * b[j] - a[j] * b[i]);
            }
        }
    }
    acc
}

/// A Hamiltonian `L` on a Poisson manifold plus named observables.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    pub structure: PoissonStructure,
    pub hamiltonian: ScalarField,
    pub observables: BTreeMap<String, ScalarField>,
    pub coord_names: Vec<String>,
}

impl HamiltonianSystem {
    pub fn new(structure: PoissonStructure, hamiltonian: ScalarField, coord_names: Vec<String>) -> Result<Self> {
        if hamiltonian.dim() != structure.dim() {
            return Err(Error::DimensionMismatch {
                expected: structure.dim(),
                got: hamiltonian.dim(),
            });
        }
        if coord_names.len() != structure.dim() {
            return Err(Error::InvalidParams(format!(
                "{} coordinate names for dimension {}",
                coord_names.len(),
                structure.dim()
            )));
        }
        Ok(Self {
            structure,
            hamiltonian,
            observables: BTreeMap::new(),
            coord_names,
        })
    }

    pub fn with_observable(mut self, name: &str, field: ScalarField) -> Self {
        self.observables.insert(name.to_string(), field);
        self
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// The right-hand side of the base flow, `π ∇L`.
    pub fn flow(&self, x: &[f64]) -> Result<Vec<f64>> {
        ham_vector_field(self, x)
    }
}

/// `X_L(x) = π(x) ∇L(x)`.
pub fn ham_vector_field(sys: &HamiltonianSystem, x: &[f64]) -> Result<Vec<f64>> {
    let l = sys.hamiltonian.eval_jet2(x)?;
    let pi = sys.structure.matrix(x)?;
    Ok(mat_vec(sys.dim(), &pi, &l.gradient))
}

fn mat_vec(n: usize, m: &[f64], v: &[f64]) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum()).collect()
}

/// `{F, G}(x) = ∇F · π ∇G` for real fields.
pub fn bracket(structure: &PoissonStructure, f: &ScalarField, g: &ScalarField, x: &[f64]) -> Result<f64> {
    let pi = structure.matrix(x)?;
    let df = f.eval_jet2(x)?.gradient;
    let dg = g.eval_jet2(x)?.gradient;
    Ok(contract(structure.dim(), &pi, &df, &dg))
}

/// `{F, G}(x)` with either field possibly complex-valued.
pub fn bracket_complex(structure: &PoissonStructure, f: &ScalarField, g: &ScalarField, x: &[f64]) -> Result<Complex64> {
    let pi = structure.matrix(x)?;
    let df = f.eval_jet2_complex(x)?.gradient;
    let dg = g.eval_jet2_complex(x)?.gradient;
    Ok(contract(structure.dim(), &pi, &df, &dg))
}

fn xl_from_jets<S: Scalar>(n: usize, pi: &[f64], dl: &[f64], df: &[S]) -> S {
    let v = mat_vec(n, pi, dl);
    df.iter()
        .zip(&v)
        .fold(S::zero(), |acc, (&a, &b)| acc + a * S::from_real(b))
}

/// `X_L F (x) = ∇F · π ∇L`.
pub fn apply_xl(sys: &HamiltonianSystem, f: &ScalarField, x: &[f64]) -> Result<f64> {
    let pi = sys.structure.matrix(x)?;
    let dl = sys.hamiltonian.eval_jet2(x)?.gradient;
    let df = f.eval_jet2(x)?.gradient;
    Ok(xl_from_jets(sys.dim(), &pi, &dl, &df))
}

pub fn apply_xl_complex(sys: &HamiltonianSystem, f: &ScalarField, x: &[f64]) -> Result<Complex64> {
    let pi = sys.structure.matrix(x)?;
    let dl = sys.hamiltonian.eval_jet2(x)?.gradient;
    let df = f.eval_jet2_complex(x)?.gradient;
    Ok(xl_from_jets(sys.dim(), &pi, &dl, &df))
}

/// `X_L` velocity `v = π∇L` and its Jacobian `∂_k v_i`, row-major.
fn velocity_with_jacobian(sys: &HamiltonianSystem, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = sys.dim();
    let l = sys.hamiltonian.eval_jet2(x)?;
    let pi = sys.structure.matrix_jet(x)?;
    let mut v = vec![0.0; n];
    let mut jac = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let p = &pi[i * n + j];
            v[i] += p.value * l.gradient[j];
            for k in 0..n {
                jac[i * n + k] += p.gradient[k] * l.gradient[j] + p.value * l.hess(j, k);
            }
        }
    }
    if v.iter().chain(&jac).any(|a| !a.is_finite()) {
        return Err(Error::NonFinite {
            what: "Hamiltonian vector field".into(),
        });
    }
    Ok((v, jac))
}

fn xl2_from_jet<S: Scalar>(f: &Jet2<S>, v: &[f64], jac: &[f64]) -> S {
    let n = v.len();
    let mut acc = S::zero();
    for i in 0..n {
        // Hessian term vᵀ H v
        for k in 0..n {
            acc = acc + f.hess(i, k) * S::from_real(v[i] * v[k]);
        }
        // transport term ∇F · (Dv) v
        let dv: f64 = (0..n).map(|k| jac[i * n + k] * v[k]).sum();
        acc = acc + f.gradient[i] * S::from_real(dv);
    }
    acc
}

/// `X_L(X_L F)(x)`, assembled by the product rule from the jets of `F`, `L`
/// and the bivector entries.
pub fn apply_xl2(sys: &HamiltonianSystem, f: &ScalarField, x: &[f64]) -> Result<f64> {
    let (v, jac) = velocity_with_jacobian(sys, x)?;
    let jf = f.eval_jet2(x)?;
    Ok(xl2_from_jet(&jf, &v, &jac))
}

pub fn apply_xl2_complex(sys: &HamiltonianSystem, f: &ScalarField, x: &[f64]) -> Result<Complex64> {
    let (v, jac) = velocity_with_jacobian(sys, x)?;
    let jf = f.eval_jet2_complex(x)?;
    Ok(xl2_from_jet(&jf, &v, &jac))
}

/// Gradient of `{G, H}` at `x`.
fn bracket_gradient(structure: &PoissonStructure, g: &Jet2<f64>, h: &Jet2<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let n = structure.dim();
    let pi = structure.matrix_jet(x)?;
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let p = &pi[i * n + j];
                *o += g.hess(i, k) * p.value * h.gradient[j]
                    + g.gradient[i] * p.gradient[k] * h.gradient[j]
                    + g.gradient[i] * p.value * h.hess(j, k);
            }
        }
    }
    Ok(out)
}

/// Cyclic sum `{F,{G,H}} + {G,{H,F}} + {H,{F,G}}` at `x`.
pub fn jacobi_residual(
    structure: &PoissonStructure,
    f: &ScalarField,
    g: &ScalarField,
    h: &ScalarField,
    x: &[f64],
) -> Result<f64> {
    let n = structure.dim();
    let pi = structure.matrix(x)?;
    let (jf, jg, jh) = (f.eval_jet2(x)?, g.eval_jet2(x)?, h.eval_jet2(x)?);
    let gh = bracket_gradient(structure, &jg, &jh, x)?;
    let hf = bracket_gradient(structure, &jh, &jf, x)?;
    let fg = bracket_gradient(structure, &jf, &jg, x)?;
    Ok(contract(n, &pi, &jf.gradient, &gh) + contract(n, &pi, &jg.gradient, &hf) + contract(n, &pi, &jh.gradient, &fg))
}

/// Largest entry of `|π + πᵀ|` at `x`.
pub fn antisymmetry_defect(structure: &PoissonStructure, x: &[f64]) -> Result<f64> {
    let n = structure.dim();
    let m = structure.matrix(x)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[i * n + j] + m[j * n + i]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_particle() -> HamiltonianSystem {
        let l = ScalarField::real(2, "p^2/2", |x| x[1].square() * 0.5);
        HamiltonianSystem::new(PoissonStructure::canonical(1), l, vec!["q".into(), "p".into()]).unwrap()
    }

    fn oscillator(omega: f64) -> HamiltonianSystem {
        let l = ScalarField::real(2, "osc", move |x| {
            (x[1].square() + x[0].square() * (omega * omega)) * 0.5
        });
        HamiltonianSystem::new(PoissonStructure::canonical(1), l, vec!["q".into(), "p".into()]).unwrap()
    }

    #[test]
    fn free_particle_vector_field() {
        let sys = free_particle();
        assert_eq!(ham_vector_field(&sys, &[1.0, 3.0]).unwrap(), vec![3.0, 0.0]);
        let q = ScalarField::coordinate(2, 0, "q");
        assert_eq!(apply_xl(&sys, &q, &[1.0, 3.0]).unwrap(), 3.0);
        assert_eq!(apply_xl(&sys, &sys.hamiltonian, &[1.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn canonical_bracket() {
        let s = PoissonStructure::canonical(2);
        let q1 = ScalarField::coordinate(4, 0, "q1");
        let p1 = ScalarField::coordinate(4, 2, "p1");
        let p2 = ScalarField::coordinate(4, 3, "p2");
        assert_eq!(bracket(&s, &q1, &p1, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(bracket(&s, &q1, &p2, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 0.0);
    }

    #[test]
    fn oscillator_second_derivative() {
        let sys = oscillator(2.0);
        let q = ScalarField::coordinate(2, 0, "q");
        assert!((apply_xl2(&sys, &q, &[1.0, 1.0]).unwrap() + 4.0).abs() < 1e-14);
        let one = ScalarField::constant(2, 1.0);
        assert_eq!(apply_xl2(&sys, &one, &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn extended_structure_layout() {
        let base = PoissonStructure::canonical(1);
        let ext = extend_structure(&base);
        assert_eq!(ext.dim(), 4);
        assert_eq!(ext.kind(), StructureKind::Canonical);
        let m = ext.matrix(&[0.0; 4]).unwrap();
        #[rustfmt::skip]
        let expect = vec![
            0.0, 1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, -1.0, 0.0,
        ];
        assert_eq!(m, expect);
    }

    #[test]
    fn custom_needs_matching_dimension() {
        let s = PoissonStructure::custom(2, |x| vec![x[0].clone()]);
        assert!(matches!(s.matrix(&[1.0]), Err(Error::DimensionMismatch { .. })));
        let l = ScalarField::constant(3, 1.0);
        assert!(HamiltonianSystem::new(s, l, vec![]).is_err());
    }
}
