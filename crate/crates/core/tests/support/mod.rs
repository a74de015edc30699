//! Exact polynomial algebra over ℚ used as an oracle for the closed forms.
//!
//! Variables: `G`, `Y = X_L G`, `Λ`, `p_u`, `γ` and `w = 2Ω/γ²`. The
//! derivation acts by `D(G) = Y`, `D(Y) = −2ΛG` and kills the rest.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Rational64;

pub const G: usize = 0;
pub const Y: usize = 1;
pub const LAMBDA: usize = 2;
pub const P_U: usize = 3;
pub const GAMMA: usize = 4;
pub const W: usize = 5;

pub type Mono = [u32; 6];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly(pub BTreeMap<Mono, Rational64>);

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational64) -> Self {
        let mut p = Self::zero();
        p.push([0; 6], c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; 6];
        m[i] = 1;
        let mut p = Self::zero();
        p.push(m, r(1));
        p
    }

    fn push(&mut self, m: Mono, c: Rational64) {
        let e = self.0.entry(m).or_insert(r(0));
        *e += c;
        if *e == r(0) {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.push(*m, *c);
        }
        out
    }

    pub fn scale(&self, s: Rational64) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            out.push(*m, *c * s);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &o.0 {
                let mut m = *ma;
                for i in 0..6 {
                    m[i] += mb[i];
                }
                out.push(m, *ca * *cb);
            }
        }
        out
    }

    pub fn derive(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            let (a, b) = (m[G], m[Y]);
            if a > 0 {
                let mut t = *m;
                t[G] -= 1;
                t[Y] += 1;
                out.push(t, *c * r(a as i64));
            }
            if b > 0 {
                let mut t = *m;
                t[Y] -= 1;
                t[G] += 1;
                t[LAMBDA] += 1;
                out.push(t, *c * r(-2 * b as i64));
            }
        }
        out
    }

    pub fn eval(&self, vals: [Complex64; 6]) -> Complex64 {
        self.0.iter().fold(Complex64::new(0.0, 0.0), |acc, (m, c)| {
            let coeff = *c.numer() as f64 / *c.denom() as f64;
            let mut term = Complex64::new(coeff, 0.0);
            for i in 0..6 {
                term *= vals[i].powu(m[i]);
            }
            acc + term
        })
    }
}

/// `U_{m,n} P = p_u P + (m/n²) γ D(P)`.
pub fn u_op(p: &Poly, m: u32, n: u32) -> Poly {
    let k = Rational64::new(m as i64, (n * n) as i64);
    Poly::var(P_U).mul(p).add(&Poly::var(GAMMA).mul(&p.derive()).scale(k))
}

/// `G_n` from `G_1 = G`, `G_{j+1} = Y G_j + (1/j) G D(G_j)`.
pub fn gn(n: u32) -> Poly {
    let mut g = Poly::var(G);
    for j in 1..n {
        let next = Poly::var(Y)
            .mul(&g)
            .add(&Poly::var(G).mul(&g.derive()).scale(Rational64::new(1, j as i64)));
        g = next;
    }
    g
}

/// `U_{m,n}^m (G_n)`.
pub fn k_oracle(m: u32, n: u32) -> Poly {
    (0..m).fold(gn(n), |acc, _| u_op(&acc, m, n))
}

/// `(U_{2s,r}² + w)^s (G_r)`.
pub fn kbar_oracle(s: u32, r_: u32) -> Poly {
    (0..s).fold(gn(r_), |acc, _| {
        let twice = u_op(&u_op(&acc, 2 * s, r_), 2 * s, r_);
        twice.add(&Poly::var(W).mul(&acc))
    })
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}
