//! Extended Hamiltonians on Poisson manifolds.
//!
//! Builds extensions `H` of a Hamiltonian `L` from a seed `G` solving
//! `X_L² G = −2(cL + c₀) G`, evaluates the characteristic first integrals in
//! closed form and verifies the defining identities numerically on a catalog
//! of quartic, point-vortex, Lotka–Volterra and Euler-top systems.

pub mod catalog;
pub mod cli;
pub mod diffkit;
pub mod error;
pub mod extension;
pub mod gamma;
pub mod poisson;
pub mod verify;

pub use error::{Error, Result};
