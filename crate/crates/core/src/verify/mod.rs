//! Numerical verification: sampling, residuals of the extension equation and
//! of its first-order factorization, ODE integration, conservation drift,
//! finite-difference brackets and gradient rank.

pub mod bracket;
pub mod conservation;
pub mod integrate;
pub mod kuru_negro;
pub mod quadrature;
pub mod residual;
pub mod sampling;

pub use bracket::{fd_bracket, fd_gradient, independence_rank, FdBracket, RankReport};
pub use conservation::{conservation_report, drift, Observable, Series, TrajectoryReport};
pub use integrate::{integrate, rk4_step, Method, Trajectory};
pub use kuru_negro::EulerKuruNegro;
pub use quadrature::{elliptic_f, integrate_adaptive};
pub use residual::{flow_derivative, kn_residual, pde_residual, relative_residual, LocalSolution, ResidualReport};
pub use sampling::{sample_points, SampleSpec, Sampled};
