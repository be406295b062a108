//! Orlicz calculus and a variational eigenpair solver for
//! `-div(a(|∇u|)∇u) = λ|u|^{q(x)-2}u` with homogeneous Dirichlet data.
//!
//! * [`orlicz`]: Young functions, growth indices, Luxemburg norms and
//!   variable-exponent modulars.
//! * [`field`]: structured 1D/2D meshes, discrete gradients, bumps.
//! * [`spectrum`]: the discrete energy, its exact gradient, and the
//!   minimization pipelines producing eigenpairs.

pub mod error;
pub mod field;
pub mod linalg;
pub mod orlicz;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, Result};
