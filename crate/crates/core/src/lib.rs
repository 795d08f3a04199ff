//! Mesh-free radial basis function solvers for hyperbolic conservation laws.
//!
//! Semidiscretizations of u_t + f(u)_x = 0 built from global RBF interpolants:
//! the classical strong (collocation) form, and weak Galerkin forms in which
//! boundary conditions enter through numerical fluxes instead of being imposed
//! on the solution values. With constants in the trial space the weak forms
//! conserve ∫u exactly at the semidiscrete level, and with an E-flux they are
//! energy stable; both properties are exposed as runtime diagnostics.

// `!(a < b)` rejects NaN along with the out-of-range values; `a >= b` would
// let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod fluxes;
pub mod kernels;
pub mod problems;
pub mod quadrature;
pub mod runner;
pub mod semidiscretization;
pub mod space;
pub mod time_integration;

/// A point in the (at most two-dimensional) computational domain.
/// One-dimensional code keeps coordinate 1 at zero.
pub type Point = [f64; 2];

pub use error::{Error, Result};
pub use kernels::{Kernel, KernelKind};
pub use space::{build_space, Domain, Interpolant, NodeSet, RbfSpace};
