//! Spectral Petrov-Galerkin discretization and fast projected-gradient solver
//! for optimal control problems constrained by a two-sided fractional
//! diffusion-advection-reaction equation on `(0, 1)`.
//!
//! The state is expanded as `u_N = ω^{σ,σ*} Σ û_n Q_n^{σ,σ*}` and the adjoint as
//! `z_N = ω^{σ*,σ} Σ ẑ_n Q_n^{σ*,σ}`, where `(σ, σ*)` are the boundary
//! singularity exponents fixed by `(θ, α)`. In this basis the fractional
//! operator is diagonal; advection, reaction and the control coupling are
//! applied through Jacobi connection matrices in quasi-linear time.

// Negated comparisons deliberately reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod frac;
pub mod jacobi;
pub mod operators;
mod parallel;
pub mod problem;
pub mod solver;
pub mod transforms;

pub use error::{FracError, Result};
