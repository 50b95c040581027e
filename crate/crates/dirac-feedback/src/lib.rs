//! One-dimensional diffusion with a Dirac source at the origin whose
//! strength is reduced by the boundary values, `-a (u(t, 1) + u(t, -1))`.
//!
//! The crate computes the source-to-point responses `p_a` and `p̃_a` by two
//! independent routes (subordination and Bromwich inversion), solves the
//! delay equation behind `p̃_a`, marches the renewal equation for the boundary
//! traces, checks all of it against a finite-difference solution of the full
//! problem, and surveys the `(a, β)` plane for loss of positivity.
//!
//! Worked examples live in `examples/`: `kernels`, `bromwich`, `post_widder`,
//! `dde`, `lambert_poles`, `subordination`, `renewal`, `pde_oracle`, `survey`
//! and `steady_state`.

pub mod boundary;
pub mod cli;
pub mod dde;
pub mod error;
pub mod io;
pub mod kernels;
pub mod lambert;
pub mod laplace;
pub mod pde;
pub mod quadrature;
pub mod scenario;
pub mod survey;
pub mod transfer;

pub use error::{Error, Result};
