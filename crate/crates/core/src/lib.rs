//! Numerical laboratory for the Ericksen–Leslie nematic liquid-crystal system.
//!
//! The crate covers two reductions of the full system:
//!
//! * the axisymmetric angle equation
//!   `λ₁(φ_t + rφ_r) = φ_rr + φ_r/r − sin(2φ)/(2r²) − 3λ₂ sinφ cosφ` on `r ∈ [0, 1]`
//!   ([`axisym`]), together with its closed-form barriers ([`barriers`]) and
//!   finite-time blow-up diagnostics ([`blowup`]);
//! * the one-dimensional Poiseuille system for `(w, φ)` ([`poiseuille`]), including
//!   the explicit solution `φ(x, t) = t` that breaks the maximum principle.
//!
//! [`hopf`] builds small-energy director fields of nontrivial topology from the
//! Hopf map and conformal dilations of `S³`, and [`harness`] wires everything to
//! a config-driven command line tool.

pub mod axisym;
pub mod barriers;
pub mod blowup;
pub mod coeffs;
mod error;
pub mod harness;
pub mod hopf;
pub mod poiseuille;
pub mod quadrature;
mod tridiag;

pub use error::{Error, Result};
