//! Numerical toolkit for the two-dimensional stationary Schrödinger equation
//! `(−Δ + ν)u = 0` and the complex Riccati equation `∂_z̄Q + |Q|² = ν/4`.
//!
//! Fields are exact expression trees or uniform grids ([`field`]); the
//! antiderivative operators and contour integrals live in [`quadrature`]; the
//! Schrödinger/Riccati/Vekua transforms in [`riccati`]; identity checkers in
//! [`theorems`]; closed-form ground truth in [`oracle`]; the config-driven
//! runner in [`cli`].

// `!(x <= tol)` is used on purpose throughout: a NaN residual must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod oracle;
pub mod quadrature;
pub mod riccati;
pub mod theorems;

pub use error::{Error, Result};
pub use field::{ComplexField, DomainSpec, Point, ScalarField};
