//! Numerical verification of hypercontractive and volume-product inequalities
//! for the Ornstein–Uhlenbeck semigroup, with the supporting convex-geometry
//! machinery (gauges, polars, Legendre transforms, Hamilton–Jacobi flows and
//! Fokker–Planck evolution).

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod body;
pub mod fenchel;
pub mod flows;
pub mod grid;
pub mod gaussian;
pub mod lp;
pub mod ou;
pub mod quadrature;
pub mod report;
pub mod sphere;
pub mod verify;
pub mod volumes;

pub use error::{Error, Result};
