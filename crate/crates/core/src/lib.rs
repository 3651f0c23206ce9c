//! Computable two-projection theory: Halmos decomposition of projection
//! pairs, essential codimension by independent routes, diagonals of
//! projections and the Bownik–Jasper integer for finite-spectrum operators.
//!
//! Operators on `l²(N)` are modelled by a finite block glued to an exact
//! periodic 0/1 tail, so Fredholm indices are computed exactly with finite
//! arithmetic.

pub mod bj;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod io;
pub mod kadison;
pub mod operators;
pub mod sample;
pub mod selftest;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
