//! Exact computations for t-adic approximation restricted to missing-digit
//! Cantor sets.
//!
//! The crate covers the parameter profile of a base pair `(b, t)` and digit set
//! `D`, approximation functions `ψ`, the geometry of `C(b, D)`, the hit sets
//! `Γₙ(ψ)`, measure and dimension verdicts, and a verification harness.

pub mod arith;
pub mod budget;
pub mod cantor;
pub mod dimension;
pub mod error;
pub mod gamma;
pub mod params;
pub mod psi;
pub mod verify;

pub use budget::Budgets;
pub use error::{Error, Result};
