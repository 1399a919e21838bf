//! Exact computations with Witt vectors, δ-rings, Dieudonné complexes,
//! graded mixed complexes and weight-bounded de Rham–Witt complexes.
//!
//! Everything is exact: coefficients are p-local rationals, big integers or
//! residues modulo a prime power. Nothing in this crate touches floating
//! point.

pub mod arith;
pub mod derham;
pub mod dieudonne;
pub mod drw;
mod error;
pub mod mixed;
pub mod report;
pub mod selftest;
pub mod witt;

pub use error::{Error, Result};

/// Version tag written into every JSON document produced by the crate.
pub const SCHEMA_VERSION: u32 = 1;
