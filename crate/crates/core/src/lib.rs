//! Desk-scale workbench for amenability questions about noncommutative
//! algebras: exact Følner ratios and witness search, Gelfand–Kirillov
//! growth profiles, Ore intersection solving, quotient/tensor/direct-sum
//! transfer constructions, and floating-point finite-rank trace
//! approximants on truncated regular representations.
//!
//! Everything outside [`trace`] runs in exact rational arithmetic.

pub mod error;
pub mod exactlin;
pub mod foelner;
pub mod growth;
pub mod kernel;
pub mod ore;
pub mod par;
pub mod rat;

pub use error::{Error, Result};
pub use rat::Rat;

/// Version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
