//! Exact rational computations for solvable Lie algebras with a fixed
//! nilpotent nilradical: construction, derivations, classification of
//! extensions and generalized Casimir invariants.

pub mod algebra;
pub mod catalog;
pub mod classify;
pub mod cli;
pub mod derivations;
pub mod error;
pub mod invariants;
pub mod linear;
pub mod poly;
pub mod sweep;
pub mod tables;

pub use error::{Error, Result};
