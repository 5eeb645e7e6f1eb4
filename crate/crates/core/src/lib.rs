//! Simulator for variational adiabatic quantum computation on small
//! molecular Hamiltonians.

pub mod cli;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod fermion;
pub mod fixtures;
pub mod linalg;
pub mod pauli;
pub mod schedule;
pub mod vanqver;

pub use error::{Error, Result};
