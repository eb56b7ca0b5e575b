//! Fermionic Gaussian states: quadratic Hamiltonians, correlation matrices,
//! entanglement measures, real and imaginary time evolution, exactly solvable
//! chains and compression into local modes.

pub mod analytic;
pub mod compression;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod state;

pub use error::{FgsError, Result};
