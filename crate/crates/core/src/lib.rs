//! Numerical laboratory for the deterministic N-particle Anderson model.
//!
//! Fermionic configurations live on the symmetric power graph of `Z^d`. The
//! potential is generated by a lacunary Haar expansion over a torus shift,
//! and finite-volume Hamiltonians are diagonalized densely so that
//! localization, resolvent identities and Wegner-type bounds can be checked
//! on small instances.

pub mod error;
pub mod fermi;
pub mod haarsh;
pub mod hamiltonian;
pub mod msa;
pub mod stats;
pub mod torus;
pub mod wegner;

pub use error::{Error, Result};
