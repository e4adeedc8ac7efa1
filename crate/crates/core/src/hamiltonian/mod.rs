//! Finite-volume fermionic Hamiltonians `H = -Δ + gV + U`.

mod assemble;
mod export;
mod interaction;
mod spectrum;

pub use assemble::{assemble, covariance_check, FiniteHamiltonian, HullPotential, Kinetic, Model, SitePotential, TruncatedHamiltonian};
pub use export::{read_binary, write_binary, write_spectrum_csv, BinaryHeader};
pub use interaction::Interaction;
pub use spectrum::{diagonalize, diagonalize_matrix, spectral_distance, Spectrum};
