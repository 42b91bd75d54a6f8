//! Field-dependent spin-rotational structure of ¹Σ and ²Σ polar molecules,
//! the effective spin-1/2 models derived from it, and exact small-lattice
//! simulation of the dipolar Ising / XXZ entangling protocols.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the molecule
//! registry and the command-line front end live in `molspin-cli`.
//!
//! Unit conventions used throughout:
//!
//! * single-molecule energies are ordinary frequencies in MHz (E/h);
//! * electric fields in kV/cm, magnetic fields in Gauss, dipoles in Debye;
//! * lattice couplings are reported as J/2π in Hz, and many-body time
//!   evolution uses the angular frequency 2π·J with time in seconds.
#![no_std]

extern crate alloc;

pub mod angular;
pub mod couplings;
pub mod effective;
pub mod eigen;
mod error;
pub mod hamiltonian;
pub mod manybody;
pub mod molecule;
pub mod spectrum;
pub mod units;

pub use angular::{build_basis, BasisKet, BasisSet, Half};
pub use error::{Error, Result};
pub use molecule::{FieldPoint, MoleculeSpec, SpeciesKind};
