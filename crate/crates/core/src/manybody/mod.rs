//! Exact statevector simulation of the dipolar Ising and XXZ protocols, with
//! the closed-form noise and gap-protection estimates.
//!
//! Basis index bit j set means site j is ↑ (S^z_j = +1/2). Couplings are
//! J/2π in Hz and times are in seconds.

mod ising;
mod noise;
mod protection;
mod squeezing;
mod stabilizer;
mod state;
mod xxz;

pub use ising::{cluster_time, evolve_ising, frame_correction, ising_energies};
pub use noise::{
    static_noise_ensemble, white_noise_decay, white_noise_single_spin, white_noise_stabilizer, Dynamics, EnsembleStat, NoiseKind,
    NoiseModel, Observable, StaticProfile,
};
pub use protection::{gap_protection, site_splitting, GapProtectionReport};
pub use squeezing::{oat_squeezing_with_noise, optimal_time, squeezing_parameter, SqueezingReport};
pub use stabilizer::{stabilizer_expectation, stabilizer_with_dephasing, Boundary};
pub use state::{SpinState, MAX_SITES};
pub use xxz::{evolve_xxz, XxzPropagator, KRYLOV_THRESHOLD};

use core::f64::consts::TAU;

/// Angular frequency (rad/s) of a coupling given as J/2π in Hz.
pub(crate) fn angular(hz: f64) -> f64 {
    TAU * hz
}
