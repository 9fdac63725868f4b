//! Trapezoidal time stepping for `i u_t + Delta_d u + V u = 0` and the data it starts from.

mod banded;
mod data;
mod stepper;
mod trajectory;

pub use banded::BandedLu;
pub use data::{make_decaying_datum, DatumProfile};
pub use stepper::{apply_hamiltonian, EvolutionConfig, Scheme, Stepper};
pub use trajectory::{
    evolve, evolve_backward, normalize_observation, observation_integral, potential_hash,
    Observation, Trajectory, TrajectoryManifest, OBSERVATION_WINDOW,
};

use num_complex::Complex64;

use crate::special::bessel_j;

/// Free fundamental solution in one dimension, `i^j J_{|j|}(2t) e^{-2it}`.
pub fn free_fundamental_solution(j: i64, t: f64) -> Complex64 {
    let phase = Complex64::i().powi((j.abs() % 4) as i32) * Complex64::from_polar(1.0, -2.0 * t);
    phase * bessel_j(j.abs(), 2.0 * t)
}
