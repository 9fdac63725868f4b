//! Truncated `Z^d` windows, complex fields, the discrete Laplacian and ring masses.

mod field;
pub mod io;
mod window;

pub use field::{
    discrete_laplacian, in_ring, ring_mass, ring_mass_spacetime, weighted_l2,
    weighted_l2_spacetime, LatticeField, Potential,
};
pub use window::{BoundaryPolicy, LatticeWindow};
