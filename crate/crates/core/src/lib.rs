pub mod carleman;
pub mod counterexample;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod lattice;
pub mod numeric;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
