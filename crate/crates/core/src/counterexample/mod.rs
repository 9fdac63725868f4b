//! A two-dimensional solution of `Delta u + V u = 0` that equals 1 at the
//! origin and vanishes on a diamond around `(0, R)`, with `V` bounded
//! independently of `R`. Everything is checked in exact dyadic arithmetic.

mod build;
mod dyadic;
mod verify;

pub use build::{
    build_counterexample, diamond_sites, formula_value, repair_ring, ring_sites, Counterexample,
    CounterexampleSpec, RepairCertificate, ValueMode,
};
pub use dyadic::{Dyadic, DyadicRecord};
pub use verify::{
    potential_bound_scan, save_counterexample, verify_counterexample, ExactSite, PotentialScan,
    SiteResidual, VerificationReport,
};
