//! Reproducible scans: ring masses and their decay fits, log-convexity of
//! weighted norms, uniqueness thresholds, norm equivalences and the
//! K-Bessel weight identity.

mod kbessel;
mod lambda;
mod logconvex;
mod normstar;
mod uniqueness;

pub use kbessel::{k_bessel_weight_check, k_weight_integral, KBesselReport, KBesselRow};
pub use lambda::{lambda_scan, ExperimentConfig, LambdaScan, ScanInput, ScanRow};
pub use logconvex::{
    beta_grid, log_convexity_check, log_convexity_stability, LogConvexityReport, StabilityReport,
};
pub use normstar::{norm_star, norm_star_equivalence, NormStarReport};
pub use uniqueness::{weighted_uniqueness_threshold, UniquenessReport, UniquenessSource};
