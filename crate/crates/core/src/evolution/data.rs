use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeField, LatticeWindow};
use crate::numeric::LogScalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumProfile {
    Delta,
    Gaussian { a: f64 },
    BesselLike { mu: f64 },
}

impl DatumProfile {
    /// Unnormalized log-amplitude at a site with Euclidean norm `r`.
    pub fn log_amplitude(self, r: f64) -> f64 {
        match self {
            DatumProfile::Delta => {
                if r == 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            DatumProfile::Gaussian { a } => -a * r * r,
            DatumProfile::BesselLike { mu } => -mu * r * (r + 1.0).ln(),
        }
    }
}

/// A real, radially decaying datum with unit l2 norm.
pub fn make_decaying_datum(window: LatticeWindow, profile: DatumProfile) -> LatticeField {
    let logs: Vec<f64> = (0..window.len())
        .map(|i| profile.log_amplitude((window.norm_sq(i) as f64).sqrt()))
        .collect();
    let sq: Vec<LogScalar> = logs.iter().map(|&l| LogScalar::from_log(2.0 * l)).collect();
    let log_norm = LogScalar::sum(&sq).sqrt().log_mag();
    let values = logs
        .iter()
        .map(|&l| Complex64::new((l - log_norm).exp(), 0.0))
        .collect();
    LatticeField::from_values(window, values).expect("finite datum")
}
