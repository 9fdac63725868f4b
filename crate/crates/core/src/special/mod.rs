//! Modified Bessel `I`, Bessel `J` and Macdonald `K` functions.

mod bessel_i;
mod bessel_j;
mod bessel_k;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bessel_i::{
    bessel_i, bessel_i_asymptotic, bessel_i_complex_series, bessel_i_eval, bessel_i_integral,
    bessel_i_log,
};
pub use bessel_j::{bessel_j, bessel_j_via_i};
pub use bessel_k::bessel_k;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselMethod {
    Integral,
    Series,
    Asymptotic,
}

/// A single Bessel evaluation and the route that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    pub order: f64,
    pub argument: Complex64,
    pub value: Complex64,
    pub method_tag: BesselMethod,
}

/// `ln(n!)` by direct summation; exact enough for the orders used here.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut acc = crate::numeric::CompensatedSum::new();
    for k in 2..=n {
        acc.add((k as f64).ln());
    }
    acc.value()
}
