use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{least_squares, quadrature::integrate_log_adaptive, LogScalar};
use crate::special::bessel_k;

/// `ln int_R e^{j b - 2 cosh(b / mu) / e} db` by log-domain quadrature.
pub fn k_weight_integral(mu: f64, j: f64) -> Result<LogScalar> {
    let k = 2.0 / std::f64::consts::E;
    let log_f = move |b: f64| j * b - k * (b / mu).cosh();
    // the exponent is concave; find its peak, then cut 50 e-folds below it
    let peak_b = mu * (j * mu / k).asinh();
    let peak = log_f(peak_b);
    let mut lo = peak_b - mu;
    while log_f(lo) > peak - 50.0 {
        lo -= (peak_b - lo).max(mu);
    }
    let mut hi = peak_b + mu;
    while log_f(hi) > peak - 50.0 {
        hi += (hi - peak_b).max(mu);
    }
    integrate_log_adaptive(log_f, lo, hi, 1e-14)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBesselRow {
    pub j: i64,
    pub log_integral: f64,
    pub log_bessel: f64,
    pub relative_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBesselReport {
    pub mu: f64,
    /// Factor between the weight integral and `K_{mu j}(2/e)`, fixed at `j = 0`.
    pub constant: f64,
    pub rows: Vec<KBesselRow>,
    /// Coefficients of `ln K = a j ln j + b j + c` over the growth range.
    pub growth_fit: [f64; 3],
    /// `|a - mu| / mu`.
    pub growth_relative_error: f64,
}

pub fn k_bessel_weight_check(mu: f64, j_list: &[i64], growth_range: (i64, i64)) -> Result<KBesselReport> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} must be positive")));
    }
    let x = 2.0 / std::f64::consts::E;
    let constant = (k_weight_integral(mu, 0.0)? / bessel_k(0.0, x)).to_f64();
    let rows = j_list
        .iter()
        .map(|&j| {
            let lhs = k_weight_integral(mu, j as f64)?;
            let rhs = bessel_k(mu * j as f64, x) * LogScalar::from_f64(constant);
            Ok(KBesselRow {
                j,
                log_integral: lhs.log_mag(),
                log_bessel: rhs.log_mag(),
                relative_defect: (lhs.log_mag() - rhs.log_mag()).exp_m1().abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = growth_range;
    if hi - lo < 3 || lo < 2 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: (hi - lo).max(0) as usize,
        });
    }
    let mut design = Vec::new();
    let mut rhs = Vec::new();
    for j in lo..=hi {
        let jf = j as f64;
        design.push(vec![jf * jf.ln(), jf, 1.0]);
        rhs.push(k_weight_integral(mu, jf)?.log_mag());
    }
    let coef = least_squares(&design, &rhs)?;
    Ok(KBesselReport {
        mu,
        constant,
        rows,
        growth_fit: [coef[0], coef[1], coef[2]],
        growth_relative_error: (coef[0] - mu).abs() / mu,
    })
}
