use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::lattice::LatticeField;
use crate::numeric::LogScalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogConvexityReport {
    pub betas: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    /// `log rho(beta, t)`, indexed `[beta][time]`.
    pub log_rho: Vec<Vec<f64>>,
    pub max_log_rho: f64,
    pub argmax_beta: Vec<f64>,
    pub argmax_time: f64,
    /// `max log rho / ||V||_inf`, absent for a free evolution.
    pub c_emp: Option<f64>,
}

impl LogConvexityReport {
    pub fn max_rho(&self) -> f64 {
        self.max_log_rho.exp()
    }
}

fn weighted_mass(u: &LatticeField, beta: &[f64]) -> LogScalar {
    let w = u.window();
    let mut site = vec![0i64; w.dim()];
    let terms: Vec<LogScalar> = (0..w.len())
        .map(|i| {
            w.site_into(i, &mut site);
            let dot: f64 = site.iter().zip(beta).map(|(&j, &b)| j as f64 * b).sum();
            LogScalar::from_f64(u.values()[i].norm_sqr()) * LogScalar::from_log(2.0 * dot)
        })
        .collect();
    LogScalar::sum(&terms)
}

/// `beta = s e_1` for `n` equally spaced `s` in `[-beta_max, beta_max]`.
pub fn beta_grid(d: usize, beta_max: f64, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let s = -beta_max + 2.0 * beta_max * k as f64 / (n - 1) as f64;
            let mut b = vec![0.0; d];
            b[0] = s;
            b
        })
        .collect()
}

/// `rho(beta, t) = sum e^{2 beta.j} |u_j(t)|^2 / sum e^{2 beta.j} (|u_j(0)|^2 + |u_j(1)|^2)`
/// at each stored interior time.
pub fn log_convexity_check(traj: &Trajectory, betas: &[Vec<f64>]) -> Result<LogConvexityReport> {
    let n = traj.snapshots.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if !traj.config.potential.is_real() {
        return Err(Error::InvalidParameter("log-convexity needs a real potential".into()));
    }
    let (first, last) = (&traj.snapshots[0], &traj.snapshots[n - 1]);
    let interior: Vec<usize> = (1..n - 1).collect();
    let log_rho: Vec<Vec<f64>> = betas
        .par_iter()
        .map(|beta| {
            let denom = weighted_mass(first, beta) + weighted_mass(last, beta);
            interior
                .iter()
                .map(|&k| (weighted_mass(&traj.snapshots[k], beta) / denom).log_mag())
                .collect()
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (b, row) in log_rho.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if v > best.0 {
                best = (v, b, k);
            }
        }
    }
    let l = traj.config.potential.sup_norm();
    Ok(LogConvexityReport {
        betas: betas.to_vec(),
        times: interior.iter().map(|&k| traj.times[k]).collect(),
        log_rho,
        max_log_rho: best.0,
        argmax_beta: betas.get(best.1).cloned().unwrap_or_default(),
        argmax_time: traj.times[interior[best.2]],
        c_emp: (l > 0.0).then(|| best.0 / l),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub beta_max: [f64; 2],
    pub c_emp: [f64; 2],
    pub relative_change: f64,
    pub stable: bool,
}

/// Compares `C_emp` over `|beta| <= b` and `|beta| <= 2b`; stable means a change below 20%.
pub fn log_convexity_stability(traj: &Trajectory, beta_max: f64, n_beta: usize) -> Result<StabilityReport> {
    let d = traj.config.window.dim();
    let small = log_convexity_check(traj, &beta_grid(d, beta_max, n_beta))?;
    let large = log_convexity_check(traj, &beta_grid(d, 2.0 * beta_max, 2 * n_beta - 1))?;
    let (Some(a), Some(b)) = (small.c_emp, large.c_emp) else {
        return Err(Error::InvalidParameter("stability needs a nonzero potential".into()));
    };
    let relative_change = (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
    Ok(StabilityReport {
        beta_max: [beta_max, 2.0 * beta_max],
        c_emp: [a, b],
        relative_change,
        stable: relative_change < 0.2,
    })
}
