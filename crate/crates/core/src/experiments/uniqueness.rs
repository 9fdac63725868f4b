use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lambda::{lambda_scan, ExperimentConfig, ScanInput};
use crate::error::Result;
use crate::evolution::{
    evolve, make_decaying_datum, normalize_observation, DatumProfile, EvolutionConfig, Observation,
};
use crate::lattice::{ring_mass, LatticeField, LatticeWindow};
use crate::numeric::{fit_decay, DecayModel, LogScalar};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UniquenessSource {
    /// `u_j = e^{-mu |j| log(|j|+1)}` held constant in time.
    Frozen,
    /// Evolution of the normalized decaying datum under `V = 0`.
    Evolved { dt: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub mu: f64,
    pub source: UniquenessSource,
    pub r_list: Vec<f64>,
    pub log_lambda: Vec<f64>,
    /// Log of `sup_t` of the ring mass, the upper-bound side.
    pub log_sup_ring: Vec<f64>,
    /// Fitted `c` in `lambda(R) ~ e^{-c R log R}`.
    pub c_low: Option<f64>,
    /// Fitted `mu c_0` from the time-uniform ring bound.
    pub mu_c0: Option<f64>,
    /// `c_low / c_0`; decay rates above it would contradict the lower bound.
    pub critical_ratio: Option<f64>,
    pub contradiction: bool,
    /// The decay hypothesis is not met (`mu <= 0`).
    pub vacuous: bool,
}

fn frozen_field(window: LatticeWindow, mu: f64) -> LatticeField {
    LatticeField::from_fn(window, |j| {
        let r = j.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
        Complex64::new((-mu * r * (r + 1.0).ln()).exp(), 0.0)
    })
}

pub fn weighted_uniqueness_threshold(
    cfg: &ExperimentConfig,
    window: LatticeWindow,
    source: UniquenessSource,
) -> Result<UniquenessReport> {
    cfg.validate()?;
    let mut report = UniquenessReport {
        mu: cfg.mu,
        source,
        r_list: cfg.r_list.clone(),
        log_lambda: Vec::new(),
        log_sup_ring: Vec::new(),
        c_low: None,
        mu_c0: None,
        critical_ratio: None,
        contradiction: false,
        vacuous: cfg.mu <= 0.0,
    };
    if report.vacuous {
        return Ok(report);
    }
    let (lambdas, sups): (Vec<LogScalar>, Vec<LogScalar>) = match source {
        UniquenessSource::Frozen => {
            let u = frozen_field(window, cfg.mu);
            let scan = lambda_scan(ScanInput::Stationary(&u), cfg)?;
            let sups = cfg
                .r_list
                .iter()
                .map(|&r| ring_mass(&u, r))
                .collect::<Result<Vec<_>>>()?;
            (scan.rows.iter().map(|r| r.lambda).collect(), sups)
        }
        UniquenessSource::Evolved { dt } => {
            let datum = make_decaying_datum(window, DatumProfile::BesselLike { mu: cfg.mu });
            let ecfg = EvolutionConfig::free(window, dt, 1.0)?;
            let traj = normalize_observation(&evolve(&datum, &ecfg)?, Observation::OriginSite)?;
            let scan = lambda_scan(ScanInput::Evolution(&traj), cfg)?;
            let sups = cfg
                .r_list
                .iter()
                .map(|&r| {
                    let per_time = traj
                        .snapshots
                        .iter()
                        .map(|u| ring_mass(u, r))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(per_time
                        .into_iter()
                        .fold(LogScalar::ZERO, |a, b| if b > a { b } else { a }))
                })
                .collect::<Result<Vec<_>>>()?;
            (scan.rows.iter().map(|r| r.lambda).collect(), sups)
        }
    };
    let rows = |v: &[LogScalar]| -> Vec<(f64, LogScalar)> { cfg.r_list.iter().copied().zip(v.iter().copied()).collect() };
    report.log_lambda = lambdas.iter().map(|l| l.log_mag()).collect();
    report.log_sup_ring = sups.iter().map(|l| l.log_mag()).collect();
    report.c_low = fit_decay(&rows(&lambdas), DecayModel::RLogR).ok().map(|f| f.exponent_constant);
    report.mu_c0 = fit_decay(&rows(&sups), DecayModel::RLogR).ok().map(|f| f.exponent_constant);
    if let (Some(c), Some(k)) = (report.c_low, report.mu_c0) {
        if k > 0.0 {
            let c0 = k / cfg.mu;
            let ratio = c / c0;
            report.critical_ratio = Some(ratio);
            report.contradiction = cfg.mu > ratio;
        }
    }
    Ok(report)
}
