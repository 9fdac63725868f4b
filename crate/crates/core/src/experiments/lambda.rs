use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carleman::{absorption_threshold, growth_factor_log, ln_sinh};
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::lattice::{ring_mass, ring_mass_spacetime, LatticeField};
use crate::numeric::{fit_decay, DecayModel, FitResult, LogScalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Bound on the trajectory's l2 norm.
    pub a_bound: f64,
    /// Bound on the potential's sup norm.
    pub l_bound: f64,
    pub r_list: Vec<f64>,
    /// Constant in `alpha = c R log R`.
    pub c_rule: f64,
    pub mu: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(r_list: Vec<f64>) -> Self {
        ExperimentConfig {
            a_bound: 1.0,
            l_bound: 0.0,
            r_list,
            c_rule: 1.0,
            mu: 1.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_bound >= 0.0 && self.l_bound >= 0.0) {
            return Err(Error::InvalidParameter("A and L must be nonnegative".into()));
        }
        if self.r_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("R list must be increasing".into()));
        }
        Ok(())
    }
}

/// What the ring masses are taken of.
#[derive(Clone, Copy, Debug)]
pub enum ScanInput<'a> {
    Evolution(&'a Trajectory),
    Stationary(&'a LatticeField),
}

impl ScanInput<'_> {
    fn dim(&self) -> usize {
        match self {
            ScanInput::Evolution(t) => t.config.window.dim(),
            ScanInput::Stationary(u) => u.window().dim(),
        }
    }

    fn lambda(&self, r: f64) -> Result<LogScalar> {
        match self {
            ScanInput::Evolution(t) => ring_mass_spacetime(&t.snapshots, &t.time_rule(), r),
            ScanInput::Stationary(u) => ring_mass(u, r),
        }
    }

    fn boundary_mass(&self) -> f64 {
        match self {
            ScanInput::Evolution(t) => t.snapshots.iter().map(|u| u.boundary_mass()).fold(0.0, f64::max),
            ScanInput::Stationary(u) => u.boundary_mass(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub r: f64,
    pub lambda: LogScalar,
    pub alpha: f64,
    /// `ln( sqrt(2c log R) R^{2c/sqrt(d) - 1/2} )`.
    pub log_lhs_growth: f64,
    pub pass_absorption: bool,
    pub boundary_mass: f64,
    /// `lambda(R) >= exp(-c R log R)` with the fitted `R log R` constant.
    pub pass_lower_bound: Option<bool>,
    /// Log of the left side of the assembled Carleman bound.
    pub log_chain_lhs: f64,
    /// `c R log R (4 + 1/R)^2 + log lambda(R)`.
    pub log_chain_lambda_term: f64,
    /// `c R log R (2 + 1/R)^2 + log A`.
    pub log_chain_a_term: f64,
    /// Whether the `A` term is dominated by the left side.
    pub chain_absorbs_a: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaScan {
    pub rows: Vec<ScanRow>,
    pub fits: Vec<FitResult>,
    /// Model with the smallest RMS log-residual.
    pub best_model: Option<DecayModel>,
    /// Every ring mass vanished, so nothing can be concluded.
    pub vacuous: bool,
}

impl LambdaScan {
    pub fn fit(&self, model: DecayModel) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.model_tag == model)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("R\tlog_lambda\talpha\tlog_lhs_growth\tpass_absorption\tboundary_mass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{:e}\n",
                r.r,
                r.lambda.log_mag(),
                r.alpha,
                r.log_lhs_growth,
                r.pass_absorption,
                r.boundary_mass
            ));
        }
        out
    }
}

pub fn lambda_scan(input: ScanInput<'_>, cfg: &ExperimentConfig) -> Result<LambdaScan> {
    cfg.validate()?;
    let d = input.dim();
    let boundary = input.boundary_mass();
    let c = cfg.c_rule;
    let lambdas = cfg
        .r_list
        .par_iter()
        .map(|&r| input.lambda(r))
        .collect::<Result<Vec<LogScalar>>>()?;
    let vacuous = lambdas.iter().all(|l| l.is_zero());
    let samples: Vec<(f64, LogScalar)> = cfg.r_list.iter().copied().zip(lambdas.iter().copied()).collect();
    let fits: Vec<FitResult> = if vacuous {
        Vec::new()
    } else {
        DecayModel::ALL
            .iter()
            .filter_map(|&m| fit_decay(&samples, m).ok())
            .collect()
    };
    let best_model = fits
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .map(|f| f.model_tag);
    let c_fit = fits
        .iter()
        .find(|f| f.model_tag == DecayModel::RLogR)
        .map(|f| f.exponent_constant);
    let rows = samples
        .iter()
        .map(|&(r, lambda)| {
            let rlr = r * r.ln();
            let alpha = c * rlr;
            let log_chain_lhs = 0.5 * ln_sinh(2.0 * c * r.ln() / r)
                + ln_sinh(2.0 * c * r.ln() / (d as f64).sqrt())
                + alpha * (2.0 + 1.0 / r).powi(2);
            let log_chain_a_term = alpha * (2.0 + 1.0 / r).powi(2) + cfg.a_bound.ln();
            ScanRow {
                r,
                lambda,
                alpha,
                log_lhs_growth: growth_factor_log(c, r, d),
                pass_absorption: absorption_threshold(alpha, r, cfg.l_bound.max(f64::MIN_POSITIVE), d),
                boundary_mass: boundary,
                pass_lower_bound: c_fit.map(|cf| !lambda.is_zero() && -lambda.log_mag() <= cf * rlr),
                log_chain_lhs,
                log_chain_lambda_term: alpha * (4.0 + 1.0 / r).powi(2) + lambda.log_mag(),
                log_chain_a_term,
                chain_absorbs_a: log_chain_lhs > log_chain_a_term,
            }
        })
        .collect();
    Ok(LambdaScan {
        rows,
        fits,
        best_model,
        vacuous,
    })
}
