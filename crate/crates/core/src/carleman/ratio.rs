use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::absorption::absorption_log_lhs;
use super::operators::{random_bump, Bump};
use super::profile::CutoffSet;
use super::weight::WeightSpec;
use crate::error::{Error, Result};
use crate::lattice::{discrete_laplacian, LatticeField, LatticeWindow};
use crate::numeric::{LogScalar, QuadratureRule};
use crate::rng::trial_rng;

/// `g_j(t) = sum_k psi_k(t) theta_R(|j|) mu(|j/R + phi(t) e_1|) h^k_j`.
///
/// The factor `mu` vanishes where `|j/R + phi e_1| <= 1`, so every such `g`
/// lies in the admissible set by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleField {
    window: LatticeWindow,
    spec: WeightSpec,
    components: Vec<(Bump, Vec<Complex64>)>,
}

impl AdmissibleField {
    pub fn new(window: LatticeWindow, spec: WeightSpec, components: Vec<(Bump, Vec<Complex64>)>) -> Self {
        AdmissibleField {
            window,
            spec,
            components,
        }
    }

    pub fn random<R: Rng>(
        window: LatticeWindow,
        spec: WeightSpec,
        n_components: usize,
        panels: usize,
        rng: &mut R,
    ) -> Self {
        let components = (0..n_components)
            .map(|_| {
                let bump = random_bump(panels, rng);
                let h = (0..window.len())
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re, im)
                    })
                    .collect();
                (bump, h)
            })
            .collect();
        AdmissibleField {
            window,
            spec,
            components,
        }
    }

    /// Field value and time derivative at `t`.
    pub fn eval(&self, t: f64) -> (LatticeField, LatticeField) {
        let cut = CutoffSet::new(self.spec.r);
        let (phi, dphi, _) = self.spec.phi.eval(t);
        let r = self.spec.r;
        let mut value = vec![Complex64::new(0.0, 0.0); self.window.len()];
        let mut dt = value.clone();
        let mut site = vec![0i64; self.window.dim()];
        for i in 0..self.window.len() {
            self.window.site_into(i, &mut site);
            let theta = cut.theta((self.window.norm_sq(i) as f64).sqrt()).0;
            if theta == 0.0 {
                continue;
            }
            let x1 = site[0] as f64 / r + phi;
            let rest: f64 = site[1..].iter().map(|&c| (c as f64 / r).powi(2)).sum();
            let rho = (x1 * x1 + rest).sqrt();
            let (mu, dmu, _) = cut.mu(rho);
            if mu == 0.0 && dmu == 0.0 {
                continue;
            }
            let dmu_dt = if rho > 0.0 { dmu * x1 / rho * dphi } else { 0.0 };
            for (bump, h) in &self.components {
                let (p, dp) = bump.eval(t);
                value[i] += h[i] * (p * theta * mu);
                dt[i] += h[i] * (theta * (dp * mu + p * dmu_dt));
            }
        }
        (
            LatticeField::from_values(self.window, value).expect("finite field"),
            LatticeField::from_values(self.window, dt).expect("finite field"),
        )
    }
}

/// Time rule whose panel edges contain the bump endpoints and the profile breakpoints.
pub fn ratio_rule(spec: &WeightSpec, panels: usize, per_panel: usize) -> QuadratureRule {
    QuadratureRule::composite_uniform(per_panel, panels, 0.0, 1.0, spec.phi.breakpoints())
}

/// Smallest `c` with `sqrt(sinh(2a/R^2)) sinh(2a/(sqrt(d) R)) ||e^W g|| <= c ||e^W (i d/dt + Delta) g||`.
pub fn carleman_ratio(g: &AdmissibleField, rule: &QuadratureRule) -> Result<f64> {
    let spec = &g.spec;
    let w = g.window;
    let mut lhs_terms = Vec::with_capacity(rule.len());
    let mut rhs_terms = Vec::with_capacity(rule.len());
    let mut outside = 0.0;
    let mut total = 0.0;
    let mut site = vec![0i64; w.dim()];
    for (&t, &q) in rule.nodes().iter().zip(rule.weights()) {
        let (value, dt) = g.eval(t);
        let lap = discrete_laplacian(&value);
        let mut lt = Vec::with_capacity(w.len());
        let mut rt = Vec::with_capacity(w.len());
        for i in 0..w.len() {
            w.site_into(i, &mut site);
            let e = spec.exponent(&site, t);
            let m = value.values()[i].norm_sqr();
            total += q * m;
            if e < spec.alpha {
                outside += q * m;
            }
            let pg = dt.values()[i] * Complex64::i() + lap.values()[i];
            let w2 = LogScalar::from_log(2.0 * e);
            lt.push(LogScalar::from_f64(m) * w2);
            rt.push(LogScalar::from_f64(pg.norm_sqr()) * w2);
        }
        let qs = LogScalar::from_f64(q);
        lhs_terms.push(LogScalar::sum(&lt) * qs);
        rhs_terms.push(LogScalar::sum(&rt) * qs);
    }
    if total == 0.0 {
        return Err(Error::InvalidParameter("test field vanishes identically".into()));
    }
    if outside > 1e-14 * total {
        return Err(Error::SupportViolation {
            relative_mass: outside / total,
        });
    }
    let weighted_g = LogScalar::sum(&lhs_terms).sqrt();
    let weighted_pg = LogScalar::sum(&rhs_terms).sqrt();
    let factor = 0.5 * absorption_log_lhs(spec.alpha, spec.r, spec.d);
    Ok((factor + weighted_g.log_mag() - weighted_pg.log_mag()).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioConfig {
    pub spec: WeightSpec,
    pub half_width: usize,
    pub components: usize,
    pub panels: usize,
    pub per_panel: usize,
    pub trials: usize,
    pub seed: u64,
}

impl RatioConfig {
    pub fn new(spec: WeightSpec) -> Self {
        RatioConfig {
            spec,
            half_width: spec.r.ceil() as usize + 2,
            components: 2,
            panels: 32,
            per_panel: 8,
            trials: 500,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBatch {
    pub ratios: Vec<f64>,
    /// Empirical Carleman constant: the largest ratio over the batch.
    pub max: f64,
    pub argmax: u64,
}

/// Ratios for `trials` random admissible fields, in trial order.
pub fn carleman_ratio_batch(cfg: &RatioConfig) -> Result<RatioBatch> {
    let window = LatticeWindow::new(cfg.spec.d, cfg.half_width)?;
    let rule = ratio_rule(&cfg.spec, cfg.panels, cfg.per_panel);
    let ratios = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            // redraw until the field is nonzero; the stream stays deterministic
            loop {
                let g = AdmissibleField::random(window, cfg.spec, cfg.components, cfg.panels, &mut rng);
                match carleman_ratio(&g, &rule) {
                    Err(Error::InvalidParameter(_)) => continue,
                    other => return other,
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let (argmax, max) = ratios
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |(i, m), (j, &r)| if r > m { (j, r) } else { (i, m) });
    Ok(RatioBatch {
        ratios,
        max,
        argmax: argmax as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleman::profile::TimeProfile;

    #[test]
    fn admissible_field_has_no_mass_near_origin_when_phi_vanishes() {
        let spec = WeightSpec::from_rule(2.0, 6.0, TimeProfile::paper_phi(), 1);
        let w = LatticeWindow::new(1, 8).unwrap();
        let mut rng = trial_rng(1, 0);
        let g = AdmissibleField::random(w, spec, 2, 32, &mut rng);
        let (v, _) = g.eval(0.1);
        assert!(v.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn time_derivative_matches_difference() {
        let spec = WeightSpec::from_rule(2.0, 6.0, TimeProfile::paper_phi(), 2);
        let w = LatticeWindow::new(2, 8).unwrap();
        let mut rng = trial_rng(2, 0);
        let g = AdmissibleField::random(w, spec, 2, 32, &mut rng);
        for &t in &[0.3, 0.5, 0.7] {
            let e = 1e-6;
            let (_, dt) = g.eval(t);
            let (p, _) = g.eval(t + e);
            let (m, _) = g.eval(t - e);
            for i in 0..w.len() {
                let fd = (p.values()[i] - m.values()[i]) / (2.0 * e);
                assert!((fd - dt.values()[i]).norm() < 1e-6 * (1.0 + fd.norm()));
            }
        }
    }

    #[test]
    fn stationary_ratio_is_finite() {
        let spec = WeightSpec::new(3.0, 6.0, TimeProfile::constant(3.0), 1);
        let mut cfg = RatioConfig::new(spec);
        cfg.trials = 8;
        let b = carleman_ratio_batch(&cfg).unwrap();
        assert!(b.max.is_finite() && b.max > 0.0);
    }
}
