use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::build::{build_counterexample, diamond_sites, Counterexample, CounterexampleSpec, ValueMode};
use super::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::lattice::io::save_field;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteResidual {
    pub site: (i64, i64),
    pub residual: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub r: i64,
    pub margin: i64,
    pub mode: ValueMode,
    /// (a) `u = 0` on the diamond.
    pub diamond_vanishes: bool,
    /// (b) `Delta u = 0` at every diamond site.
    pub diamond_harmonic: bool,
    /// (c) `Delta u + V u = 0` at every window site.
    pub equation_holds: bool,
    /// (d) certified l2 mass outside the window is below `2^{-margin}`.
    pub tail_certified: bool,
    /// (e) `u(0, 0) = 1`.
    pub origin_is_one: bool,
    /// Nonzero `Delta u` on the diamond.
    pub diamond_residuals: Vec<SiteResidual>,
    /// Nonzero `Delta u + V u` anywhere in the window.
    pub equation_residuals: Vec<SiteResidual>,
    /// `log2` of the tail bound `4^7 (10/9) (4^{-N_1} + 4^{-N_2})`.
    pub tail_bound_log2: f64,
    pub sup_potential: Dyadic,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.diamond_vanishes
            && self.diamond_harmonic
            && self.equation_holds
            && self.tail_certified
            && self.origin_is_one
    }

    pub fn ensure(&self) -> Result<()> {
        if self.pass() {
            return Ok(());
        }
        let mut sites: Vec<(i64, i64)> = self
            .diamond_residuals
            .iter()
            .chain(&self.equation_residuals)
            .map(|s| s.site)
            .collect();
        sites.sort();
        sites.dedup();
        Err(Error::VerificationFailure { sites })
    }

    /// One line per check, for terminal output.
    pub fn summary(&self) -> String {
        let flag = |b: bool| if b { "PASS" } else { "FAIL" };
        let mut out = format!(
            "R={} mode={:?}\n(a) vanishing diamond      {}\n(b) harmonic on diamond    {}\n(c) equation with V        {}\n(d) l2 tail certificate    {} (log2 bound {:.2})\n(e) u(0,0) = 1             {}\nsup |V| = {}\n",
            self.r,
            self.mode,
            flag(self.diamond_vanishes),
            flag(self.diamond_harmonic),
            flag(self.equation_holds),
            flag(self.tail_certified),
            self.tail_bound_log2,
            flag(self.origin_is_one),
            self.sup_potential,
        );
        for s in &self.diamond_residuals {
            out.push_str(&format!("  residual at ({}, {}): {}\n", s.site.0, s.site.1, s.residual));
        }
        out
    }
}

fn tail_bound(half_width: i64) -> BigRational {
    let four = BigInt::from(4);
    let n = half_width as u32;
    let one = BigRational::from_integer(BigInt::from(1));
    let per_axis = &one / BigRational::from_integer(four.pow(n));
    BigRational::from_integer(four.pow(7)) * BigRational::new(BigInt::from(10), BigInt::from(9)) * (&per_axis + &per_axis)
}

pub fn verify_counterexample(ce: &Counterexample) -> Result<VerificationReport> {
    let spec = ce.spec;
    let r = spec.r;
    let diamond = diamond_sites(r);
    let diamond_vanishes = diamond.iter().all(|&j| ce.value(j).is_zero());
    let diamond_residuals: Vec<SiteResidual> = diamond
        .iter()
        .map(|&j| SiteResidual {
            site: j,
            residual: ce.laplacian(j),
        })
        .filter(|s| !s.residual.is_zero())
        .collect();
    let sites: Vec<(i64, i64)> = ce.sites().collect();
    let per_site = sites
        .par_iter()
        .map(|&j| {
            let u = ce.value(j);
            let v = ce.potential(j)?;
            let res = &ce.laplacian(j) + &(&v * &u);
            Ok((res, v.abs()))
        })
        .collect::<Result<Vec<(Dyadic, Dyadic)>>>()?;
    let equation_residuals: Vec<SiteResidual> = sites
        .iter()
        .zip(&per_site)
        .filter(|(_, (res, _))| !res.is_zero())
        .map(|(&site, (res, _))| SiteResidual {
            site,
            residual: res.clone(),
        })
        .collect();
    let sup_potential = per_site
        .iter()
        .map(|(_, v)| v)
        .max()
        .cloned()
        .unwrap_or_else(Dyadic::zero);
    let bound = tail_bound(spec.half_width());
    let threshold = Dyadic::pow2(1, -spec.margin).to_rational();
    let tail_bound_log2 = 14.0 + (20.0f64 / 9.0).log2() - 2.0 * spec.half_width() as f64;
    Ok(VerificationReport {
        r,
        margin: spec.margin,
        mode: spec.mode,
        diamond_vanishes,
        diamond_harmonic: diamond_residuals.is_empty(),
        equation_holds: equation_residuals.is_empty(),
        tail_certified: bound < threshold,
        origin_is_one: ce.value((0, 0)) == Dyadic::pow2(1, 0),
        diamond_residuals,
        equation_residuals,
        tail_bound_log2,
        sup_potential,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialScan {
    pub mode: ValueMode,
    pub r_list: Vec<i64>,
    pub sup_potential: Vec<Dyadic>,
    /// All sups are exactly equal.
    pub identical: bool,
}

pub fn potential_bound_scan(r_list: &[i64], mode: ValueMode, margin: i64) -> Result<PotentialScan> {
    let sups = r_list
        .iter()
        .map(|&r| {
            let ce = build_counterexample(CounterexampleSpec { r, margin, mode })?;
            Ok(verify_counterexample(&ce)?.sup_potential)
        })
        .collect::<Result<Vec<_>>>()?;
    let identical = sups.windows(2).all(|w| w[0] == w[1]);
    Ok(PotentialScan {
        mode,
        r_list: r_list.to_vec(),
        sup_potential: sups,
        identical,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSite {
    pub site: (i64, i64),
    pub sign: i8,
    pub exponent: i64,
}

/// Writes the float field, its sidecar, and `<stem>.exact.json` with the
/// sign and exponent of every nonzero site within distance 4 of the diamond centre.
pub fn save_counterexample(ce: &Counterexample, stem: &Path) -> Result<Vec<PathBuf>> {
    let mut meta = serde_json::Map::new();
    meta.insert("R".into(), ce.spec.r.into());
    meta.insert("margin".into(), ce.spec.margin.into());
    meta.insert("mode".into(), serde_json::to_value(ce.spec.mode)?);
    let (bin, json) = save_field(&ce.to_field(), stem, meta)?;
    let r = ce.spec.r;
    let mut exact = Vec::new();
    for a in -4i64..=4 {
        for b in r - 4..=r + 4 {
            if ce.spec.diamond_distance((a, b)) > 4 {
                continue;
            }
            let v = ce.value((a, b));
            if let Some(e) = v.power_of_two() {
                exact.push(ExactSite {
                    site: (a, b),
                    sign: v.signum(),
                    exponent: e,
                });
            }
        }
    }
    let path = stem.with_extension("exact.json");
    std::fs::write(&path, serde_json::to_string_pretty(&exact)? + "\n")?;
    Ok(vec![bin, json, path])
}
