use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::operators::{norm_sqr, pairing, OperatorTables, TestFunction};
use super::weight::WeightSpec;
use crate::error::{Error, Result};
use crate::lattice::LatticeWindow;
use crate::numeric::{Dd, DdComplex, QuadratureRule};
use crate::rng::trial_rng;

/// Outcome of a numerical check, serialised as one JSON record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: Value,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub trials: usize,
    /// Trial index with the largest defect.
    pub worst_trial: u64,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl CheckReport {
    /// Turns a failed report into `ToleranceExceeded`.
    pub fn ensure(self) -> Result<CheckReport> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::ToleranceExceeded {
                check: self.check,
                defect: self.defect,
                tolerance: self.tolerance,
                trial: self.worst_trial,
            })
        }
    }
}

/// Shared settings for the operator-level checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorCheckConfig {
    pub spec: WeightSpec,
    pub half_width: usize,
    pub trials: usize,
    pub seed: u64,
    /// Number of tensor-product terms per random test function.
    pub components: usize,
    /// Uniform time panels; bump endpoints sit on this grid.
    pub panels: usize,
    pub per_panel: usize,
}

impl OperatorCheckConfig {
    pub fn new(spec: WeightSpec) -> Self {
        OperatorCheckConfig {
            spec,
            half_width: spec.r.ceil() as usize + 2,
            trials: 50,
            seed: 0,
            components: 2,
            panels: 32,
            per_panel: 8,
        }
    }

    pub fn window(&self) -> Result<LatticeWindow> {
        LatticeWindow::new(self.spec.d, self.half_width)
    }

    pub fn rule(&self) -> QuadratureRule {
        QuadratureRule::composite_uniform(
            self.per_panel,
            self.panels,
            0.0,
            1.0,
            self.spec.phi.breakpoints(),
        )
    }

    pub fn tables(&self) -> Result<OperatorTables> {
        Ok(OperatorTables::new(self.window()?, self.spec, self.rule()))
    }

    fn test_function(&self, tables: &OperatorTables, trial: u64, stream: u64) -> TestFunction {
        let mut rng = trial_rng(self.seed, 2 * trial + stream);
        TestFunction::random(
            *tables.window(),
            self.half_width - 1,
            self.components,
            self.panels,
            &mut rng,
        )
    }

    fn params(&self) -> Value {
        let mut p = self.spec.params();
        let m = p.as_object_mut().unwrap();
        m.insert("M".into(), json!(self.half_width));
        m.insert("trials".into(), json!(self.trials));
        m.insert("seed".into(), json!(self.seed));
        m.insert("nodes".into(), json!(self.panels * self.per_panel));
        p
    }
}

fn worst(defects: &[f64]) -> (f64, u64) {
    defects
        .iter()
        .enumerate()
        .fold((0.0f64, 0u64), |(m, i), (j, &d)| {
            if d > m || d.is_nan() {
                (d, j as u64)
            } else {
                (m, i)
            }
        })
}

fn integrate_nodes(tables: &OperatorTables, per_node: impl Fn(usize) -> Dd) -> Dd {
    tables
        .nodes()
        .iter()
        .enumerate()
        .fold(Dd::ZERO, |acc, (n, node)| acc + per_node(n).mul_f64(node.weight))
}

fn integrate_nodes_c(tables: &OperatorTables, per_node: impl Fn(usize) -> DdComplex) -> DdComplex {
    tables
        .nodes()
        .iter()
        .enumerate()
        .fold(DdComplex::ZERO, |acc, (n, node)| {
            acc + per_node(n).scale(Dd::from_f64(node.weight))
        })
}

/// `||(S + A) f - e^{W}(i d/dt + Delta_d)(e^{-W} f)|| / ||f||`, worst over trials.
pub fn conjugation_check(cfg: &OperatorCheckConfig, tolerance: f64) -> Result<CheckReport> {
    let tables = cfg.tables()?;
    let defects: Vec<f64> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let f = cfg.test_function(&tables, trial, 0);
            let jets: Vec<_> = tables.nodes().iter().map(|n| f.jet(n.t)).collect();
            let diff = integrate_nodes(&tables, |n| {
                let node = &tables.nodes()[n];
                let s = tables.apply_s(node, &jets[n]);
                let a = tables.apply_a(node, &jets[n].value);
                let direct = tables.conjugate_direct(node, &jets[n]);
                s.iter()
                    .zip(&a)
                    .zip(&direct)
                    .fold(Dd::ZERO, |acc, ((s, a), c)| acc + (*s + *a - *c).norm_sqr())
            });
            let norm = integrate_nodes(&tables, |n| norm_sqr(&jets[n].value));
            (diff / norm).sqrt().to_f64()
        })
        .collect();
    let (defect, worst_trial) = worst(&defects);
    Ok(CheckReport {
        check: "conjugation".into(),
        params: cfg.params(),
        defect,
        tolerance,
        pass: defect < tolerance,
        trials: cfg.trials,
        worst_trial,
        details: Value::Null,
    })
}

/// Symmetry of `S` and skew-symmetry of `A` under the space-time pairing.
pub fn symmetry_check(cfg: &OperatorCheckConfig, tolerance: f64) -> Result<CheckReport> {
    let tables = cfg.tables()?;
    let rows: Vec<[f64; 4]> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let f = cfg.test_function(&tables, trial, 0);
            let g = cfg.test_function(&tables, trial, 1);
            let fj: Vec<_> = tables.nodes().iter().map(|n| f.jet(n.t)).collect();
            let gj: Vec<_> = tables.nodes().iter().map(|n| g.jet(n.t)).collect();
            let sf: Vec<_> = tables.nodes().iter().zip(&fj).map(|(n, j)| tables.apply_s(n, j)).collect();
            let sg: Vec<_> = tables.nodes().iter().zip(&gj).map(|(n, j)| tables.apply_s(n, j)).collect();
            let af: Vec<_> = tables.nodes().iter().zip(&fj).map(|(n, j)| tables.apply_a(n, &j.value)).collect();
            let ag: Vec<_> = tables.nodes().iter().zip(&gj).map(|(n, j)| tables.apply_a(n, &j.value)).collect();
            let nf = integrate_nodes(&tables, |n| norm_sqr(&fj[n].value)).sqrt();
            let ng = integrate_nodes(&tables, |n| norm_sqr(&gj[n].value)).sqrt();
            let scale = (nf * ng).to_f64();
            let s_def = integrate_nodes_c(&tables, |n| pairing(&sf[n], &gj[n].value) - pairing(&fj[n].value, &sg[n]));
            let a_def = integrate_nodes_c(&tables, |n| pairing(&af[n], &gj[n].value) + pairing(&fj[n].value, &ag[n]));
            // diagonal pairings: <Sf, f> real and <Af, f> imaginary
            let sff = integrate_nodes_c(&tables, |n| pairing(&sf[n], &fj[n].value)).to_complex();
            let aff = integrate_nodes_c(&tables, |n| pairing(&af[n], &fj[n].value)).to_complex();
            let nf2 = nf.sqr().to_f64();
            [
                s_def.to_complex().norm() / scale,
                a_def.to_complex().norm() / scale,
                sff.im.abs() / (sff.norm() + nf2),
                aff.re.abs() / (aff.norm() + nf2),
            ]
        })
        .collect();
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<_>>();
    let (s_max, s_at) = worst(&col(0));
    let (a_max, a_at) = worst(&col(1));
    let (re_max, _) = worst(&col(2));
    let (im_max, _) = worst(&col(3));
    let (defect, worst_trial) = if s_max >= a_max { (s_max, s_at) } else { (a_max, a_at) };
    Ok(CheckReport {
        check: "symmetry".into(),
        params: cfg.params(),
        defect,
        tolerance,
        pass: defect < tolerance,
        trials: cfg.trials,
        worst_trial,
        details: json!({
            "symmetric_defect": s_max,
            "skew_defect": a_max,
            "sf_f_imaginary_part": re_max,
            "af_f_real_part": im_max,
        }),
    })
}

/// Per-trial commutator quantities, time-integrated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorSample {
    /// `<(SA - AS) f, f>` from operator composition.
    pub composed: f64,
    /// Imaginary part of the composed pairing (zero in exact arithmetic).
    pub composed_imag: f64,
    /// Closed-form four-term value.
    pub form: f64,
    pub terms: [f64; 4],
    pub norm_sq: f64,
    /// `||S f + A f||^2`.
    pub energy: f64,
}

/// Time-integrated four-term commutator form for one test function.
pub fn commutator_form(tables: &OperatorTables, f: &TestFunction) -> ([f64; 4], f64) {
    let mut acc = [Dd::ZERO; 4];
    for node in tables.nodes() {
        let jet = f.jet(node.t);
        let t = tables.commutator_terms(node, &jet.value);
        for k in 0..4 {
            acc[k] += t[k].mul_f64(node.weight);
        }
    }
    let total = acc[0] + acc[1] + acc[2] + acc[3];
    (acc.map(|x| x.to_f64()), total.to_f64())
}

pub fn commutator_sample(tables: &OperatorTables, f: &TestFunction) -> CommutatorSample {
    let mut composed = DdComplex::ZERO;
    let mut energy = Dd::ZERO;
    let mut norm = Dd::ZERO;
    for node in tables.nodes() {
        let jet = f.jet(node.t);
        let c = tables.commutator_composed(node, &jet);
        let w = Dd::from_f64(node.weight);
        composed += pairing(&c, &jet.value).scale(w);
        let s = tables.apply_s(node, &jet);
        let a = tables.apply_a(node, &jet.value);
        energy += s.iter().zip(&a).fold(Dd::ZERO, |acc, (s, a)| acc + (*s + *a).norm_sqr()) * w;
        norm += norm_sqr(&jet.value) * w;
    }
    let (terms, form) = commutator_form(tables, f);
    let composed = composed.to_complex();
    CommutatorSample {
        composed: composed.re,
        composed_imag: composed.im,
        form,
        terms,
        norm_sq: norm.to_f64(),
        energy: energy.to_f64(),
    }
}

/// Composition against the closed form, plus `||Sf + Af||^2 >= <[S, A] f, f>`.
pub fn commutator_check(cfg: &OperatorCheckConfig, tolerance: f64) -> Result<CheckReport> {
    let tables = cfg.tables()?;
    let samples: Vec<CommutatorSample> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| commutator_sample(&tables, &cfg.test_function(&tables, trial, 0)))
        .collect();
    let defects: Vec<f64> = samples
        .iter()
        .map(|s| {
            let diff = ((s.composed - s.form).powi(2) + s.composed_imag.powi(2)).sqrt();
            diff / (s.composed.abs() + s.norm_sq)
        })
        .collect();
    let energy_violations = samples
        .iter()
        .filter(|s| s.energy < s.composed - 1e-12 * (s.energy.abs() + s.composed.abs()))
        .count();
    let (defect, worst_trial) = worst(&defects);
    Ok(CheckReport {
        check: "commutator".into(),
        params: cfg.params(),
        defect,
        tolerance,
        pass: defect <= tolerance && energy_violations == 0,
        trials: cfg.trials,
        worst_trial,
        details: json!({
            "energy_inequality_violations": energy_violations,
            "min_form_over_norm": samples.iter().map(|s| s.form / s.norm_sq).fold(f64::INFINITY, f64::min),
        }),
    })
}

/// With a constant profile the commutator form is a sum of squares; the
/// defect is the worst `max(0, -form) / ||f||^2`.
pub fn stationary_positivity(cfg: &OperatorCheckConfig, tolerance: f64) -> Result<CheckReport> {
    if !cfg.spec.phi.is_stationary() {
        return Err(Error::InvalidParameter(
            "stationary positivity needs a constant time profile".into(),
        ));
    }
    let tables = cfg.tables()?;
    let values: Vec<(f64, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let f = cfg.test_function(&tables, trial, 0);
            let (_, form) = commutator_form(&tables, &f);
            let norm = integrate_nodes(&tables, |n| norm_sqr(&f.jet(tables.nodes()[n].t).value)).to_f64();
            (form, norm)
        })
        .collect();
    let defects: Vec<f64> = values.iter().map(|&(f, n)| (-f).max(0.0) / n).collect();
    let (defect, worst_trial) = worst(&defects);
    Ok(CheckReport {
        check: "stationary_positivity".into(),
        params: cfg.params(),
        defect,
        tolerance,
        pass: defect <= tolerance,
        trials: cfg.trials,
        worst_trial,
        details: json!({
            "min_form_over_norm": values.iter().map(|&(f, n)| f / n).fold(f64::INFINITY, f64::min),
        }),
    })
}
