use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use carleman_core::carleman::{
    carleman_ratio_batch, commutator_check, conjugation_check, hiding_grid, hiding_inequalities,
    hiding_row, log_radii, phi_rate_scan, symmetry_check, OperatorCheckConfig, PhiGrowth,
    RatioConfig, TimeProfile, WeightSpec,
};
use carleman_core::counterexample::{
    build_counterexample, potential_bound_scan, save_counterexample, verify_counterexample,
    CounterexampleSpec, ValueMode, VerificationReport,
};
use carleman_core::evolution::{
    evolve, free_fundamental_solution, make_decaying_datum, normalize_observation, potential_hash,
    DatumProfile, EvolutionConfig, Observation, Trajectory,
};
use carleman_core::experiments::{
    beta_grid, k_bessel_weight_check, lambda_scan, log_convexity_check, log_convexity_stability,
    norm_star_equivalence, ExperimentConfig, ScanInput,
};
use carleman_core::lattice::io::{load_field, FieldSidecar};
use carleman_core::lattice::{LatticeField, LatticeWindow, Potential};
use carleman_core::numeric::DecayModel;
use carleman_core::rng::trial_rng;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::run::{Run, RunManifest};

impl Run {
    fn value<T: Clone + Serialize>(&mut self, key: &str, given: Option<T>, default: T) -> T {
        let v = given.unwrap_or(default);
        self.record(key, v.clone());
        v
    }
}

fn positive(key: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{key} must be positive, got {v}")))
    }
}

fn integer_list(key: &str, list: &[f64]) -> CliResult<Vec<i64>> {
    list.iter()
        .map(|&x| {
            if x.fract() == 0.0 && x.abs() < 1e15 {
                Ok(x as i64)
            } else {
                Err(CliError::Usage(format!("--{key} entries must be integers, got {x}")))
            }
        })
        .collect()
}

fn mode<T>(run: &mut Run, default: &str, choices: &[(&str, T)]) -> CliResult<T>
where
    T: Copy,
{
    let given = run.params().mode.clone();
    let name = run.value("mode", given, default.to_string());
    choices
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, v)| v)
        .ok_or_else(|| {
            let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("--mode `{name}` is not one of {}", names.join(", ")))
        })
}

/// A real potential with independent uniform values, scaled to sup norm `sup`.
fn random_potential(window: LatticeWindow, sup: f64, seed: u64) -> CliResult<Potential> {
    if sup == 0.0 {
        return Ok(Potential::zero(window));
    }
    let mut rng = trial_rng(seed, 0);
    let raw: Vec<f64> = (0..window.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let values = raw.iter().map(|x| Complex64::new(sup * x / peak, 0.0)).collect();
    Ok(Potential::new(window, values)?)
}

/// Coarsest storage stride that keeps at least 200 stored intervals and puts
/// the observation window endpoints 3/8 and 5/8 on stored times.
fn observation_stride(steps: usize) -> usize {
    (1..=steps)
        .rev()
        .find(|&s| steps % s == 0 && (steps / s) % 8 == 0 && steps / s >= 200)
        .unwrap_or(1)
}

struct EvolutionSetup {
    window: LatticeWindow,
    config: EvolutionConfig,
    datum: LatticeField,
    free: bool,
}

fn evolution_setup(run: &mut Run, default_m: usize, stride: impl Fn(usize) -> usize) -> CliResult<EvolutionSetup> {
    let p = run.params().clone();
    let d = run.value("d", p.d, 1);
    let m = run.value("M", p.m, default_m);
    let dt = run.value("dt", p.dt, 1e-3);
    let t = run.value("T", p.t, 1.0);
    let l = run.value("L", p.l, 0.0);
    if !(l >= 0.0) {
        return Err(CliError::Usage(format!("--L must be nonnegative, got {l}")));
    }
    let seed = run.seed();
    let window = LatticeWindow::new(d, m)?;
    let potential = random_potential(window, l, seed)?;
    let config = EvolutionConfig::new(window, potential, dt, t)?;
    let config = config.clone().with_stride(stride(config.steps()));
    Ok(EvolutionSetup {
        window,
        config,
        datum: LatticeField::delta(window),
        free: l == 0.0,
    })
}

fn weight_spec(run: &mut Run, default_d: usize) -> CliResult<WeightSpec> {
    let p = run.params().clone();
    let d = run.value("d", p.d, default_d);
    let r = positive("R", run.value("R", p.r, 10.0))?;
    Ok(match p.alpha {
        Some(alpha) => {
            run.record("alpha", alpha);
            WeightSpec::new(alpha, r, TimeProfile::paper_phi(), d)
        }
        None => {
            let c = run.value("c", p.c, 2.0);
            WeightSpec::from_rule(c, r, TimeProfile::paper_phi(), d)
        }
    })
}

fn operator_config(run: &mut Run) -> CliResult<OperatorCheckConfig> {
    let spec = weight_spec(run, 1)?;
    let mut cfg = OperatorCheckConfig::new(spec);
    let p = run.params().clone();
    cfg.half_width = run.value("M", p.m, cfg.half_width);
    cfg.trials = run.value("trials", p.trials, 50);
    cfg.seed = run.seed();
    Ok(cfg)
}

fn trajectory_tsv(traj: &Trajectory) -> String {
    let n0 = traj.snapshots[0].norm();
    let mut out = String::from("t\tnorm\trelative_drift\n");
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        let n = u.norm();
        writeln!(out, "{t}\t{n}\t{:e}", (n - n0).abs() / n0).unwrap();
    }
    out
}

pub fn evolve_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&["norm", "fundamental"])?;
    let datum_kind = mode(run, "delta", &[("delta", 0), ("gaussian", 1), ("bessel_like", 2)])?;
    let p = run.params().clone();
    let mut setup = evolution_setup(run, 40, |steps| {
        (1..=steps).rev().find(|s| steps % s == 0 && steps / s >= 100).unwrap_or(1)
    })?;
    let datum = match datum_kind {
        0 => DatumProfile::Delta,
        1 => DatumProfile::Gaussian { a: run.value("mu", p.mu, 1.0) },
        _ => DatumProfile::BesselLike { mu: run.value("mu", p.mu, 1.0) },
    };
    if datum_kind != 0 {
        setup.datum = make_decaying_datum(setup.window, datum);
    }
    let norm_tol = run.tolerance("norm", 1e-10);
    let traj = evolve(&setup.datum, &setup.config)?;
    let drift = traj.norm_drift();
    run.write("evolve.tsv", trajectory_tsv(&traj))?;
    let dir = run.dir()?.join("trajectory");
    let manifest = traj.export(&dir).map_err(CliError::from)?;
    for name in &traj_files(&traj) {
        run.register(&dir.join(name))?;
    }
    run.register(&manifest)?;
    let mut summary = json!({
        "norm_drift": drift,
        "max_step_drift": traj.max_step_drift(),
        "potential_hash": potential_hash(&setup.config.potential),
        "snapshots": traj.snapshots.len(),
    });
    run.check("norm_conservation", drift <= norm_tol, format!("relative drift {drift:.3e}, tolerance {norm_tol:e}"));
    let t_final = setup.config.t_final;
    if setup.free && datum_kind == 0 && setup.window.dim() == 1 && setup.window.half_width() > 21 {
        let tol = run.tolerance("fundamental", 1e-6);
        let u = traj.final_field();
        let err = (-20i64..=20)
            .map(|j| (u.get(&[j]) - free_fundamental_solution(j, t_final)).norm())
            .fold(0.0, f64::max);
        summary["fundamental_error"] = json!(err);
        run.check(
            "fundamental_solution",
            err <= tol,
            format!("max error over |j|<=20 at t={t_final}: {err:.3e}, tolerance {tol:e}"),
        );
    }
    run.write_json("evolve.json", &summary)
}

fn traj_files(traj: &Trajectory) -> Vec<String> {
    (0..traj.snapshots.len()).map(|n| format!("snapshot_{n:06}.field")).collect()
}

pub fn carleman_check_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&["conjugation", "symmetry", "ratio_factor"])?;
    let cfg = operator_config(run)?;
    let tc = run.tolerance("conjugation", 1e-9);
    let ts = run.tolerance("symmetry", 1e-9);
    let factor = run.tolerance("ratio_factor", 2.0);
    let conj = conjugation_check(&cfg, tc)?;
    run.check("conjugation", conj.pass, format!("max relative defect {:.3e}, tolerance {tc:e}", conj.defect));
    let sym = symmetry_check(&cfg, ts)?;
    run.check("symmetry", sym.pass, format!("max defect {:.3e}, tolerance {ts:e}", sym.defect));

    let mut rc = RatioConfig::new(cfg.spec);
    rc.trials = cfg.trials;
    rc.seed = cfg.seed;
    let calibration = carleman_ratio_batch(&rc)?;
    rc.seed = cfg.seed.wrapping_add(1);
    let held_out = carleman_ratio_batch(&rc)?;
    let constant = factor * calibration.max;
    let violations = held_out.ratios.iter().filter(|&&r| r > constant).count();
    run.check(
        "carleman_inequality",
        violations == 0,
        format!(
            "constant {constant:.4e} from {} calibration trials, {violations} of {} held-out trials exceed it",
            calibration.ratios.len(),
            held_out.ratios.len()
        ),
    );
    let mut tsv = String::from("batch\ttrial\tratio\n");
    for (name, batch) in [("calibration", &calibration), ("held_out", &held_out)] {
        for (i, r) in batch.ratios.iter().enumerate() {
            writeln!(tsv, "{name}\t{i}\t{r:e}").unwrap();
        }
    }
    run.write("carleman-check.tsv", tsv)?;
    run.write_json(
        "carleman-check.json",
        &json!({
            "conjugation": conj,
            "symmetry": sym,
            "ratio": {
                "calibration_max": calibration.max,
                "held_out_max": held_out.max,
                "constant": constant,
                "violations": violations,
            },
        }),
    )
}

pub fn commutator_check_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&["commutator"])?;
    let cfg = operator_config(run)?;
    let tol = run.tolerance("commutator", 1e-8);
    let rep = commutator_check(&cfg, tol)?;
    run.check("commutator", rep.pass, format!("max relative defect {:.3e}, tolerance {tol:e}", rep.defect));
    run.write_json("commutator-check.json", &rep)
}

pub fn hiding_scan_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let p = run.params().clone();
    let radii = run.value("R_list", p.r_list, vec![10.0, 20.0, 40.0, 80.0]);
    let phi = TimeProfile::paper_phi();
    let grid = hiding_grid(200, 1.0, 5.0);
    let mut tsv = String::from("R\tsup_phi1\tsup_phi2\tc_min_first\tc_min_second\tc_min\tvacuous\n");
    let mut reports = Vec::new();
    let mut all_hold = true;
    for &r in &radii {
        positive("R-list", r)?;
        let rep = hiding_inequalities(r, &phi, &grid);
        let alpha = rep.c_min * r * r.ln();
        all_hold &= !rep.vacuous
            && grid.iter().all(|&s| {
                let row = hiding_row(alpha, r, s, rep.sup_d1, rep.sup_d2);
                row.first_holds() && row.second_holds()
            });
        writeln!(
            tsv,
            "{r}\t{}\t{}\t{}\t{}\t{}\t{}",
            rep.sup_d1, rep.sup_d2, rep.c_min_first, rep.c_min_second, rep.c_min, rep.vacuous
        )
        .unwrap();
        reports.push(rep);
    }
    run.check("hiding_inequalities", all_hold, format!("both inequalities at the minimal c for {} radii", radii.len()));
    let late: Vec<f64> = reports.iter().filter(|r| r.r >= 20.0).map(|r| r.c_min).collect();
    let monotone = late.windows(2).all(|w| w[0] >= w[1]);
    run.check("c_min_nonincreasing", monotone, format!("c_min for R >= 20: {late:?}"));
    run.write("hiding-scan.tsv", tsv)?;
    run.write_json("hiding-scan.json", &reports)
}

pub fn lambda_scan_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let p = run.params().clone();
    let setup = evolution_setup(run, 40, observation_stride)?;
    let mut cfg = ExperimentConfig::new(run.value("R_list", p.r_list, (8..=28).map(f64::from).collect()));
    cfg.a_bound = run.value("A", p.a, 1.0);
    cfg.l_bound = setup.config.potential.sup_norm();
    cfg.c_rule = run.value("c", p.c, 1.0);
    cfg.mu = run.value("mu", p.mu, 1.0);
    cfg.seed = p.seed.unwrap_or(0);
    let traj = evolve(&setup.datum, &setup.config)?;
    let traj = normalize_observation(&traj, Observation::OriginSite)?;
    let scan = lambda_scan(ScanInput::Evolution(&traj), &cfg)?;
    run.write("lambda-scan.tsv", scan.to_tsv())?;
    run.write_json("lambda-scan.json", &scan)?;
    match (scan.fit(DecayModel::RLogR), scan.fit(DecayModel::RSq)) {
        (Some(a), Some(b)) if !scan.vacuous => run.check(
            "decay_model",
            a.residual < b.residual,
            format!("RMS log-residual R log R {:.4} vs R^2 {:.4}", a.residual, b.residual),
        ),
        _ => run.check("decay_model", false, "scan is vacuous or a fit is missing"),
    }
    Ok(())
}

pub fn logconvexity_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&["rho", "stability"])?;
    let p = run.params().clone();
    let setup = evolution_setup(run, 40, |steps| if steps % 10 == 0 { steps / 10 } else { 1 })?;
    let beta_max = positive("beta-max", run.value("beta_max", p.beta_max, 2.0))?;
    let d = setup.window.dim();
    let traj = evolve(&setup.datum, &setup.config)?;
    let rep = log_convexity_check(&traj, &beta_grid(d, beta_max, 81))?;
    let mut tsv = String::from("beta\tt\tlog_rho\n");
    for (b, row) in rep.betas.iter().zip(&rep.log_rho) {
        let beta: Vec<String> = b.iter().map(|x| x.to_string()).collect();
        for (t, v) in rep.times.iter().zip(row) {
            writeln!(tsv, "{}\t{t}\t{v}", beta.join(",")).unwrap();
        }
    }
    run.write("logconvexity.tsv", tsv)?;
    if setup.free {
        let tol = run.tolerance("rho", 1e-10);
        run.check(
            "rho_bound",
            rep.max_rho() <= 1.0 + tol,
            format!("max rho {:.12} over |beta| <= {beta_max} at {} times", rep.max_rho(), rep.times.len()),
        );
        run.write_json("logconvexity.json", &rep)
    } else {
        let tol = run.tolerance("stability", 0.2);
        let st = log_convexity_stability(&traj, beta_max / 2.0, 41)?;
        run.check(
            "beta_stability",
            st.relative_change < tol,
            format!("C_emp {:.6} -> {:.6}, relative change {:.3e}", st.c_emp[0], st.c_emp[1], st.relative_change),
        );
        run.write_json("logconvexity.json", &json!({ "report": rep, "stability": st }))
    }
}

pub fn normstar_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let p = run.params().clone();
    let d = run.value("d", p.d, 2);
    let j_max = run.value("M", p.m, 10_000);
    let rep = norm_star_equivalence(d, j_max as i64)?;
    let finite = rep.sup_ratio.is_finite() && rep.inf_ratio.is_finite() && rep.inf_ratio > 0.0;
    run.check(
        "equivalence",
        finite,
        format!("sup {} at {:?}, inf {} at {:?}, c_d {}", rep.sup_ratio, rep.argsup, rep.inf_ratio, rep.arginf, rep.c_d),
    );
    if d == 1 {
        run.check("exact_in_one_dimension", rep.sup_ratio == 1.0 && rep.inf_ratio == 1.0, "ratios equal 1");
    }
    run.write(
        "normstar.tsv",
        format!(
            "d\tj_max\tpoints\tsup_ratio\tinf_ratio\tc_d\n{}\t{}\t{}\t{}\t{}\t{}\n",
            rep.d, rep.j_max, rep.points, rep.sup_ratio, rep.inf_ratio, rep.c_d
        ),
    )?;
    run.write_json("normstar.json", &rep)
}

pub fn kbessel_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&["identity", "growth"])?;
    let p = run.params().clone();
    let mu = positive("mu", run.value("mu", p.mu, 1.0))?;
    let js = integer_list("R-list", &run.value("R_list", p.r_list, vec![5.0, 10.0, 20.0]))?;
    let ti = run.tolerance("identity", 1e-8);
    let tg = run.tolerance("growth", 0.1);
    let rep = k_bessel_weight_check(mu, &js, (20, 200))?;
    let worst = rep.rows.iter().map(|r| r.relative_defect).fold(0.0, f64::max);
    run.check("identity", worst < ti, format!("constant {}, worst relative defect {worst:.3e}", rep.constant));
    run.check(
        "growth",
        rep.growth_relative_error < tg,
        format!("j log j coefficient {:.5} vs mu {mu}", rep.growth_fit[0]),
    );
    let mut tsv = String::from("j\tlog_integral\tlog_bessel\trelative_defect\n");
    for r in &rep.rows {
        writeln!(tsv, "{}\t{}\t{}\t{:e}", r.j, r.log_integral, r.log_bessel, r.relative_defect).unwrap();
    }
    run.write("kbessel.tsv", tsv)?;
    run.write_json("kbessel.json", &rep)
}

pub fn threshold_scan_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let growth = mode(run, "log", &[("log", PhiGrowth::Log), ("sqrt_log", PhiGrowth::SqrtLog)])?;
    let p = run.params().clone();
    let d = run.value("d", p.d, 2);
    let c = positive("c", run.value("c", p.c, 1.0))?;
    let l = positive("L", run.value("L", p.l, 1.0))?;
    let radii = run.value("R_list", p.r_list, log_radii(2.0, 6.0, 10));
    let scan = phi_rate_scan(growth, c, l, d, &radii);
    let mut tsv = String::from("R\tphi_R\talpha\tlog_lhs\tlog_growth\tholds\n");
    for r in &scan.rows {
        writeln!(tsv, "{}\t{}\t{}\t{}\t{}\t{}", r.r, r.phi_r, r.alpha, r.log_lhs, r.log_growth, r.holds).unwrap();
    }
    run.check(
        "absorption",
        scan.r0.is_some(),
        match (scan.r0, scan.fails_from) {
            (Some(r0), _) => format!("holds for every scanned R >= {r0}"),
            (None, Some(f)) => format!("fails for every scanned R >= {f}"),
            (None, None) => "no stable tail in the scanned range".into(),
        },
    );
    run.write("threshold-scan.tsv", tsv)?;
    run.write_json("threshold-scan.json", &scan)
}

const MODES: [(&str, ValueMode); 2] = [("repaired", ValueMode::Repaired), ("literal_paper", ValueMode::LiteralPaper)];

fn report_checks(run: &mut Run, rep: &VerificationReport) {
    let residuals = |list: &[carleman_core::counterexample::SiteResidual]| {
        let s: Vec<String> = list.iter().map(|s| format!("({},{})={}", s.site.0, s.site.1, s.residual)).collect();
        if s.is_empty() {
            "no residuals".to_string()
        } else {
            s.join(" ")
        }
    };
    run.check("diamond_vanishes", rep.diamond_vanishes, format!("R={}", rep.r));
    run.check("diamond_harmonic", rep.diamond_harmonic, residuals(&rep.diamond_residuals));
    run.check("equation_holds", rep.equation_holds, format!("sup|V| = {}", rep.sup_potential));
    run.check("tail_certified", rep.tail_certified, format!("log2 tail bound {:.1}", rep.tail_bound_log2));
    run.check("origin_is_one", rep.origin_is_one, "u(0,0)");
}

fn residual_tsv(rep: &VerificationReport) -> String {
    let mut tsv = String::from("j1\tj2\tresidual\tresidual_f64\n");
    for s in &rep.equation_residuals {
        writeln!(tsv, "{}\t{}\t{}\t{:e}", s.site.0, s.site.1, s.residual, s.residual.to_f64()).unwrap();
    }
    tsv
}

fn counterexample_spec(run: &mut Run) -> CliResult<CounterexampleSpec> {
    let mode = mode(run, "repaired", &MODES)?;
    let p = run.params().clone();
    let r = integer_list("R", &[run.value("R", p.r, 20.0)])?[0];
    let margin = run.value("margin", p.margin, 60);
    let spec = CounterexampleSpec { r, margin, mode };
    spec.validate()?;
    Ok(spec)
}

pub fn counterexample_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let spec = counterexample_spec(run)?;
    let ce = build_counterexample(spec)?;
    let rep = verify_counterexample(&ce)?;
    report_checks(run, &rep);
    let stem = run.dir()?.join("counterexample");
    for path in save_counterexample(&ce, &stem)? {
        run.register(&path)?;
    }
    run.write("counterexample-residuals.tsv", residual_tsv(&rep))?;
    run.write_json("counterexample-report.json", &json!({ "verification": rep, "repair": ce.repair }))
}

fn sidecar_spec(path: &Path) -> CliResult<(CounterexampleSpec, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let side: FieldSidecar = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Usage(format!("{}: not a field sidecar: {e}", path.display())))?;
    let get = |k: &str| {
        side.metadata
            .get(k)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{}: metadata lacks `{k}`", path.display())))
    };
    let bad = |k: &str| CliError::Usage(format!("{}: metadata `{k}` has the wrong type", path.display()));
    let spec = CounterexampleSpec {
        r: get("R")?.as_i64().ok_or_else(|| bad("R"))?,
        margin: get("margin")?.as_i64().ok_or_else(|| bad("margin"))?,
        mode: serde_json::from_value(get("mode")?).map_err(|_| bad("mode"))?,
    };
    spec.validate()?;
    Ok((spec, bytes))
}

pub fn verify_counterexample_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let input = run.params().input.clone();
    let spec = match &input {
        Some(path) => {
            let (spec, bytes) = sidecar_spec(path)?;
            run.record("input", path.display().to_string());
            run.add_input(&bytes);
            spec
        }
        None => counterexample_spec(run)?,
    };
    let ce = build_counterexample(spec)?;
    if let Some(path) = &input {
        let field_path: PathBuf = path.with_extension("field");
        let saved = load_field(&field_path)?;
        run.add_input(&std::fs::read(&field_path).map_err(|e| CliError::io(&field_path, e))?);
        let rebuilt = ce.to_field();
        let same = saved.window() == rebuilt.window() && saved.values() == rebuilt.values();
        run.check("saved_field_matches", same, format!("{} against a rebuild at R={}", field_path.display(), spec.r));
    }
    let rep = verify_counterexample(&ce)?;
    report_checks(run, &rep);
    run.write("verify-counterexample-residuals.tsv", residual_tsv(&rep))?;
    run.write_json("verify-counterexample.json", &rep)
}

pub fn potential_scan_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let mode = mode(run, "repaired", &MODES)?;
    let p = run.params().clone();
    let radii = integer_list("R-list", &run.value("R_list", p.r_list, vec![10.0, 20.0, 40.0]))?;
    let margin = run.value("margin", p.margin, 60);
    let scan = potential_bound_scan(&radii, mode, margin)?;
    let mut tsv = String::from("R\tsup_V\tsup_V_f64\n");
    for (r, v) in scan.r_list.iter().zip(&scan.sup_potential) {
        writeln!(tsv, "{r}\t{v}\t{}", v.to_f64()).unwrap();
    }
    let values: Vec<String> = scan.sup_potential.iter().map(|v| v.to_string()).collect();
    run.check("sup_potential_identical", scan.identical, format!("sup|V| = [{}]", values.join(", ")));
    run.write("potential-scan.tsv", tsv)?;
    run.write_json("potential-scan.json", &scan)
}

pub fn report_cmd(run: &mut Run) -> CliResult<()> {
    run.allow_tolerances(&[])?;
    let root = run.root().to_path_buf();
    let entries = std::fs::read_dir(&root).map_err(|e| CliError::io(&root, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("manifest.json").is_file())
        .collect();
    dirs.sort();
    let mut runs = Vec::new();
    for dir in dirs {
        let path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: unreadable manifest: {e}", path.display())))?;
        if manifest.subcommand != "report" {
            let name = dir.file_name().unwrap().to_string_lossy().into_owned();
            runs.push((name, manifest));
        }
    }
    if runs.is_empty() {
        return Err(CliError::Usage(format!("no runs under {}", root.display())));
    }
    let mut tsv = String::from("run\tsubcommand\tseed\tcheck\tpass\n");
    let mut summary = Vec::new();
    for (name, m) in &runs {
        for c in &m.checks {
            writeln!(tsv, "{name}\t{}\t{}\t{}\t{}", m.subcommand, m.seed, c.name, c.pass).unwrap();
        }
        let failed: Vec<&str> = m.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        summary.push(json!({
            "run": name,
            "subcommand": m.subcommand,
            "seed": m.seed,
            "input_hash": m.input_hash,
            "checks": m.checks.len(),
            "failed": failed,
        }));
    }
    for (name, m) in &runs {
        let failed: Vec<&str> = m.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let detail = if failed.is_empty() {
            format!("{} checks", m.checks.len())
        } else {
            format!("failed: {}", failed.join(", "))
        };
        run.check(name, failed.is_empty(), detail);
    }
    run.write("report.tsv", tsv)?;
    run.write_json("report.json", &summary)
}
