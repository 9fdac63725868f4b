//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs every criterion even when an earlier one fails. Criteria listed in
//! `EXPECTED_FAILURES` still print FAIL but do not fail the target unless
//! `ACCEPTANCE_STRICT=1` is set; any other failure, or an expected failure
//! that passes, exits nonzero. Pass criterion numbers to run a subset.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use carleman_core::carleman::{
    carleman_ratio_batch, commutator_check, conjugation_check, hiding_grid, hiding_inequalities,
    hiding_row, phi_rate_scan, stationary_positivity, symmetry_check, log_radii, OperatorCheckConfig,
    PhiGrowth, RatioConfig, TimeProfile, WeightSpec,
};
use carleman_core::counterexample::{
    build_counterexample, potential_bound_scan, verify_counterexample, CounterexampleSpec, ValueMode,
};
use carleman_core::evolution::{
    evolve, free_fundamental_solution, normalize_observation, EvolutionConfig, Observation,
};
use carleman_core::experiments::{
    beta_grid, k_bessel_weight_check, lambda_scan, log_convexity_check, log_convexity_stability,
    norm_star_equivalence, ExperimentConfig, ScanInput,
};
use carleman_core::lattice::{LatticeField, LatticeWindow, Potential};
use carleman_core::numeric::DecayModel;
use carleman_core::rng::trial_rng;
use num_complex::Complex64;
use rand::Rng;

/// Criteria that fail at their pinned parameters.
const EXPECTED_FAILURES: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// The operator-check grid: d in {1, 2}, R in {5, 10}, alpha = 2 R log R.
fn operator_grid() -> Vec<OperatorCheckConfig> {
    let mut out = Vec::new();
    for d in [1, 2] {
        for r in [5.0, 10.0] {
            let mut cfg = OperatorCheckConfig::new(WeightSpec::from_rule(2.0, r, TimeProfile::paper_phi(), d));
            cfg.trials = 50;
            cfg.seed = 20_240_601;
            out.push(cfg);
        }
    }
    out
}

fn grid_check(
    tol: f64,
    run: impl Fn(&OperatorCheckConfig, f64) -> carleman_core::Result<carleman_core::carleman::CheckReport>,
) -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for cfg in operator_grid() {
        let rep = run(&cfg, tol).expect("check runs");
        pass &= rep.pass;
        parts.push(format!("d={} R={}: {:.1e}", cfg.spec.d, cfg.spec.r, rep.defect));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(pass, format!("max defects [{}], tol {tol:.0e}, {secs:.1}s", parts.join(", ")))
}

fn c1() -> Outcome {
    let start = Instant::now();
    let out = grid_check(1e-9, conjugation_check);
    let secs = start.elapsed().as_secs_f64();
    outcome(out.pass && secs < 60.0, out.detail)
}

fn c2() -> Outcome {
    grid_check(1e-9, symmetry_check)
}

fn c3() -> Outcome {
    grid_check(1e-8, commutator_check)
}

fn c4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for base in operator_grid() {
        let mut cfg = base;
        cfg.spec = WeightSpec::new(base.spec.alpha, base.spec.r, TimeProfile::constant(3.0), base.spec.d);
        cfg.trials = 100;
        let rep = stationary_positivity(&cfg, 1e-12).unwrap();
        pass &= rep.pass;
        parts.push(format!("d={} R={}: {:.1e}", cfg.spec.d, cfg.spec.r, rep.defect));
    }
    outcome(pass, format!("worst negative part / |f|^2 [{}], 100 trials each", parts.join(", ")))
}

fn c5() -> Outcome {
    let spec = WeightSpec::from_rule(2.0, 10.0, TimeProfile::paper_phi(), 1);
    let mut cfg = RatioConfig::new(spec);
    cfg.trials = 500;
    cfg.seed = 1;
    let calib = carleman_ratio_batch(&cfg).unwrap();
    let c = 2.0 * calib.max;
    cfg.seed = 2;
    let held = carleman_ratio_batch(&cfg).unwrap();
    let violations = held.ratios.iter().filter(|&&r| r > c).count();
    outcome(
        violations == 0 && c.is_finite(),
        format!(
            "calibrated constant {:.4e} (2 x {:.4e}), held-out max {:.4e}, {violations} violations in 500",
            c, calib.max, held.max
        ),
    )
}

fn c6() -> Outcome {
    let phi = TimeProfile::paper_phi();
    let grid = hiding_grid(200, 1.0, 5.0);
    let mut pass = true;
    let mut cs = Vec::new();
    for r in [10.0, 20.0, 40.0, 80.0] {
        let rep = hiding_inequalities(r, &phi, &grid);
        let alpha = rep.c_min * r * r.ln();
        let holds = grid.iter().all(|&s| {
            let row = hiding_row(alpha, r, s, rep.sup_d1, rep.sup_d2);
            row.first_holds() && row.second_holds()
        });
        pass &= holds && !rep.vacuous;
        cs.push((r, rep.c_min));
    }
    let monotone = cs[1].1 >= cs[2].1 && cs[2].1 >= cs[3].1;
    let list: Vec<String> = cs.iter().map(|(r, c)| format!("R={r}: {c:.4}")).collect();
    outcome(pass && monotone, format!("minimal c [{}], both inequalities hold at c_min: {pass}", list.join(", ")))
}

fn c7() -> Outcome {
    let w = LatticeWindow::new(1, 60).unwrap();
    let cfg = EvolutionConfig::free(w, 1e-3, 1.0).unwrap().with_stride(1000);
    let traj = evolve(&LatticeField::delta(w), &cfg).unwrap();
    let drift = traj.norm_drift();
    let u = traj.final_field();
    let err = (-20i64..=20)
        .map(|j| (u.get(&[j]) - free_fundamental_solution(j, 1.0)).norm())
        .fold(0.0, f64::max);
    outcome(
        drift <= 1e-10 && err <= 1e-6,
        format!("norm drift {drift:.1e} (tol 1e-10), max |u - i^j J_j(2) e^(-2i)| over |j|<=20 = {err:.3e} (tol 1e-6)"),
    )
}

fn c8() -> Outcome {
    let w = LatticeWindow::new(1, 40).unwrap();
    let cfg = EvolutionConfig::free(w, 1e-3, 1.0).unwrap().with_stride(5);
    let traj = normalize_observation(&evolve(&LatticeField::delta(w), &cfg).unwrap(), Observation::OriginSite).unwrap();
    let scan = lambda_scan(
        ScanInput::Evolution(&traj),
        &ExperimentConfig::new((8..=28).map(f64::from).collect()),
    )
    .unwrap();
    let rlr = scan.fit(DecayModel::RLogR).unwrap();
    let sq = scan.fit(DecayModel::RSq).unwrap();
    outcome(
        rlr.residual < sq.residual,
        format!(
            "RMS log-residual R_logR {:.4} (c = {:.4}) vs R_sq {:.4}",
            rlr.residual, rlr.exponent_constant, sq.residual
        ),
    )
}

fn c9() -> Outcome {
    let w = LatticeWindow::new(1, 40).unwrap();
    let free = EvolutionConfig::free(w, 1e-3, 1.0).unwrap().with_stride(100);
    let traj = evolve(&LatticeField::delta(w), &free).unwrap();
    let rep = log_convexity_check(&traj, &beta_grid(1, 2.0, 81)).unwrap();
    let free_ok = rep.times.len() == 9 && rep.max_rho() <= 1.0 + 1e-10;

    let mut rng = trial_rng(9, 0);
    let raw: Vec<f64> = (0..w.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sup = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let v = Potential::new(w, raw.iter().map(|x| Complex64::new(x / sup, 0.0)).collect()).unwrap();
    let cfg = EvolutionConfig::new(w, v, 1e-3, 1.0).unwrap().with_stride(100);
    let traj = evolve(&LatticeField::delta(w), &cfg).unwrap();
    let st = log_convexity_stability(&traj, 1.0, 41).unwrap();
    outcome(
        free_ok && st.stable,
        format!(
            "free: max rho {:.6} at 9 times; |V|=1: C_emp {:.6} -> {:.6} (change {:.1e})",
            rep.max_rho(),
            st.c_emp[0],
            st.c_emp[1],
            st.relative_change
        ),
    )
}

fn c10() -> Outcome {
    let two = norm_star_equivalence(2, 10_000).unwrap();
    let one = norm_star_equivalence(1, 10_000).unwrap();
    let pass = two.sup_ratio.is_finite()
        && two.inf_ratio.is_finite()
        && two.inf_ratio > 0.0
        && one.sup_ratio == 1.0
        && one.inf_ratio == 1.0;
    outcome(
        pass,
        format!(
            "d=2: sup {:.6} at {:?}, inf {:.6} at {:?}, c_2 = {:.6}; d=1: sup {} inf {}",
            two.sup_ratio, two.argsup, two.inf_ratio, two.arginf, two.c_d, one.sup_ratio, one.inf_ratio
        ),
    )
}

fn c11() -> Outcome {
    let rep = k_bessel_weight_check(1.0, &[5, 10, 20], (20, 200)).unwrap();
    let worst = rep.rows.iter().map(|r| r.relative_defect).fold(0.0, f64::max);
    outcome(
        worst < 1e-8 && rep.growth_relative_error < 0.1,
        format!(
            "constant {:.12}, worst defect {worst:.1e}, growth coefficient {:.4} (error {:.2}%)",
            rep.constant,
            rep.growth_fit[0],
            100.0 * rep.growth_relative_error
        ),
    )
}

fn c12() -> Outcome {
    let radii = log_radii(2.0, 6.0, 10);
    let sqrt_log = phi_rate_scan(PhiGrowth::SqrtLog, 1.0, 1.0, 2, &radii);
    let log = phi_rate_scan(PhiGrowth::Log, 1.0, 1.0, 2, &radii);
    let fails_beyond = sqrt_log.rows.iter().filter(|r| r.r >= 1e4 * (1.0 - 1e-12)).all(|r| !r.holds);
    let r0_ok = log.r0.is_some_and(|r0| log.rows.iter().filter(|r| r.r >= r0).all(|r| r.holds));
    let d1 = phi_rate_scan(PhiGrowth::SqrtLog, 1.0, 1.0, 1, &log_radii(2.0, 9.0, 10));
    outcome(
        fails_beyond && r0_ok,
        format!(
            "d=2: sqrt(log R) fails from R = {:?}, log R holds from R0 = {:?}; d=1 sqrt(log R) fails from {:?}",
            sqrt_log.fails_from, log.r0, d1.fails_from
        ),
    )
}

fn c13() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for r in [10, 20, 40] {
        let ce = build_counterexample(CounterexampleSpec::new(r, ValueMode::Repaired)).unwrap();
        let rep = verify_counterexample(&ce).unwrap();
        pass &= rep.pass();
        notes.push(format!("R={r} repaired {}", if rep.pass() { "ok" } else { "FAILED" }));
    }
    let scan = potential_bound_scan(&[10, 20, 40], ValueMode::Repaired, 60).unwrap();
    pass &= scan.identical;
    notes.push(format!("sup|V| = {} at all R: {}", scan.sup_potential[0], scan.identical));
    let lit = verify_counterexample(&build_counterexample(CounterexampleSpec::new(20, ValueMode::LiteralPaper)).unwrap()).unwrap();
    let mut sites: Vec<(i64, i64)> = lit.diamond_residuals.iter().map(|s| s.site).collect();
    sites.sort();
    let expected = vec![(-2, 20), (0, 18), (0, 22), (2, 20)];
    let literal_ok = sites == expected;
    pass &= literal_ok;
    let residuals: Vec<String> = lit
        .diamond_residuals
        .iter()
        .map(|s| format!("({},{}) {}", s.site.0, s.site.1, s.residual))
        .collect();
    notes.push(format!("literal R=20 residuals: [{}]", residuals.join(", ")));
    outcome(pass, notes.join("; "))
}

/// Serialized outputs of several scans, for byte comparison across pool sizes.
fn scan_bytes() -> Vec<u8> {
    let mut out = Vec::new();
    let w = LatticeWindow::new(1, 30).unwrap();
    let traj = evolve(&LatticeField::delta(w), &EvolutionConfig::free(w, 0.005, 1.0).unwrap()).unwrap();
    let scan = lambda_scan(ScanInput::Evolution(&traj), &ExperimentConfig::new((6..=20).map(f64::from).collect())).unwrap();
    out.extend(scan.to_tsv().into_bytes());
    out.extend(serde_json::to_vec(&scan).unwrap());
    let mut cfg = OperatorCheckConfig::new(WeightSpec::from_rule(2.0, 6.0, TimeProfile::paper_phi(), 2));
    cfg.trials = 12;
    cfg.seed = 77;
    out.extend(serde_json::to_vec(&commutator_check(&cfg, 1e-8).unwrap()).unwrap());
    let mut rc = RatioConfig::new(WeightSpec::from_rule(2.0, 8.0, TimeProfile::paper_phi(), 1));
    rc.trials = 40;
    out.extend(serde_json::to_vec(&carleman_ratio_batch(&rc).unwrap()).unwrap());
    out.extend(serde_json::to_vec(&norm_star_equivalence(2, 300).unwrap()).unwrap());
    out.extend(serde_json::to_vec(&hiding_inequalities(20.0, &TimeProfile::paper_phi(), &hiding_grid(200, 1.0, 5.0))).unwrap());
    out.extend(serde_json::to_vec(&potential_bound_scan(&[10, 12], ValueMode::Repaired, 20).unwrap()).unwrap());
    out
}

fn c14() -> Outcome {
    let runs: Vec<Vec<u8>> = [1usize, 4, 8]
        .iter()
        .map(|&n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(scan_bytes)
        })
        .collect();
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("{} bytes per run, identical at 1/4/8 workers: {same}", runs[0].len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 14] = [
        (1, "conjugation identity", c1),
        (2, "symmetry / skew-symmetry", c2),
        (3, "commutator identity", c3),
        (4, "stationary positivity", c4),
        (5, "Carleman inequality held-out", c5),
        (6, "hiding inequalities", c6),
        (7, "unitarity and fundamental solution", c7),
        (8, "decay-model selection", c8),
        (9, "log-convexity", c9),
        (10, "norm-star equivalence", c10),
        (11, "K-Bessel identity", c11),
        (12, "absorption threshold", c12),
        (13, "counterexample", c13),
        (14, "determinism", c14),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut failed = Vec::new();
    let mut unexpected = Vec::new();
    let mut stdout = std::io::stdout();
    for (n, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let expected_fail = EXPECTED_FAILURES.contains(&n);
        let tag = match (result.pass, expected_fail) {
            (true, false) => "PASS",
            (true, true) => "PASS (expected FAIL)",
            (false, false) => "FAIL",
            (false, true) => "FAIL (expected)",
        };
        writeln!(
            stdout,
            "criterion {n:>2} {tag} {name} ({:.1}s): {}",
            start.elapsed().as_secs_f64(),
            result.detail
        )
        .unwrap();
        stdout.flush().unwrap();
        if !result.pass {
            failed.push(n);
        }
        if result.pass == expected_fail || (strict && !result.pass) {
            unexpected.push(n);
        }
    }
    if failed.is_empty() {
        writeln!(stdout, "acceptance: all criteria passed").unwrap();
    } else {
        writeln!(stdout, "acceptance: failed criteria {failed:?}").unwrap();
    }
    if !unexpected.is_empty() {
        writeln!(stdout, "acceptance: unexpected outcome for criteria {unexpected:?}").unwrap();
        std::process::exit(1);
    }
}
