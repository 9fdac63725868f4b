mod commands;
mod error;
mod params;
mod run;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::params::ParamArgs;
use crate::run::Run;

#[derive(Parser, Debug)]
#[command(name = "carleman", version, about = "Checks and scans for weighted estimates of the discrete Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    params: ParamArgs,

    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, env = "CARLEMAN_THREADS", hide = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Trapezoidal evolution from a decaying datum (--mode delta|gaussian|bessel_like).
    #[command(after_help = "Outputs:\n  evolve.tsv      t, norm, relative_drift\n  evolve.json     drift summary and, for the free delta in d=1, the error against i^|j| J_j(2t) e^{-2it}\n  trajectory/     binary snapshots and their manifest\nTolerances: norm (1e-10), fundamental (1e-6)")]
    Evolve,
    /// Conjugation and symmetry identities plus a calibrated Carleman ratio check.
    #[command(after_help = "Outputs:\n  carleman-check.tsv   batch, trial, ratio\n  carleman-check.json  the check reports and calibration summary\nTolerances: conjugation (1e-9), symmetry (1e-9), ratio_factor (2)")]
    CarlemanCheck,
    /// Commutator identity on random tensor-product test functions.
    #[command(after_help = "Outputs:\n  commutator-check.json  check report with per-term details\nTolerances: commutator (1e-8)")]
    CommutatorCheck,
    /// Minimal constant c for the two hiding inequalities, per radius.
    #[command(after_help = "Outputs:\n  hiding-scan.tsv   R, sup_phi1, sup_phi2, c_min_first, c_min_second, c_min, vacuous\n  hiding-scan.json  full reports")]
    HidingScan,
    /// Ring masses lambda(R) of the normalized free or perturbed evolution.
    #[command(after_help = "Outputs:\n  lambda-scan.tsv   R, log_lambda, alpha, log_lhs_growth, pass_absorption, boundary_mass\n  lambda-scan.json  rows, decay-model fits, best model")]
    LambdaScan,
    /// Weighted log-convexity ratio rho(beta, t) along an evolution.
    #[command(after_help = "Outputs:\n  logconvexity.tsv   beta, t, log_rho\n  logconvexity.json  report (and the beta-doubling comparison when L > 0)\nTolerances: rho (1e-10), stability (0.2)")]
    Logconvexity,
    /// Exhaustive comparison of the star norm with the Euclidean norm (--M is the scan bound).
    #[command(after_help = "Outputs:\n  normstar.tsv   d, j_max, points, sup_ratio, inf_ratio, c_d\n  normstar.json  report with extremal sites")]
    Normstar,
    /// Weight integral against K_{mu j}(2/e) (--R-list gives the orders j).
    #[command(after_help = "Outputs:\n  kbessel.tsv   j, log_integral, log_bessel, relative_defect\n  kbessel.json  report with growth fit\nTolerances: identity (1e-8), growth (0.1)")]
    Kbessel,
    /// Absorption test sinh(2a/R^2) sinh^2(2a/(sqrt(d) R)) >= L^2 for a = c R phi(R) (--mode log|sqrt_log).
    #[command(after_help = "Outputs:\n  threshold-scan.tsv   R, phi_R, alpha, log_lhs, log_growth, holds\n  threshold-scan.json  scan with R0 and failure onset")]
    ThresholdScan,
    /// Build, verify and save the dyadic counterexample (--mode repaired|literal_paper).
    #[command(after_help = "Outputs:\n  counterexample.field/.json/.exact.json  saved field\n  counterexample-residuals.tsv  j1, j2, residual, residual_f64\n  counterexample-report.json    verification and ring repair certificate")]
    Counterexample,
    /// Re-verify a saved counterexample (--input FILE.json) or a fresh one.
    #[command(after_help = "Outputs:\n  verify-counterexample-residuals.tsv  j1, j2, residual, residual_f64\n  verify-counterexample.json           verification report")]
    VerifyCounterexample,
    /// Exact sup of the counterexample potential across radii.
    #[command(after_help = "Outputs:\n  potential-scan.tsv   R, sup_V, sup_V_f64\n  potential-scan.json  scan")]
    PotentialScan,
    /// Summarize every run manifest under --out.
    #[command(after_help = "Outputs:\n  report.tsv   run, subcommand, seed, check, pass\n  report.json  one entry per run")]
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::CarlemanCheck => "carleman-check",
            Command::CommutatorCheck => "commutator-check",
            Command::HidingScan => "hiding-scan",
            Command::LambdaScan => "lambda-scan",
            Command::Logconvexity => "logconvexity",
            Command::Normstar => "normstar",
            Command::Kbessel => "kbessel",
            Command::ThresholdScan => "threshold-scan",
            Command::Counterexample => "counterexample",
            Command::VerifyCounterexample => "verify-counterexample",
            Command::PotentialScan => "potential-scan",
            Command::Report => "report",
        }
    }
}

fn execute(cli: &Cli) -> CliResult<i32> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("CARLEMAN_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let params = cli.params.resolve()?;
    let mut run = Run::new(cli.command.name(), params, cli.params.out.clone());
    let f = match cli.command {
        Command::Evolve => commands::evolve_cmd,
        Command::CarlemanCheck => commands::carleman_check_cmd,
        Command::CommutatorCheck => commands::commutator_check_cmd,
        Command::HidingScan => commands::hiding_scan_cmd,
        Command::LambdaScan => commands::lambda_scan_cmd,
        Command::Logconvexity => commands::logconvexity_cmd,
        Command::Normstar => commands::normstar_cmd,
        Command::Kbessel => commands::kbessel_cmd,
        Command::ThresholdScan => commands::threshold_scan_cmd,
        Command::Counterexample => commands::counterexample_cmd,
        Command::VerifyCounterexample => commands::verify_counterexample_cmd,
        Command::PotentialScan => commands::potential_scan_cmd,
        Command::Report => commands::report_cmd,
    };
    f(&mut run)?;
    run.finish()
}

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => execute(&cli).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        }),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    };
    std::process::exit(code);
}
