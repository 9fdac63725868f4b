use thiserror::Error;

/// Errors surfaced by the library. Scientific findings (an inequality that
/// fails, a nonzero residual) are reported as data, not through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at node {node}")]
    NonFinite { node: f64 },

    #[error("fit is degenerate: all abscissae are equal")]
    DegenerateFit,

    #[error("fit needs at least {needed} rows with positive values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("ring radius {radius} needs half-width > {needed}, window has {half_width}")]
    RingOutsideWindow {
        radius: f64,
        needed: f64,
        half_width: usize,
    },

    #[error("value overflows f64 (log-magnitude {log_mag}); use the log-domain variant")]
    Overflow { log_mag: f64 },

    #[error("linear solve stalled at relative residual {residual:e} (step {step})")]
    SolverDivergence { residual: f64, step: usize },

    #[error("observation integral vanishes (log value {log_value})")]
    ZeroObservation { log_value: f64 },

    #[error("test function has relative mass {relative_mass:e} outside the admissible set")]
    SupportViolation { relative_mass: f64 },

    #[error("{check}: defect {defect:e} exceeds tolerance {tolerance:e} (trial seed {trial})")]
    ToleranceExceeded {
        check: String,
        defect: f64,
        tolerance: f64,
        trial: u64,
    },

    #[error("ring repair infeasible: constraint rank {rank}, augmented rank {augmented_rank}")]
    RepairInfeasible { rank: usize, augmented_rank: usize },

    #[error("counterexample verification failed at {} site(s)", .sites.len())]
    VerificationFailure { sites: Vec<(i64, i64)> },

    #[error("dyadic arithmetic overflow")]
    DyadicOverflow,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
