//! Carleman weights, the conjugated operators `S` and `A`, their commutator,
//! and the inequalities used to absorb lower-order terms.

mod absorption;
mod checks;
mod hiding;
mod operators;
mod profile;
mod ratio;
mod weight;

pub use absorption::{
    absorption_log_lhs, absorption_threshold, growth_factor_log, log_radii, phi_rate_scan,
    PhiGrowth, ThresholdRow, ThresholdScan,
};
pub use checks::{
    commutator_check, commutator_form, commutator_sample, conjugation_check,
    stationary_positivity, symmetry_check, CheckReport, CommutatorSample, OperatorCheckConfig,
};
pub use hiding::{
    hiding_grid, hiding_inequalities, hiding_row, ln_cosh, ln_sinh, HidingReport, HidingRow,
    Reductions,
};
pub use operators::{pairing, Bump, Jet, NodeCoefficients, OperatorTables, TestFunction};
pub use profile::{golden_max, smooth_step, CutoffSet, ProfileKind, SmoothingTag, TimeProfile};
pub use ratio::{
    carleman_ratio, carleman_ratio_batch, ratio_rule, AdmissibleField, RatioBatch, RatioConfig,
};
pub use weight::{weight_at, WeightSpec};
