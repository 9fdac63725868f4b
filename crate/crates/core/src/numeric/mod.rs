//! Extended-range scalars, quadrature, deterministic sums and least squares.

pub mod dd;
pub mod fit;
pub mod log_scalar;
pub mod quadrature;
pub mod sum;

pub use dd::{Dd, DdComplex};
pub use fit::{fit_decay, least_squares, DecayModel, FitResult};
pub use log_scalar::{log_add, LogComplex, LogScalar};
pub use quadrature::{integrate, integrate_complex, integrate_log, Integral, QuadratureRule};
pub use sum::{pairwise_reduce, pairwise_sum, CompensatedSum};
