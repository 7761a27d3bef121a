//! Executable extracted bounds and numeric checks of their contracts.

pub mod bounds;
mod checks;
mod pointwise;
mod report;

use thiserror::Error;

use crate::creal::ExprError;
use crate::majorizer::Sample;

pub use bounds::{cri_mesh_bound, ftc_bound, ivt_grid, ulc_modulus, wei_grid};
pub use checks::{
    check_cri, check_fixed_point, check_ftc, check_ftc_second, check_ivt, check_ulc, check_uniform_convergence,
    check_uniform_modulus, check_wei, fixed_point_approx, ftc_difference, ftc_precision, ftc_second_bound,
    grid_argmax, integral_of_quotient, ivt_approx, wei_approx, wei_unique_limit, DEFAULT_SEED,
};
pub use pointwise::{check_uniformized, uniformize_pointwise_modulus, PointwiseModulus};
pub use report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("monotonicity refuted at k = {k}: {v} is majorized by {u} but its value is not")]
    ProvisoViolated { k: u64, u: Sample, v: Sample },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expression error: {0}")]
    Expr(#[from] ExprError),
}
