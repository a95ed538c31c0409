//! Numerical kernel shared by every other module: special functions, the
//! reconstruction-loss family and seeded sampling primitives.
//!
//! All probabilities are handled in log space; linear PMFs are produced by
//! exponentiation only at API boundaries.

pub mod dist;
pub mod loss;
pub mod rng;
pub mod special;

pub use dist::{gamma_sample, poisson_sample, POISSON_INVERSION_CUTOFF};
pub use loss::{l0, prl, prl_unchecked, squared_error, LossKind};
pub use rng::RngStream;
pub use special::{
    digamma, digamma_succ_minus_log, digamma_succ_minus_log_real, hurwitz_zeta, ln_beta, ln_gamma,
    log_factorial, log_sum_exp, logistic_cdf, logistic_pdf, logistic_quantile, poisson_log_pmf,
    poisson_window, sigmoid, softplus, zeta,
};
