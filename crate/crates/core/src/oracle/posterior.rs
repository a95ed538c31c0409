use super::{EmpiricalPmf, FinitePrior, GammaPrior};
use crate::error::{domain, Error, Result};

/// (shape + z) / (rate + γ): the Gamma(shape + z, rate + γ) posterior mean.
///
/// `gamma = 0` returns the prior mean.
pub fn gamma_posterior_mean(prior: &GammaPrior, gamma: f64, z: u64) -> f64 {
    (prior.shape() + z as f64) / (prior.rate() + gamma)
}

/// Geometric marginal `(1 − p) p^z` with `p = γ / (rate + γ)`, the channel
/// output law under an exponential prior.
pub fn exp_prior_marginal_pmf(rate: f64, gamma: f64, z: u64) -> f64 {
    let p = gamma / (rate + gamma);
    (rate / (rate + gamma)) * p.powf(z as f64)
}

/// Anything that can report a marginal output probability `P(Z = z)`.
pub trait MarginalPmf {
    fn pmf(&self, z: u64) -> f64;
}

impl MarginalPmf for EmpiricalPmf {
    fn pmf(&self, z: u64) -> f64 {
        self.prob(z)
    }
}

/// Adapts a closure `z -> P(Z = z)` to [`MarginalPmf`].
pub struct ExactMarginal<F>(pub F);

impl<F: Fn(u64) -> f64> MarginalPmf for ExactMarginal<F> {
    fn pmf(&self, z: u64) -> f64 {
        (self.0)(z)
    }
}

/// Posterior mean from the marginal alone: `(z + 1) P(z + 1) / (γ P(z))`.
pub fn tgr_estimate(marginal: &dyn MarginalPmf, gamma: f64, z: u64) -> Result<f64> {
    if !(gamma > 0.0) {
        return domain(format!("snr must be positive, got {gamma}"));
    }
    let pz = marginal.pmf(z);
    if !(pz > 0.0) {
        return Err(Error::UndefinedConditional { z });
    }
    Ok((z + 1) as f64 * marginal.pmf(z + 1) / (gamma * pz))
}

/// E[X | Z_γ = z] by enumerating the atoms in log space.
pub fn finite_posterior_mean(prior: &FinitePrior, gamma: f64, z: u64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("snr must be positive and finite, got {gamma}"));
    }
    prior.posterior_moment(gamma, z, 1)
}
