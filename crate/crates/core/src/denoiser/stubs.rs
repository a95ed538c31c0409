//! Denoisers with known behaviour, used as oracles for the sampler and the
//! likelihood estimator.

use super::Denoiser;
use crate::channel::{NoiseKind, SnrPoint};
use crate::error::{domain, Result};
use crate::oracle::Prior;

/// Ignores the observation and returns a fixed value.
#[derive(Clone, Copy, Debug)]
pub struct ConstantDenoiser {
    pub value: f64,
    pub noise: NoiseKind,
}

impl Denoiser for ConstantDenoiser {
    fn noise(&self) -> NoiseKind {
        self.noise
    }

    fn denoise(&self, obs: &[f64], _snr: SnrPoint) -> Result<Vec<f64>> {
        Ok(vec![self.value; obs.len()])
    }
}

/// The exact Poisson-channel posterior mean under a known prior.
#[derive(Clone, Debug)]
pub struct PosteriorMeanDenoiser {
    pub prior: Prior,
}

impl PosteriorMeanDenoiser {
    pub fn new(prior: impl Into<Prior>) -> Self {
        Self {
            prior: prior.into(),
        }
    }
}

impl Denoiser for PosteriorMeanDenoiser {
    fn noise(&self) -> NoiseKind {
        NoiseKind::Poisson
    }

    fn denoise(&self, obs: &[f64], snr: SnrPoint) -> Result<Vec<f64>> {
        obs.iter()
            .map(|&z| {
                if !(z >= 0.0) || z.fract() != 0.0 {
                    return domain(format!("poisson observation must be a count, got {z}"));
                }
                self.prior.posterior_mean(snr.gamma, z as u64)
            })
            .collect()
    }
}

/// Posterior mean `tanh(√γ z)` for an equiprobable ±1 source observed
/// through the Gaussian channel `z = √γ x + N(0, 1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BinaryTanhDenoiser;

impl Denoiser for BinaryTanhDenoiser {
    fn noise(&self) -> NoiseKind {
        NoiseKind::Gaussian
    }

    fn denoise(&self, obs: &[f64], snr: SnrPoint) -> Result<Vec<f64>> {
        let s = snr.gamma.sqrt();
        Ok(obs.iter().map(|&z| (s * z).tanh()).collect())
    }
}
