//! Forward corruption processes and log-SNR bookkeeping.
//!
//! The Poisson channel observes `Z ~ Poisson(γ (x + ε))`; the Gaussian channel
//! observes `Z = √γ x + N(0, 1)`. Both are indexed by SNR `γ` or, equivalently,
//! log-SNR `α = ln γ`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::math::dist::poisson_unchecked;
use crate::math::RngStream;

/// Default shift applied to clean inputs inside the Poisson channel so that
/// zero-valued inputs still produce a non-degenerate rate.
pub const DEFAULT_EPS_SHIFT: f64 = 1e-6;

/// A point on the SNR axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrPoint {
    pub alpha: f64,
    pub gamma: f64,
}

impl SnrPoint {
    pub fn from_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            gamma: alpha.exp(),
        }
    }

    pub fn from_gamma(gamma: f64) -> Self {
        Self {
            alpha: gamma.ln(),
            gamma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Poisson,
    Gaussian,
}

impl std::str::FromStr for NoiseKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(NoiseKind::Poisson),
            "gaussian" => Ok(NoiseKind::Gaussian),
            other => Err(format!(
                "unknown noise '{other}' (expected poisson or gaussian)"
            )),
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseKind::Poisson => "poisson",
            NoiseKind::Gaussian => "gaussian",
        })
    }
}

/// Componentwise `z_i ~ Poisson(γ (x_i + eps))`.
pub fn corrupt_poisson(x: &[f64], gamma: f64, eps: f64, rng: &mut RngStream) -> Result<Vec<u64>> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("snr must be positive and finite, got {gamma}"));
    }
    if let Some(bad) = x.iter().find(|v| !(**v >= 0.0)) {
        return domain(format!("poisson channel cannot carry negative input {bad}"));
    }
    Ok(x.iter()
        .map(|&xi| poisson_unchecked(rng, gamma * (xi + eps)))
        .collect())
}

/// `z̃ = z / (1 + γ)`, which stays within `[0, x]` with high probability.
pub fn normalize_observation(z: &[u64], gamma: f64) -> Vec<f64> {
    let scale = 1.0 / (1.0 + gamma);
    z.iter().map(|&zi| zi as f64 * scale).collect()
}

/// `z_i = √γ x_i + n_i` with standard normal `n_i`.
pub fn corrupt_gaussian(x: &[f64], gamma: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return domain(format!("snr must be finite and >= 0, got {gamma}"));
    }
    let s = gamma.sqrt();
    Ok(x.iter().map(|&xi| s * xi + rng.std_normal()).collect())
}
