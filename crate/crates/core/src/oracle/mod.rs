//! Exact and brute-force ground truth for the Poisson channel.
//!
//! Everything here is computed from a known prior: posterior means (by
//! conjugacy or by enumeration), marginal PMFs, the minimum reconstruction
//! loss, mutual information and the analytic tail bounds used to close the
//! likelihood integral. These values serve as the reference against which
//! learned denoisers and the likelihood estimator are checked.
//!
//! Gamma priors use the shape/rate convention throughout: density
//! `b^a x^{a-1} e^{-bx} / Γ(a)` with mean `a/b`. A prior written in
//! shape/scale form `Gam(k, θ)` maps to `GammaPrior::new(k, 1/θ)`.

mod info;
mod mprl;
mod posterior;
mod tails;

pub use info::{
    mutual_information_derivative, mutual_information_finite, pointwise_kl, poisson_entropy,
};
pub use mprl::{
    exp_prior_mprl_series, exp_prior_partial_integral, marginal_mprl, pointwise_mprl,
    pointwise_mprl_window,
};
pub use posterior::{
    exp_prior_marginal_pmf, finite_posterior_mean, gamma_posterior_mean, tgr_estimate,
    ExactMarginal, MarginalPmf,
};
pub use tails::{left_tail_bound, right_tail_bound};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::math::dist::gamma_unit;
use crate::math::RngStream;

/// Tail mass left out of every truncated sum over channel outputs.
pub const TAIL_MASS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    shape: f64,
    rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
            return domain(format!(
                "gamma prior needs shape, rate > 0 (got {shape}, {rate})"
            ));
        }
        Ok(Self { shape, rate })
    }

    /// Exponential prior with the given rate (shape 1).
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(1.0, rate)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        gamma_unit(rng, self.shape) / self.rate
    }
}

/// A prior with finitely many atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinitePrior {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl FinitePrior {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return domain(format!(
                "support and probs must be non-empty and equal length ({} vs {})",
                support.len(),
                probs.len()
            ));
        }
        if !support.iter().all(|x| *x >= 0.0 && x.is_finite()) {
            return domain("support values must be finite and >= 0");
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return domain("support must be strictly increasing");
        }
        if !probs.iter().all(|p| *p >= 0.0) {
            return domain("probabilities must be >= 0");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("probabilities sum to {total}, expected 1"));
        }
        Ok(Self { support, probs })
    }

    /// Normalizes non-negative weights before validating.
    pub fn from_weights(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return domain("weights must have a positive finite sum");
        }
        let probs = weights.iter().map(|w| w / total).collect();
        Self::new(support, probs)
    }

    pub fn uniform(support: Vec<f64>) -> Result<Self> {
        let n = support.len();
        Self::from_weights(support, vec![1.0; n])
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * p)
            .sum()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|p| **p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        let mut acc = 0.0;
        for (x, p) in self.support.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return *x;
            }
        }
        *self.support.last().unwrap()
    }

    /// `ln p(x_j) + ln P(z | x_j)` for every atom.
    pub(crate) fn log_joint(&self, gamma: f64, z: u64) -> Vec<f64> {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&x, &p)| p.ln() + crate::math::poisson_log_pmf(z, gamma * x))
            .collect()
    }

    /// ln P(Z_γ = z).
    pub fn marginal_log_pmf(&self, gamma: f64, z: u64) -> f64 {
        crate::math::log_sum_exp(&self.log_joint(gamma, z))
    }

    /// E[X^k | Z_γ = z] by enumeration.
    pub fn posterior_moment(&self, gamma: f64, z: u64, k: i32) -> Result<f64> {
        let lj = self.log_joint(gamma, z);
        let m = lj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Err(crate::Error::Underflow { z });
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (x, l) in self.support.iter().zip(&lj) {
            let w = (l - m).exp();
            num += w * x.powi(k);
            den += w;
        }
        Ok(num / den)
    }

    /// Smallest output window covering every atom's channel law up to `tail`.
    pub(crate) fn output_range(&self, gamma: f64, tail: f64) -> (u64, u64) {
        self.support
            .iter()
            .map(|&x| crate::math::poisson_window(gamma * x, tail))
            .fold((u64::MAX, 0), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }
}

/// Either kind of prior; the oracle functions accept both where meaningful.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Prior {
    Gamma(GammaPrior),
    Finite(FinitePrior),
}

impl Prior {
    pub fn mean(&self) -> f64 {
        match self {
            Prior::Gamma(g) => g.mean(),
            Prior::Finite(f) => f.mean(),
        }
    }

    /// Exact posterior mean E[X | Z_γ = z].
    pub fn posterior_mean(&self, gamma: f64, z: u64) -> Result<f64> {
        match self {
            Prior::Gamma(g) => Ok(gamma_posterior_mean(g, gamma, z)),
            Prior::Finite(f) => finite_posterior_mean(f, gamma, z),
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Prior::Gamma(g) => g.sample(rng),
            Prior::Finite(f) => f.sample(rng),
        }
    }
}

impl From<GammaPrior> for Prior {
    fn from(p: GammaPrior) -> Self {
        Prior::Gamma(p)
    }
}

impl From<FinitePrior> for Prior {
    fn from(p: FinitePrior) -> Self {
        Prior::Finite(p)
    }
}

/// Histogram of non-negative integer samples over `0..=k`.
///
/// Samples above `k` are tallied in `overflow`, so `counts` sums to
/// `n - overflow` and the PMF over the support sums to the in-support
/// fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    counts: Vec<u64>,
    n: u64,
    overflow: u64,
}

impl EmpiricalPmf {
    pub fn from_samples(samples: impl IntoIterator<Item = u64>, k: usize) -> Self {
        let mut counts = vec![0u64; k + 1];
        let (mut n, mut overflow) = (0u64, 0u64);
        for s in samples {
            n += 1;
            match counts.get_mut(s as usize) {
                Some(c) => *c += 1,
                None => overflow += 1,
            }
        }
        Self {
            counts,
            n,
            overflow,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn prob(&self, z: u64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.counts
            .get(z as usize)
            .map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    pub fn probs(&self) -> Vec<f64> {
        (0..self.counts.len() as u64)
            .map(|z| self.prob(z))
            .collect()
    }
}
