//! Reverse generation.
//!
//! The Poisson sampler starts from zero counts at the lowest SNR of a
//! log-spaced ladder and climbs to the highest, re-estimating the clean
//! signal at every rung; the final estimate is the sample. The Gaussian
//! baseline is the ancestral chain of a linear-β variance-preserving
//! diffusion driven by an `x₀`-predicting denoiser.
//!
//! Each sample owns the random substream indexed by its position, so output
//! does not depend on chunking or thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{NoiseKind, SnrPoint};
use crate::denoiser::Denoiser;
use crate::error::{domain, Error, Result};
use crate::math::dist::{poisson_unchecked, zero_truncated_poisson};
use crate::math::RngStream;

const CHUNK: usize = 1024;

/// Log-spaced SNR ladder. `t = T` is the lowest SNR and `t = 1` the highest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSchedule {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// `γ_T, …, γ_1`: the order in which the chain visits them (increasing).
    pub gammas: Vec<f64>,
}

impl GammaSchedule {
    pub fn steps(&self) -> usize {
        self.gammas.len()
    }

    /// `γ_t` for `t` in `1..=T`.
    pub fn gamma(&self, t: usize) -> f64 {
        self.gammas[self.gammas.len() - t]
    }
}

/// `γ_t = exp(α_min + (T − t)/(T − 1) · (α_max − α_min))`.
pub fn make_schedule(steps: usize, alpha_min: f64, alpha_max: f64) -> Result<GammaSchedule> {
    if steps < 2 {
        return domain(format!("a schedule needs at least 2 steps, got {steps}"));
    }
    if !(alpha_min < alpha_max) || !alpha_min.is_finite() || !alpha_max.is_finite() {
        return domain(format!(
            "need finite alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"
        ));
    }
    let span = alpha_max - alpha_min;
    let last = (steps - 1) as f64;
    let gammas = (0..steps)
        .map(|i| (alpha_min + i as f64 / last * span).exp())
        .collect();
    Ok(GammaSchedule {
        alpha_min,
        alpha_max,
        gammas,
    })
}

/// Sampling window `loc ± 2·scale` around the training log-SNR logistic.
pub fn default_alpha_window(loc: f64, scale: f64) -> (f64, f64) {
    (loc - 2.0 * scale, loc + 2.0 * scale)
}

/// How counts move from one rung of the ladder to the next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReverseUpdate {
    /// Fresh draw `z' ~ Poisson(γ' x̂)`.
    Resample,
    /// Independent increment `z' = z + Poisson((γ' − γ) x̂)`.
    Thicken,
    /// As `Thicken`, but the chance of no new count uses the trapezoid rule
    /// on the intensity `x̂(z, ·)` over the step; given at least one count,
    /// the increment is zero-truncated Poisson with the left-end rate.
    #[default]
    CorrectedThicken,
}

impl std::str::FromStr for ReverseUpdate {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "resample" => Ok(ReverseUpdate::Resample),
            "thicken" => Ok(ReverseUpdate::Thicken),
            "corrected_thicken" => Ok(ReverseUpdate::CorrectedThicken),
            other => Err(format!(
                "unknown update '{other}' (expected resample, thicken or corrected_thicken)"
            )),
        }
    }
}

/// Generated samples: the continuous final estimates and their
/// round-half-even lattice values.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub values: Vec<f64>,
    pub rounded: Vec<i64>,
}

impl Samples {
    fn from_values(values: Vec<f64>) -> Self {
        let rounded = values.iter().map(|v| v.round_ties_even() as i64).collect();
        Self { values, rounded }
    }
}

fn check_estimates(est: &[f64], step: usize) -> Result<()> {
    if let Some(v) = est.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Numeric {
            step,
            what: format!(
                "denoiser returned {v}; poisson sampling needs non-negative finite estimates"
            ),
        });
    }
    Ok(())
}

/// Runs the Poisson reverse chain for `n` samples.
pub fn reverse_sample<D: Denoiser>(
    model: &D,
    schedule: &GammaSchedule,
    update: ReverseUpdate,
    n: usize,
    rng: &RngStream,
) -> Result<Samples> {
    if model.noise() != NoiseKind::Poisson {
        return domain("reverse_sample needs a poisson denoiser");
    }
    let chunks: Vec<(usize, usize)> = (0..n)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(n)))
        .collect();
    let parts: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut rngs: Vec<RngStream> = (lo..hi).map(|i| rng.substream(i as u64)).collect();
            poisson_chain(model, schedule, update, &mut rngs)
        })
        .collect::<Result<_>>()?;
    let values = parts
        .concat()
        .into_iter()
        .map(|x| model.from_channel(x).max(0.0))
        .collect();
    Ok(Samples::from_values(values))
}

fn poisson_chain<D: Denoiser>(
    model: &D,
    schedule: &GammaSchedule,
    update: ReverseUpdate,
    rngs: &mut [RngStream],
) -> Result<Vec<f64>> {
    let g = &schedule.gammas;
    let m = rngs.len();
    let mut z = vec![0.0; m];
    let mut est = model.denoise(&z, SnrPoint::from_gamma(g[0]))?;
    check_estimates(&est, 0)?;
    for s in 1..g.len() {
        let snr = SnrPoint::from_gamma(g[s]);
        let dg = g[s] - g[s - 1];
        match update {
            ReverseUpdate::Resample => {
                for (zi, (r, &a)) in z.iter_mut().zip(rngs.iter_mut().zip(&est)) {
                    *zi = poisson_unchecked(r, g[s] * a) as f64;
                }
                est = model.denoise(&z, snr)?;
            }
            ReverseUpdate::Thicken => {
                for (zi, (r, &a)) in z.iter_mut().zip(rngs.iter_mut().zip(&est)) {
                    *zi += poisson_unchecked(r, dg * a) as f64;
                }
                est = model.denoise(&z, snr)?;
            }
            ReverseUpdate::CorrectedThicken => {
                let right = model.denoise(&z, snr)?;
                check_estimates(&right, s)?;
                let mut jumped = Vec::new();
                for i in 0..m {
                    let p_none = (-0.5 * dg * (est[i] + right[i])).exp();
                    if rngs[i].uniform() > p_none {
                        z[i] += zero_truncated_poisson(&mut rngs[i], dg * est[i]) as f64;
                        jumped.push(i);
                    }
                }
                est = right;
                if !jumped.is_empty() {
                    let zj: Vec<f64> = jumped.iter().map(|&i| z[i]).collect();
                    let fresh = model.denoise(&zj, snr)?;
                    for (&i, v) in jumped.iter().zip(fresh) {
                        est[i] = v;
                    }
                }
            }
        }
        check_estimates(&est, s)?;
    }
    Ok(est)
}

/// Linear variance schedule `β_t` from `beta_min` to `beta_max` over `steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearBetaSchedule {
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
}

impl Default for LinearBetaSchedule {
    fn default() -> Self {
        Self {
            beta_min: 1e-4,
            beta_max: 2e-2,
            steps: 100,
        }
    }
}

impl LinearBetaSchedule {
    pub fn betas(&self) -> Vec<f64> {
        let t = self.steps;
        (0..t)
            .map(|i| {
                let f = if t == 1 {
                    0.0
                } else {
                    i as f64 / (t - 1) as f64
                };
                self.beta_min + f * (self.beta_max - self.beta_min)
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0
            || !(self.beta_min > 0.0)
            || !(self.beta_max < 1.0)
            || self.beta_min > self.beta_max
        {
            return domain(format!("invalid beta schedule {self:?}"));
        }
        Ok(())
    }
}

/// Ancestral sampling with `x₀` prediction. Values are mapped back to data
/// units and clipped at zero.
pub fn gaussian_reverse_sample<D: Denoiser>(
    model: &D,
    schedule: &LinearBetaSchedule,
    n: usize,
    rng: &RngStream,
) -> Result<Samples> {
    if model.noise() != NoiseKind::Gaussian {
        return domain("gaussian_reverse_sample needs a gaussian denoiser");
    }
    schedule.validate()?;
    let betas = schedule.betas();
    let mut abar = Vec::with_capacity(betas.len());
    let mut acc = 1.0;
    for b in &betas {
        acc *= 1.0 - b;
        abar.push(acc);
    }
    let chunks: Vec<(usize, usize)> = (0..n)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(n)))
        .collect();
    let parts: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut rngs: Vec<RngStream> = (lo..hi).map(|i| rng.substream(i as u64)).collect();
            gaussian_chain(model, &betas, &abar, &mut rngs)
        })
        .collect::<Result<_>>()?;
    let values = parts
        .concat()
        .into_iter()
        .map(|x| model.from_channel(x).max(0.0))
        .collect();
    Ok(Samples::from_values(values))
}

fn gaussian_chain<D: Denoiser>(
    model: &D,
    betas: &[f64],
    abar: &[f64],
    rngs: &mut [RngStream],
) -> Result<Vec<f64>> {
    let mut z: Vec<f64> = rngs.iter_mut().map(|r| r.std_normal()).collect();
    for t in (0..betas.len()).rev() {
        let ab = abar[t];
        let snr = SnrPoint::from_gamma(ab / (1.0 - ab));
        let s = 1.0 / (1.0 - ab).sqrt();
        let obs: Vec<f64> = z.iter().map(|v| v * s).collect();
        let x0 = model.denoise(&obs, snr)?;
        if let Some(v) = x0.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                step: betas.len() - t,
                what: format!("denoiser returned {v}"),
            });
        }
        if t == 0 {
            return Ok(x0);
        }
        let ab_prev = abar[t - 1];
        let beta = betas[t];
        let c0 = ab_prev.sqrt() * beta / (1.0 - ab);
        let ct = (1.0 - beta).sqrt() * (1.0 - ab_prev) / (1.0 - ab);
        let sd = ((1.0 - ab_prev) / (1.0 - ab) * beta).sqrt();
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = c0 * x0[i] + ct * *zi + sd * rngs[i].std_normal();
        }
    }
    unreachable!("schedule has at least one step")
}
