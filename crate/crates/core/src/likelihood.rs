//! Negative log-likelihood estimation by quadrature over log-SNR.
//!
//! For the Poisson channel the NLL of a sample is bounded by
//! `∫ e^α E[prl(x, x̂(z_α))] dα`, with equality for the posterior-mean
//! denoiser. The integral is split into a window `[α_lo, α_hi]`, estimated by
//! quadrature, and two analytic tail bounds. The Gaussian channel uses
//! `½ ∫ e^α E[(x − x̂)²] dα` on the same machinery.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{corrupt_gaussian, NoiseKind, SnrPoint};
use crate::denoiser::{Denoiser, TrainedModel};
use crate::error::{domain, Error, Result};
use crate::math::dist::poisson_unchecked;
use crate::math::{logistic_cdf, logistic_pdf, logistic_quantile, prl_unchecked, RngStream};
use crate::oracle::{left_tail_bound, right_tail_bound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Stratified draws from the logistic proposal truncated to the window,
    /// weighted by `e^α / q(α)`.
    LogisticImportance,
    /// Equally spaced nodes with trapezoid weights.
    UniformGrid,
}

impl std::str::FromStr for QuadratureScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "logistic_importance" | "logistic" => Ok(QuadratureScheme::LogisticImportance),
            "uniform_grid" | "uniform" => Ok(QuadratureScheme::UniformGrid),
            other => Err(format!(
                "unknown scheme '{other}' (expected logistic_importance or uniform_grid)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub n_points: usize,
    pub loc: f64,
    pub scale: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub mc_draws_per_node: usize,
    /// Shift added to clean inputs inside the Poisson channel.
    pub eps_shift: f64,
    /// For `α ≥ snap_alpha`, Poisson estimates bypass the model and decode
    /// the observation `z/γ` to the nearest lattice point.
    pub snap_alpha: Option<f64>,
    /// Lattice spacing of the data for the right tail bound.
    pub lattice_delta: f64,
    pub j_max: u32,
    pub tails: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: QuadratureScheme::LogisticImportance,
            n_points: 1000,
            loc: -1.0,
            scale: 5.0,
            alpha_lo: -28.0,
            alpha_hi: 37.0,
            mc_draws_per_node: 8,
            eps_shift: 0.0,
            snap_alpha: None,
            lattice_delta: 1.0,
            j_max: 3,
            tails: true,
        }
    }
}

impl QuadratureSpec {
    /// Defaults for the given channel. The Gaussian window is
    /// `loc ± 4 scale` around the logistic (6, 3).
    pub fn for_noise(noise: NoiseKind) -> Self {
        match noise {
            NoiseKind::Poisson => Self::default(),
            NoiseKind::Gaussian => Self {
                loc: 6.0,
                scale: 3.0,
                alpha_lo: -6.0,
                alpha_hi: 18.0,
                ..Self::default()
            },
        }
    }

    /// Defaults for a trained model: Poisson models decode the observation
    /// directly above the log-SNR window they were trained on.
    pub fn for_model(model: &TrainedModel) -> Self {
        let mut q = Self::for_noise(model.noise);
        if model.noise == NoiseKind::Poisson {
            q.snap_alpha = model.alpha_range.map(|[_, hi]| hi);
        }
        q
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_lo < self.alpha_hi)
            || !self.alpha_lo.is_finite()
            || !self.alpha_hi.is_finite()
        {
            return Err(Error::Config(format!(
                "need finite alpha_lo < alpha_hi, got [{}, {}]",
                self.alpha_lo, self.alpha_hi
            )));
        }
        if self.n_points < 2 || self.mc_draws_per_node == 0 {
            return Err(Error::Config(
                "need n_points >= 2 and mc_draws_per_node >= 1".into(),
            ));
        }
        if !(self.scale > 0.0) || !self.loc.is_finite() {
            return Err(Error::Config(
                "logistic proposal needs finite loc and scale > 0".into(),
            ));
        }
        if !(self.eps_shift >= 0.0) || !(self.lattice_delta > 0.0) {
            return Err(Error::Config(
                "eps_shift must be >= 0 and lattice_delta > 0".into(),
            ));
        }
        Ok(())
    }

    /// Nodes and the weights that turn per-node mean loss into the window
    /// integral `∫ e^α L(α) dα`.
    pub fn nodes(&self, rng: &RngStream) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let n = self.n_points;
        match self.scheme {
            QuadratureScheme::UniformGrid => {
                // The snap switch makes the integrand jump, so the grid gets
                // a panel edge on each side of it.
                let split = self
                    .snap_alpha
                    .filter(|&s| s > self.alpha_lo && s < self.alpha_hi && n >= 4);
                Ok(match split {
                    Some(s) => {
                        let frac = (s - self.alpha_lo) / (self.alpha_hi - self.alpha_lo);
                        let n_left = ((n as f64 * frac).round() as usize).clamp(2, n - 2);
                        let below = s - s.abs().max(1.0) * f64::EPSILON;
                        let mut nodes = trapezoid(self.alpha_lo, below, n_left);
                        nodes.extend(trapezoid(s, self.alpha_hi, n - n_left));
                        nodes
                    }
                    None => trapezoid(self.alpha_lo, self.alpha_hi, n),
                })
            }
            QuadratureScheme::LogisticImportance => {
                let f_lo = logistic_cdf(self.alpha_lo, self.loc, self.scale);
                let f_hi = logistic_cdf(self.alpha_hi, self.loc, self.scale);
                let mass = f_hi - f_lo;
                if !(mass > 0.0) {
                    return domain("logistic proposal has no mass on the window");
                }
                let mut r = rng.substream(u64::MAX);
                // strata never straddle the snap switch
                let f_split = self
                    .snap_alpha
                    .filter(|&s| s > self.alpha_lo && s < self.alpha_hi)
                    .map(|s| logistic_cdf(s, self.loc, self.scale));
                let segments = match f_split {
                    Some(f) if n >= 2 => {
                        let n_left =
                            ((n as f64 * (f - f_lo) / mass).round() as usize).clamp(1, n - 1);
                        vec![(f_lo, f, n_left), (f, f_hi, n - n_left)]
                    }
                    _ => vec![(f_lo, f_hi, n)],
                };
                let mut nodes = Vec::with_capacity(n);
                for (a_cdf, b_cdf, m) in segments {
                    let seg_mass = b_cdf - a_cdf;
                    for i in 0..m {
                        let u = a_cdf + seg_mass * (i as f64 + r.uniform()) / m as f64;
                        let a = logistic_quantile(
                            u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON),
                            self.loc,
                            self.scale,
                        )?
                        .clamp(self.alpha_lo, self.alpha_hi);
                        let q = logistic_pdf(a, self.loc, self.scale) / seg_mass;
                        nodes.push((a, a.exp() / (q * m as f64)));
                    }
                }
                Ok(nodes)
            }
        }
    }
}

/// Trapezoid nodes on `[lo, hi]` weighted for `∫ e^α L(α) dα`.
fn trapezoid(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let a = if i == n - 1 { hi } else { lo + h * i as f64 };
            let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
            (a, w * a.exp())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NllUnits {
    Nats,
    BitsPerDim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NllReport {
    pub diffusion_term: f64,
    pub left_tail: f64,
    pub right_tail: f64,
    pub total: f64,
    /// Standard error of the diffusion term across nodes (importance
    /// scheme only). It ignores the stratification and so overstates the
    /// spread.
    pub std_error: Option<f64>,
    /// `(α, mean loss)` per node.
    pub curve: Vec<(f64, f64)>,
    pub units: NllUnits,
    pub n_data: usize,
    pub spec: QuadratureSpec,
}

impl NllReport {
    /// The report converted to bits per dimension.
    pub fn to_bits_per_dim(&self, dims: usize) -> Self {
        if self.units == NllUnits::BitsPerDim {
            return self.clone();
        }
        let f = 1.0 / (std::f64::consts::LN_2 * dims.max(1) as f64);
        Self {
            diffusion_term: self.diffusion_term * f,
            left_tail: self.left_tail * f,
            right_tail: self.right_tail * f,
            total: self.total * f,
            std_error: self.std_error.map(|s| s * f),
            units: NllUnits::BitsPerDim,
            ..self.clone()
        }
    }

    /// Columns `alpha, mean_loss`.
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("alpha,mean_loss\n");
        for (a, l) in &self.curve {
            s.push_str(&format!("{a},{l}\n"));
        }
        s
    }
}

/// Lattice decoding of a Poisson estimate: round to the nearest integer,
/// but never to zero when a count was observed.
fn snap(xhat: f64, z: f64) -> f64 {
    let r = xhat.round_ties_even().max(0.0);
    if r == 0.0 && z > 0.0 {
        1.0
    } else {
        r
    }
}

struct NodeEval<'a, D: Denoiser> {
    model: &'a D,
    noise: NoiseKind,
    data: &'a [f64],
    draws: usize,
    eps_shift: f64,
    snap_alpha: Option<f64>,
}

impl<D: Denoiser> NodeEval<'_, D> {
    /// Rounds a channel-space value to the data lattice. Counts observed
    /// directly keep the no-zero-after-a-photon rule.
    fn snap_channel(&self, e: f64, z: f64) -> f64 {
        if self.model.to_channel(0.0) == 0.0 {
            snap(e, z)
        } else {
            let x = self.model.from_channel(e).round_ties_even().max(0.0);
            self.model.to_channel(x)
        }
    }

    /// Mean loss at one node over every data point and MC draw. Poisson
    /// nodes average prl; Gaussian nodes average half the squared error in
    /// channel space.
    fn mean_loss(&self, alpha: f64, rng: &mut RngStream) -> Result<f64> {
        let snr = SnrPoint::from_alpha(alpha);
        let mut total = 0.0;
        for _ in 0..self.draws {
            match self.noise {
                NoiseKind::Poisson => {
                    // Poisson data arrive already in channel space.
                    let z: Vec<f64> = self
                        .data
                        .iter()
                        .map(|&x| poisson_unchecked(rng, snr.gamma * (x + self.eps_shift)) as f64)
                        .collect();
                    let xhat = self.model.denoise(&z, snr)?;
                    let do_snap = self.snap_alpha.is_some_and(|s| alpha >= s);
                    for ((&x, &zi), &e) in self.data.iter().zip(&z).zip(&xhat) {
                        let e = if do_snap {
                            self.snap_channel(zi / snr.gamma, zi)
                        } else {
                            e
                        };
                        total += if e == 0.0 && x == 0.0 {
                            0.0
                        } else {
                            prl_unchecked(x, e)
                        };
                    }
                }
                NoiseKind::Gaussian => {
                    let xc: Vec<f64> = self
                        .data
                        .iter()
                        .map(|&x| self.model.to_channel(x))
                        .collect();
                    let z = corrupt_gaussian(&xc, snr.gamma, rng)?;
                    let xhat = self.model.denoise(&z, snr)?;
                    total += 0.5
                        * xc.iter()
                            .zip(&xhat)
                            .map(|(x, e)| (x - e) * (x - e))
                            .sum::<f64>();
                }
            }
        }
        Ok(total / (self.draws * self.data.len()) as f64)
    }
}

fn check_data(data: &[f64], noise: NoiseKind) -> Result<()> {
    if data.is_empty() {
        return domain("data set is empty");
    }
    if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
        return domain(format!("data contains non-finite value {bad}"));
    }
    if noise == NoiseKind::Poisson && data.iter().any(|&x| x < 0.0) {
        return domain("poisson likelihood needs non-negative data");
    }
    Ok(())
}

fn run_nodes<D: Denoiser>(
    eval: &NodeEval<'_, D>,
    nodes: &[(f64, f64)],
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let losses: Vec<f64> = nodes
        .par_iter()
        .enumerate()
        .map(|(i, &(a, _))| eval.mean_loss(a, &mut rng.substream(i as u64)))
        .collect::<Result<_>>()?;
    if let Some((i, l)) = losses
        .iter()
        .enumerate()
        .find(|(_, l)| !l.is_finite() || **l < 0.0)
    {
        return Err(Error::Numeric {
            step: i,
            what: format!("node alpha = {} has mean loss {l}", nodes[i].0),
        });
    }
    Ok(losses)
}

fn integrate<D: Denoiser>(
    model: &D,
    noise: NoiseKind,
    data: &[f64],
    quad: &QuadratureSpec,
    rng: &RngStream,
) -> Result<(f64, Option<f64>, Vec<(f64, f64)>)> {
    let nodes = quad.nodes(rng)?;
    let eval = NodeEval {
        model,
        noise,
        data,
        draws: quad.mc_draws_per_node,
        eps_shift: quad.eps_shift,
        snap_alpha: quad.snap_alpha,
    };
    let losses = run_nodes(&eval, &nodes, rng)?;
    let terms: Vec<f64> = nodes.iter().zip(&losses).map(|((_, w), l)| w * l).collect();
    let integral: f64 = terms.iter().sum();
    let std_error = (quad.scheme == QuadratureScheme::LogisticImportance).then(|| {
        let n = terms.len() as f64;
        let mean = integral / n;
        let var = terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt() * n
    });
    let curve = nodes.iter().map(|&(a, _)| a).zip(losses).collect();
    Ok((integral, std_error, curve))
}

/// Poisson-channel NLL estimate in nats per sample.
///
/// The left tail uses the exponential prior with rate `1 / mean(data)`; the
/// right tail uses the lattice Chernoff bound with spacing `lattice_delta`.
pub fn estimate_nll_poisson<D: Denoiser>(
    model: &D,
    data: &[f64],
    quad: &QuadratureSpec,
    rng: &RngStream,
) -> Result<NllReport> {
    if model.noise() != NoiseKind::Poisson {
        return domain("estimate_nll_poisson needs a poisson model");
    }
    check_data(data, NoiseKind::Poisson)?;
    let xc: Vec<f64> = data.iter().map(|&x| model.to_channel(x)).collect();
    let (diffusion_term, std_error, curve) = integrate(model, NoiseKind::Poisson, &xc, quad, rng)?;
    let (left_tail, right_tail) = if quad.tails {
        let delta = model.to_channel(quad.lattice_delta) - model.to_channel(0.0);
        (
            poisson_left_tail(&xc, quad)?,
            poisson_right_tail(&xc, delta, quad)?,
        )
    } else {
        (0.0, 0.0)
    };
    Ok(NllReport {
        diffusion_term,
        left_tail,
        right_tail,
        total: diffusion_term + left_tail + right_tail,
        std_error,
        curve,
        units: NllUnits::Nats,
        n_data: data.len(),
        spec: quad.clone(),
    })
}

fn poisson_left_tail(data: &[f64], quad: &QuadratureSpec) -> Result<f64> {
    let mean = data.iter().sum::<f64>() / data.len() as f64 + quad.eps_shift;
    if mean <= 0.0 {
        return Ok(0.0);
    }
    left_tail_bound(quad.alpha_lo.exp(), 1.0 / mean, 1)
}

// Per-sample average; only lattice neighbours that stay positive are counted.
fn poisson_right_tail(data: &[f64], delta: f64, quad: &QuadratureSpec) -> Result<f64> {
    let gamma1 = quad.alpha_hi.exp();
    let mut total = 0.0;
    for &x in data {
        let reach = ((x / delta).ceil() as i64 - 1).clamp(0, quad.j_max as i64) as u32;
        if reach > 0 {
            total += right_tail_bound(&[x], delta, gamma1, reach)?;
        }
    }
    Ok(total / data.len() as f64)
}

/// Gaussian-channel NLL estimate in nats per sample.
///
/// Below the window the integrand is capped by `½ e^α Var(x)` (mmse never
/// exceeds the prior variance), giving the left tail `½ e^{α_lo} Var(x)`.
/// No right tail is added.
pub fn estimate_nll_gaussian<D: Denoiser>(
    model: &D,
    data: &[f64],
    quad: &QuadratureSpec,
    rng: &RngStream,
) -> Result<NllReport> {
    if model.noise() != NoiseKind::Gaussian {
        return domain("estimate_nll_gaussian needs a gaussian model");
    }
    check_data(data, NoiseKind::Gaussian)?;
    let (diffusion_term, std_error, curve) =
        integrate(model, NoiseKind::Gaussian, data, quad, rng)?;
    let left_tail = if quad.tails {
        let xc: Vec<f64> = data.iter().map(|&x| model.to_channel(x)).collect();
        let m = xc.iter().sum::<f64>() / xc.len() as f64;
        let var = xc.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xc.len() as f64;
        0.5 * quad.alpha_lo.exp() * var
    } else {
        0.0
    };
    Ok(NllReport {
        diffusion_term,
        left_tail,
        right_tail: 0.0,
        total: diffusion_term + left_tail,
        std_error,
        curve,
        units: NllUnits::Nats,
        n_data: data.len(),
        spec: quad.clone(),
    })
}

/// Dispatches on the model's channel.
pub fn estimate_nll<D: Denoiser>(
    model: &D,
    data: &[f64],
    quad: &QuadratureSpec,
    rng: &RngStream,
) -> Result<NllReport> {
    match model.noise() {
        NoiseKind::Poisson => estimate_nll_poisson(model, data, quad, rng),
        NoiseKind::Gaussian => estimate_nll_gaussian(model, data, quad, rng),
    }
}

/// Mean loss at each α with fresh corruption per node: prl for Poisson
/// models, squared error in channel space for Gaussian ones.
pub fn loss_curve<D: Denoiser>(
    model: &D,
    data: &[f64],
    alphas: &[f64],
    mc_draws: usize,
    rng: &RngStream,
) -> Result<Vec<(f64, f64)>> {
    let noise = model.noise();
    check_data(data, noise)?;
    if mc_draws == 0 {
        return domain("need at least one draw per node");
    }
    let channel: Vec<f64>;
    let data = if noise == NoiseKind::Poisson {
        channel = data.iter().map(|&x| model.to_channel(x)).collect();
        &channel[..]
    } else {
        data
    };
    let eval = NodeEval {
        model,
        noise,
        data,
        draws: mc_draws,
        eps_shift: 0.0,
        snap_alpha: None,
    };
    let nodes: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, 1.0)).collect();
    let losses = run_nodes(&eval, &nodes, rng)?;
    let factor = if noise == NoiseKind::Gaussian {
        2.0
    } else {
        1.0
    };
    Ok(alphas
        .iter()
        .zip(losses)
        .map(|(&a, l)| (a, l * factor))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoiser::{BinaryTanhDenoiser, ConstantDenoiser, PosteriorMeanDenoiser};
    use crate::oracle::{exp_prior_partial_integral, FinitePrior, GammaPrior};

    fn two_point_data(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.0 + (i % 2) as f64).collect()
    }

    #[test]
    fn uniform_oracle_recovers_ln2() {
        let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0]).unwrap());
        let data = two_point_data(1024);
        for scheme in [
            QuadratureScheme::LogisticImportance,
            QuadratureScheme::UniformGrid,
        ] {
            let quad = QuadratureSpec {
                scheme,
                n_points: 1000,
                ..QuadratureSpec::default()
            };
            let r = estimate_nll_poisson(&d, &data, &quad, &RngStream::new(1, 0)).unwrap();
            assert!(
                (r.total - 2f64.ln()).abs() < 0.01,
                "{scheme:?}: {}",
                r.total
            );
            assert_eq!(r.curve.len(), 1000);
            assert!((r.total - r.diffusion_term - r.left_tail - r.right_tail).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_prior_partial_integral_cross_check() {
        let prior = GammaPrior::exponential(1.0).unwrap();
        let d = PosteriorMeanDenoiser::new(prior);
        let mut r = RngStream::new(2, 0);
        let data: Vec<f64> = (0..2000).map(|_| prior.sample(&mut r)).collect();
        let quad = QuadratureSpec {
            scheme: QuadratureScheme::UniformGrid,
            n_points: 400,
            alpha_lo: -25.0,
            alpha_hi: 0.0,
            mc_draws_per_node: 4,
            tails: false,
            ..QuadratureSpec::default()
        };
        let rep = estimate_nll_poisson(&d, &data, &quad, &RngStream::new(3, 0)).unwrap();
        let want = exp_prior_partial_integral(1.0, 1.0).unwrap();
        assert!((want - 0.3013).abs() < 1e-3);
        assert!((rep.total - want).abs() < 0.01, "{} vs {want}", rep.total);
    }

    #[test]
    fn binary_gaussian_mutual_information() {
        let data = vec![-1.0, 1.0];
        let quad = QuadratureSpec {
            scheme: QuadratureScheme::UniformGrid,
            n_points: 600,
            alpha_lo: -12.0,
            alpha_hi: 6.0,
            mc_draws_per_node: 2000,
            ..QuadratureSpec::default()
        };
        let r = estimate_nll_gaussian(&BinaryTanhDenoiser, &data, &quad, &RngStream::new(4, 0))
            .unwrap();
        assert!((r.total - 2f64.ln()).abs() < 5e-3, "{}", r.total);
    }

    #[test]
    fn zero_variance_gaussian_identity() {
        struct Identity;
        impl Denoiser for Identity {
            fn noise(&self) -> NoiseKind {
                NoiseKind::Gaussian
            }
            fn denoise(&self, obs: &[f64], snr: SnrPoint) -> Result<Vec<f64>> {
                Ok(obs.iter().map(|z| z / snr.gamma.sqrt()).collect())
            }
        }
        // the identity estimate has mse 1/γ, so the integrand is flat at ½
        let c = ConstantDenoiser {
            value: 3.0,
            noise: NoiseKind::Gaussian,
        };
        let quad = QuadratureSpec {
            scheme: QuadratureScheme::UniformGrid,
            n_points: 50,
            alpha_lo: 10.0,
            alpha_hi: 20.0,
            ..QuadratureSpec::for_noise(NoiseKind::Gaussian)
        };
        let r = estimate_nll_gaussian(&c, &[3.0; 10], &quad, &RngStream::new(5, 0)).unwrap();
        assert_eq!(r.diffusion_term, 0.0);
        assert_eq!(r.left_tail, 0.0);
        let r = estimate_nll_gaussian(&Identity, &[3.0; 10], &quad, &RngStream::new(5, 0)).unwrap();
        assert!((r.diffusion_term - 5.0).abs() < 0.2);
    }

    #[test]
    fn importance_and_grid_agree_for_oracle() {
        let prior =
            FinitePrior::from_weights(vec![0.0, 1.0, 4.0, 9.0], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let d = PosteriorMeanDenoiser::new(prior.clone());
        let data: Vec<f64> = [0.0, 1.0, 1.0, 4.0, 4.0, 4.0, 9.0, 9.0, 9.0, 9.0].repeat(10);
        let est = |scheme| {
            let quad = QuadratureSpec {
                scheme,
                ..QuadratureSpec::default()
            };
            estimate_nll_poisson(&d, &data, &quad, &RngStream::new(6, 0)).unwrap()
        };
        let a = est(QuadratureScheme::LogisticImportance);
        let b = est(QuadratureScheme::UniformGrid);
        assert!((a.diffusion_term / b.diffusion_term - 1.0).abs() < 0.02);
        assert!(
            (b.total - prior.entropy()).abs() < 0.02,
            "{} vs {}",
            b.total,
            prior.entropy()
        );
    }

    #[test]
    fn curve_limits_for_finite_oracle() {
        let prior = FinitePrior::uniform(vec![1.0, 2.0]).unwrap();
        let d = PosteriorMeanDenoiser::new(prior.clone());
        let data = two_point_data(200);
        let c = loss_curve(&d, &data, &[-20.0, 0.0, 25.0], 4, &RngStream::new(7, 0)).unwrap();
        let at_mean = 0.5 * (prl_unchecked(1.0, 1.5) + prl_unchecked(2.0, 1.5));
        assert!((c[0].1 - at_mean).abs() < 1e-6);
        assert!(c[2].1 < 1e-12);
        assert!(c.iter().all(|(_, l)| l.is_finite() && *l >= 0.0));
    }

    #[test]
    fn upper_bound_for_suboptimal_denoiser() {
        let prior = FinitePrior::uniform(vec![1.0, 2.0]).unwrap();
        let oracle = PosteriorMeanDenoiser::new(prior);
        let blunt = ConstantDenoiser {
            value: 1.5,
            noise: NoiseKind::Poisson,
        };
        let data = two_point_data(32);
        let quad = QuadratureSpec {
            alpha_hi: 5.0,
            tails: false,
            ..QuadratureSpec::default()
        };
        let a = estimate_nll_poisson(&oracle, &data, &quad, &RngStream::new(8, 0)).unwrap();
        let b = estimate_nll_poisson(&blunt, &data, &quad, &RngStream::new(8, 0)).unwrap();
        assert!(b.total > a.total);
    }

    #[test]
    fn snapping_keeps_counts_positive() {
        assert_eq!(snap(0.2, 0.0), 0.0);
        assert_eq!(snap(0.2, 3.0), 1.0);
        assert_eq!(snap(2.5, 3.0), 2.0);
        assert_eq!(snap(41.7, 40.0), 42.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0]).unwrap());
        let q = QuadratureSpec::default();
        assert!(estimate_nll_poisson(&d, &[], &q, &RngStream::new(0, 0)).is_err());
        assert!(estimate_nll_poisson(&d, &[-1.0], &q, &RngStream::new(0, 0)).is_err());
        assert!(estimate_nll_gaussian(&d, &[1.0], &q, &RngStream::new(0, 0)).is_err());
        let bad = QuadratureSpec {
            alpha_lo: 3.0,
            alpha_hi: 1.0,
            ..q
        };
        assert!(estimate_nll_poisson(&d, &[1.0], &bad, &RngStream::new(0, 0)).is_err());
        let zero = ConstantDenoiser {
            value: 0.0,
            noise: NoiseKind::Poisson,
        };
        let err = estimate_nll_poisson(
            &zero,
            &[1.0],
            &QuadratureSpec::default(),
            &RngStream::new(0, 0),
        );
        assert!(matches!(err, Err(Error::Numeric { .. })));
    }

    #[test]
    fn deterministic() {
        let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0]).unwrap());
        let data = two_point_data(16);
        let q = QuadratureSpec {
            n_points: 100,
            ..QuadratureSpec::default()
        };
        let a = estimate_nll_poisson(&d, &data, &q, &RngStream::new(9, 0)).unwrap();
        let b = estimate_nll_poisson(&d, &data, &q, &RngStream::new(9, 0)).unwrap();
        assert_eq!(a, b);
        let bits = a.to_bits_per_dim(1);
        assert!((bits.total - a.total / std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(a.curve_csv().lines().count(), 101);
    }
}
