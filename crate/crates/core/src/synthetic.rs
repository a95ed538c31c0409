//! The synthetic benchmark distributions: exact samplers, PMFs or densities,
//! and entropies.
//!
//! Discrete families may be truncated at a cap `K`. Truncation is by
//! rejection: draws above `K` are redrawn, which matches the PMF
//! renormalized over `0..=K`.
//!
//! Negative binomials count failures before the `r`-th success, so
//! `NB(r, p)` has mean `r(1 − p)/p`. Gamma and Lomax take a scale.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::dist::{beta_sample, gamma_unit, neg_binomial_sample, poisson_unchecked};
use crate::math::{ln_beta, ln_gamma, log_factorial, poisson_log_pmf, zeta, RngStream};

/// Default truncation cap for the discrete benchmarks.
pub const DEFAULT_TRUNCATION: u64 = 50;

const SAMPLE_CHUNK: usize = 8192;
const ENTROPY_TAIL_MASS: f64 = 1e-12;
const ENTROPY_DIRECT_TERMS: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    PoissMix {
        weights: Vec<f64>,
        lambdas: Vec<f64>,
    },
    Zip {
        pi0: f64,
        lambda: f64,
    },
    NBinomMix {
        weights: Vec<f64>,
        r: Vec<f64>,
        p: Vec<f64>,
    },
    Bnb {
        a: f64,
        b: f64,
        r: f64,
    },
    Zipf {
        alpha: f64,
    },
    YuleSimon {
        rho: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Lomax {
        c: f64,
        scale: f64,
    },
    HalfCauchy {
        scale: f64,
    },
    HalfT {
        nu: f64,
        scale: f64,
    },
    Weibull {
        k: f64,
        lambda: f64,
    },
    Beta {
        a: f64,
        b: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
}

/// A benchmark source: a family and, for discrete families, an optional
/// truncation cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub family: Family,
    #[serde(default)]
    pub truncation: Option<u64>,
}

/// Support used by [`DistributionSpec::true_entropy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    /// `0..=K` with the PMF renormalized there.
    RenormalizedK,
    /// The full support, summed until the neglected mass is below 1e−12.
    Untruncated,
}

pub const DISCRETE_PRESETS: [&str; 6] =
    ["poissmix", "zip", "nbinommix", "bnb", "zipf", "yulesimon"];
pub const CONTINUOUS_PRESETS: [&str; 8] = [
    "gamma",
    "lognormal",
    "lomax",
    "halfcauchy",
    "halft",
    "weibull",
    "beta",
    "uniform",
];

impl DistributionSpec {
    /// The benchmark parameterizations. Discrete presets are truncated at
    /// [`DEFAULT_TRUNCATION`] except PoissMix, whose main mode sits near 100.
    pub fn preset(name: &str) -> Result<Self> {
        let k = Some(DEFAULT_TRUNCATION);
        let (family, truncation) = match name.to_ascii_lowercase().as_str() {
            "poissmix" => (
                Family::PoissMix {
                    weights: vec![0.1, 0.9],
                    lambdas: vec![1.0, 100.0],
                },
                None,
            ),
            "zip" => (
                Family::Zip {
                    pi0: 0.7,
                    lambda: 5.0,
                },
                k,
            ),
            "nbinommix" => (
                Family::NBinomMix {
                    weights: vec![0.8, 0.2],
                    r: vec![1.0, 10.0],
                    p: vec![0.9, 0.1],
                },
                k,
            ),
            "bnb" => (
                Family::Bnb {
                    a: 0.5,
                    b: 1.5,
                    r: 5.0,
                },
                k,
            ),
            "zipf" => (Family::Zipf { alpha: 1.7 }, k),
            "yulesimon" => (Family::YuleSimon { rho: 2.0 }, k),
            "gamma" => (
                Family::Gamma {
                    shape: 0.5,
                    scale: 2.0,
                },
                None,
            ),
            "lognormal" => (
                Family::LogNormal {
                    mu: 0.0,
                    sigma: 1.5,
                },
                None,
            ),
            "lomax" => (Family::Lomax { c: 2.0, scale: 1.0 }, None),
            "halfcauchy" => (Family::HalfCauchy { scale: 1.0 }, None),
            "halft" => (
                Family::HalfT {
                    nu: 3.0,
                    scale: 1.0,
                },
                None,
            ),
            "weibull" => (
                Family::Weibull {
                    k: 1.5,
                    lambda: 1.0,
                },
                None,
            ),
            "beta" => (Family::Beta { a: 2.0, b: 2.0 }, None),
            "uniform" => (Family::Uniform { lo: 0.0, hi: 1.0 }, None),
            other => {
                return Err(Error::Config(format!(
                    "unknown distribution '{other}'; expected one of {} or {}",
                    DISCRETE_PRESETS.join(", "),
                    CONTINUOUS_PRESETS.join(", ")
                )))
            }
        };
        Ok(Self { family, truncation })
    }

    pub fn with_truncation(&self, truncation: Option<u64>) -> Self {
        Self {
            family: self.family.clone(),
            truncation,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::PoissMix { .. } => "poissmix",
            Family::Zip { .. } => "zip",
            Family::NBinomMix { .. } => "nbinommix",
            Family::Bnb { .. } => "bnb",
            Family::Zipf { .. } => "zipf",
            Family::YuleSimon { .. } => "yulesimon",
            Family::Gamma { .. } => "gamma",
            Family::LogNormal { .. } => "lognormal",
            Family::Lomax { .. } => "lomax",
            Family::HalfCauchy { .. } => "halfcauchy",
            Family::HalfT { .. } => "halft",
            Family::Weibull { .. } => "weibull",
            Family::Beta { .. } => "beta",
            Family::Uniform { .. } => "uniform",
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self.family,
            Family::PoissMix { .. }
                | Family::Zip { .. }
                | Family::NBinomMix { .. }
                | Family::Bnb { .. }
                | Family::Zipf { .. }
                | Family::YuleSimon { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let mixture = |w: &[f64], n: usize| {
            w.len() == n
                && n > 0
                && w.iter().all(|&x| x >= 0.0)
                && (w.iter().sum::<f64>() - 1.0).abs() < 1e-12
        };
        let ok = match &self.family {
            Family::PoissMix { weights, lambdas } => {
                mixture(weights, lambdas.len()) && lambdas.iter().all(|&l| pos(l))
            }
            Family::Zip { pi0, lambda } => (0.0..=1.0).contains(pi0) && pos(*lambda),
            Family::NBinomMix { weights, r, p } => {
                mixture(weights, r.len())
                    && p.len() == r.len()
                    && r.iter().all(|&x| pos(x))
                    && p.iter().all(|&x| x > 0.0 && x <= 1.0)
            }
            Family::Bnb { a, b, r } => pos(*a) && pos(*b) && pos(*r),
            Family::Zipf { alpha } => *alpha > 1.0 && alpha.is_finite(),
            Family::YuleSimon { rho } => pos(*rho),
            Family::Gamma { shape, scale } => pos(*shape) && pos(*scale),
            Family::LogNormal { mu, sigma } => mu.is_finite() && pos(*sigma),
            Family::Lomax { c, scale } => pos(*c) && pos(*scale),
            Family::HalfCauchy { scale } => pos(*scale),
            Family::HalfT { nu, scale } => pos(*nu) && pos(*scale),
            Family::Weibull { k, lambda } => pos(*k) && pos(*lambda),
            Family::Beta { a, b } => pos(*a) && pos(*b),
            Family::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
        };
        if !ok {
            return Err(Error::Config(format!(
                "invalid parameters for {}: {:?}",
                self.name(),
                self.family
            )));
        }
        if self.truncation.is_some() && !self.is_discrete() {
            return Err(Error::Config(format!(
                "{} is continuous and cannot be truncated",
                self.name()
            )));
        }
        if self.truncation == Some(0) {
            return Err(Error::Config("truncation cap must be at least 1".into()));
        }
        if let Some(k) = self.truncation {
            if self.untruncated_mass(k) < 1e-9 {
                return Err(Error::Config(format!(
                    "{} has no mass on 0..={k}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    /// `n` i.i.d. draws. Chunks of draws use their own substreams, so the
    /// result does not depend on the thread count.
    pub fn sample(&self, n: usize, rng: &RngStream) -> Result<Vec<f64>> {
        self.validate()?;
        let chunks: Vec<(u64, usize)> = (0..n)
            .step_by(SAMPLE_CHUNK)
            .enumerate()
            .map(|(i, s)| (i as u64, (n - s).min(SAMPLE_CHUNK)))
            .collect();
        let parts: Vec<Vec<f64>> = chunks
            .par_iter()
            .map(|&(id, len)| {
                let mut r = rng.substream(id);
                (0..len).map(|_| self.draw(&mut r)).collect()
            })
            .collect();
        Ok(parts.concat())
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        if !self.is_discrete() {
            return self.draw_continuous(rng);
        }
        loop {
            let k = self.draw_discrete(rng);
            if self.truncation.is_none_or(|cap| k <= cap) {
                return k as f64;
            }
        }
    }

    fn draw_discrete(&self, rng: &mut RngStream) -> u64 {
        match &self.family {
            Family::PoissMix { weights, lambdas } => {
                let i = pick(weights, rng);
                poisson_unchecked(rng, lambdas[i])
            }
            Family::Zip { pi0, lambda } => {
                if rng.uniform() < *pi0 {
                    0
                } else {
                    poisson_unchecked(rng, *lambda)
                }
            }
            Family::NBinomMix { weights, r, p } => {
                let i = pick(weights, rng);
                neg_binomial_sample(rng, r[i], p[i])
            }
            Family::Bnb { a, b, r } => {
                let p = beta_sample(rng, *a, *b);
                neg_binomial_sample(rng, *r, p)
            }
            Family::Zipf { alpha } => zipf_draw(rng, *alpha),
            Family::YuleSimon { rho } => {
                // geometric on {1, 2, ...} with success probability e^{-W}, W ~ Exp(ρ)
                let w = rng.exp1() / rho;
                let q = -(-w).exp_m1();
                if q <= 0.0 {
                    return 1;
                }
                let g = (rng.uniform().ln() / q.ln()).floor();
                1 + g.min(u64::MAX as f64 / 2.0) as u64
            }
            _ => unreachable!("continuous family"),
        }
    }

    fn draw_continuous(&self, rng: &mut RngStream) -> f64 {
        match self.family {
            Family::Gamma { shape, scale } => gamma_unit(rng, shape) * scale,
            Family::LogNormal { mu, sigma } => (mu + sigma * rng.std_normal()).exp(),
            Family::Lomax { c, scale } => scale * (rng.uniform().powf(-1.0 / c) - 1.0),
            Family::HalfCauchy { scale } => {
                scale * (0.5 * std::f64::consts::PI * rng.uniform()).tan()
            }
            Family::HalfT { nu, scale } => {
                let chi2 = 2.0 * gamma_unit(rng, 0.5 * nu);
                (scale * rng.std_normal() / (chi2 / nu).sqrt()).abs()
            }
            Family::Weibull { k, lambda } => lambda * rng.exp1().powf(1.0 / k),
            Family::Beta { a, b } => beta_sample(rng, a, b),
            Family::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(),
            _ => unreachable!("discrete family"),
        }
    }

    /// Untruncated log-PMF; `−∞` off the support.
    fn raw_log_pmf(&self, k: u64) -> f64 {
        let kf = k as f64;
        match &self.family {
            Family::PoissMix { weights, lambdas } => weights
                .iter()
                .zip(lambdas)
                .map(|(w, &l)| w * poisson_log_pmf(k, l).exp())
                .sum::<f64>()
                .ln(),
            Family::Zip { pi0, lambda } => {
                let pois = (1.0 - pi0) * poisson_log_pmf(k, *lambda).exp();
                if k == 0 {
                    (pi0 + pois).ln()
                } else {
                    pois.ln()
                }
            }
            Family::NBinomMix { weights, r, p } => weights
                .iter()
                .zip(r.iter().zip(p))
                .map(|(w, (&r, &p))| w * nb_log_pmf(k, r, p).exp())
                .sum::<f64>()
                .ln(),
            Family::Bnb { a, b, r } => {
                ln_gamma(r + kf) - log_factorial(k) - ln_gamma(*r) + ln_beta(a + r, b + kf)
                    - ln_beta(*a, *b)
            }
            Family::Zipf { alpha } => {
                if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    -alpha * kf.ln() - zeta(*alpha).expect("alpha > 1").ln()
                }
            }
            Family::YuleSimon { rho } => {
                if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    rho.ln() + ln_beta(kf, rho + 1.0)
                }
            }
            _ => unreachable!("continuous family"),
        }
    }

    fn untruncated_mass(&self, cap: u64) -> f64 {
        (0..=cap).map(|k| self.raw_log_pmf(k).exp()).sum()
    }

    /// Log-PMF, renormalized over `0..=K` when truncated.
    pub fn log_pmf(&self, k: u64) -> Result<f64> {
        if !self.is_discrete() {
            return domain(format!("{} is continuous; use pdf", self.name()));
        }
        match self.truncation {
            None => Ok(self.raw_log_pmf(k)),
            Some(cap) if k > cap => Ok(f64::NEG_INFINITY),
            Some(cap) => Ok(self.raw_log_pmf(k) - self.untruncated_mass(cap).ln()),
        }
    }

    pub fn pmf(&self, k: u64) -> Result<f64> {
        Ok(self.log_pmf(k)?.exp())
    }

    /// PMF over `0..=cap` in one pass.
    pub fn pmf_table(&self, cap: u64) -> Result<Vec<f64>> {
        if !self.is_discrete() {
            return domain(format!("{} is continuous; use pdf", self.name()));
        }
        let norm = self.truncation.map_or(1.0, |t| self.untruncated_mass(t));
        Ok((0..=cap)
            .map(|k| {
                if self.truncation.is_some_and(|t| k > t) {
                    0.0
                } else {
                    self.raw_log_pmf(k).exp() / norm
                }
            })
            .collect())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        use std::f64::consts::PI;
        if self.is_discrete() {
            return domain(format!("{} is discrete; use pmf", self.name()));
        }
        if !(x >= 0.0) {
            return Ok(0.0);
        }
        Ok(match self.family {
            Family::Gamma { shape, scale } => {
                if x == 0.0 {
                    return Ok(if shape < 1.0 {
                        f64::INFINITY
                    } else if shape == 1.0 {
                        1.0 / scale
                    } else {
                        0.0
                    });
                }
                ((shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()).exp()
            }
            Family::LogNormal { mu, sigma } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                let t = (x.ln() - mu) / sigma;
                (-0.5 * t * t).exp() / (x * sigma * (2.0 * PI).sqrt())
            }
            Family::Lomax { c, scale } => c / scale * (1.0 + x / scale).powf(-(c + 1.0)),
            Family::HalfCauchy { scale } => 2.0 / (PI * scale * (1.0 + (x / scale).powi(2))),
            Family::HalfT { nu, scale } => {
                let ln_c = ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * PI).ln()
                    - scale.ln();
                2.0 * (ln_c - 0.5 * (nu + 1.0) * (1.0 + (x / scale).powi(2) / nu).ln()).exp()
            }
            Family::Weibull { k, lambda } => {
                let t = x / lambda;
                if x == 0.0 {
                    return Ok(if k < 1.0 {
                        f64::INFINITY
                    } else if k == 1.0 {
                        1.0 / lambda
                    } else {
                        0.0
                    });
                }
                k / lambda * t.powf(k - 1.0) * (-t.powf(k)).exp()
            }
            Family::Beta { a, b } => {
                if x > 1.0 {
                    return Ok(0.0);
                }
                if x == 0.0 || x == 1.0 {
                    let e = if x == 0.0 { a } else { b };
                    return Ok(if e < 1.0 {
                        f64::INFINITY
                    } else if e == 1.0 {
                        (-ln_beta(a, b)).exp()
                    } else {
                        0.0
                    });
                }
                ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)).exp()
            }
            Family::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            _ => unreachable!("discrete family"),
        })
    }

    /// Shannon entropy in nats.
    pub fn true_entropy(&self, mode: EntropyMode) -> Result<f64> {
        if !self.is_discrete() {
            return domain(format!(
                "{} is continuous; entropy is only defined for discrete specs",
                self.name()
            ));
        }
        self.validate()?;
        match mode {
            EntropyMode::RenormalizedK => {
                let cap = self.truncation.ok_or_else(|| {
                    Error::Config(format!("{} has no truncation cap", self.name()))
                })?;
                let p = self.pmf_table(cap)?;
                Ok(p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.ln()).sum())
            }
            EntropyMode::Untruncated => Ok(self.untruncated_entropy()),
        }
    }

    fn untruncated_entropy(&self) -> f64 {
        let mut h = 0.0;
        let mut mass = 0.0;
        let mut lp_prev = f64::NEG_INFINITY;
        let mut k = 0u64;
        let mut lp_half = f64::NEG_INFINITY;
        loop {
            let lp = self.raw_log_pmf(k);
            if lp.is_finite() {
                let p = lp.exp();
                h -= p * lp;
                mass += p;
            }
            if k == ENTROPY_DIRECT_TERMS / 2 {
                lp_half = lp;
            }
            let decreasing = lp < lp_prev;
            if k > 0 && decreasing && 1.0 - mass < ENTROPY_TAIL_MASS {
                return h;
            }
            if k == ENTROPY_DIRECT_TERMS {
                // power-law tail p_k ≈ p_N (k/N)^{-s}, summed as an integral
                let n = k as f64;
                let s = (lp_half - lp) / 2f64.ln();
                let ln_c = lp + s * n.ln();
                let a = n + 0.5;
                let head = (ln_c + (1.0 - s) * a.ln()).exp();
                let m0 = head / (s - 1.0);
                let m1 = head * (a.ln() / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
                return h - ln_c * m0 + s * m1;
            }
            lp_prev = lp;
            k += 1;
        }
    }

    /// Mean of the untruncated distribution, where finite.
    pub fn mean(&self) -> Option<f64> {
        let v = match &self.family {
            Family::PoissMix { weights, lambdas } => {
                weights.iter().zip(lambdas).map(|(w, l)| w * l).sum()
            }
            Family::Zip { pi0, lambda } => (1.0 - pi0) * lambda,
            Family::NBinomMix { weights, r, p } => weights
                .iter()
                .zip(r.iter().zip(p))
                .map(|(w, (r, p))| w * r * (1.0 - p) / p)
                .sum(),
            Family::Bnb { a, b, r } => {
                if *a <= 1.0 {
                    return None;
                }
                r * b / (a - 1.0)
            }
            Family::Zipf { alpha } => {
                if *alpha <= 2.0 {
                    return None;
                }
                zeta(alpha - 1.0).ok()? / zeta(*alpha).ok()?
            }
            Family::YuleSimon { rho } => {
                if *rho <= 1.0 {
                    return None;
                }
                rho / (rho - 1.0)
            }
            Family::Gamma { shape, scale } => shape * scale,
            Family::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Family::Lomax { c, scale } => {
                if *c <= 1.0 {
                    return None;
                }
                scale / (c - 1.0)
            }
            Family::HalfCauchy { .. } => return None,
            Family::HalfT { nu, scale } => {
                if *nu <= 1.0 {
                    return None;
                }
                let ln_c = ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln();
                2.0 * scale * nu / (nu - 1.0) * ln_c.exp()
            }
            Family::Weibull { k, lambda } => lambda * ln_gamma(1.0 + 1.0 / k).exp(),
            Family::Beta { a, b } => a / (a + b),
            Family::Uniform { lo, hi } => 0.5 * (lo + hi),
        };
        Some(v)
    }
}

fn nb_log_pmf(k: u64, r: f64, p: f64) -> f64 {
    if p >= 1.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let kf = k as f64;
    ln_gamma(kf + r) - log_factorial(k) - ln_gamma(r) + r * p.ln() + kf * (-p).ln_1p()
}

fn pick(weights: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

// Devroye (1986), rejection from the continuous Pareto envelope.
fn zipf_draw(rng: &mut RngStream, alpha: f64) -> u64 {
    let am1 = alpha - 1.0;
    let b = 2f64.powf(am1);
    loop {
        let u = rng.uniform();
        let v = rng.uniform();
        let x = u.powf(-1.0 / am1).floor();
        if !(x < 1e18) {
            continue;
        }
        let t = (1.0 + 1.0 / x).powf(am1);
        if v * x * (t - 1.0) / (b - 1.0) <= t / b {
            return x as u64;
        }
    }
}
