//! Identity suite: every exact relation the library relies on, checked
//! numerically and reported as a pass/fail table.
//!
//! The fast level keeps Monte Carlo sizes small enough to finish in well
//! under a minute; the full level runs the Monte Carlo identities at one
//! million draws.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::denoiser::{
    ArchSpec, BinaryTanhDenoiser, DenoiserParams, OutputActivation, PosteriorMeanDenoiser,
};
use crate::error::{Error, Result};
use crate::likelihood::{
    estimate_nll_gaussian, estimate_nll_poisson, QuadratureScheme, QuadratureSpec,
};
use crate::math::{l0, poisson_sample, prl, LossKind, RngStream};
use crate::oracle::{
    exp_prior_marginal_pmf, exp_prior_mprl_series, exp_prior_partial_integral,
    finite_posterior_mean, gamma_posterior_mean, marginal_mprl, mutual_information_finite,
    pointwise_kl, pointwise_mprl, poisson_entropy, tgr_estimate, ExactMarginal, FinitePrior,
    GammaPrior, Prior,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Config(format!(
                "unknown validation level {s:?} (expected fast or full)"
            ))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fast => "fast",
            Level::Full => "full",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Fixed-width text table, one row per check.
    pub fn table(&self) -> String {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag}  {:w$}  {}\n", c.name, c.detail));
        }
        s
    }
}

type CheckFn = fn(Level, &RngStream) -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("prl-nonnegative", prl_nonnegative),
    ("prl-convex", prl_convex),
    ("prl-scaling", prl_scaling),
    ("prl-underestimation-blowup", prl_blowup),
    ("convex-conjugate", convex_conjugate),
    ("bregman-decomposition", bregman_decomposition),
    ("bregman-minimizer-is-mean", bregman_minimizer),
    ("poisson-stein", poisson_stein),
    ("posterior-mean-monotone", posterior_monotone),
    ("posterior-moment-products", moment_products),
    ("marginal-pmf-derivative", pmf_derivative),
    ("posterior-mean-at-zero-derivative", posterior_at_zero),
    ("poisson-entropy-increasing-concave", entropy_shape),
    ("tgr-equals-conjugacy", tgr_conjugacy),
    ("gamma-posterior-affine", gamma_affine),
    ("pointwise-kl-relation", pointwise_relation),
    ("information-loss-identity", information_identity),
    ("exp-prior-partial-integral", partial_integral),
    ("exact-likelihood-uniform12", exact_likelihood),
    ("binary-gaussian-ln2", binary_gaussian),
    ("network-gradients", network_gradients),
];

/// Runs every check. A check that errors counts as failed with the error
/// as its detail.
pub fn run_suite(level: Level, seed: u64) -> ValidationReport {
    let root = RngStream::new(seed, 0);
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let (passed, detail) = match f(level, &root.substream(i as u64)) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            Check {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    ValidationReport {
        level,
        seed,
        checks,
    }
}

fn pos(rng: &mut RngStream, scale: f64) -> f64 {
    1e-3 + scale * rng.uniform()
}

fn prl_nonnegative(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let (x, xh) = (pos(&mut r, 50.0), pos(&mut r, 50.0));
        let v = prl(x, xh)?;
        if v < 0.0 || (v == 0.0 && (x - xh).abs() >= 1e-12) {
            return Ok((false, format!("prl({x}, {xh}) = {v}")));
        }
        worst = worst.min(v);
        let x = pos(&mut r, 50.0);
        if prl(x, x)? != 0.0 {
            return Ok((false, format!("prl({x}, {x}) != 0")));
        }
    }
    Ok((true, format!("10000 pairs, min off-diagonal {worst:.3e}")))
}

fn prl_convex(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    for _ in 0..10_000 {
        let (x, a, b, t) = (
            pos(&mut r, 20.0),
            pos(&mut r, 20.0),
            pos(&mut r, 20.0),
            r.uniform(),
        );
        let m = t * a + (1.0 - t) * b;
        if prl(x, m)? > t * prl(x, a)? + (1.0 - t) * prl(x, b)? + 1e-9 {
            return Ok((
                false,
                format!("second argument at x {x}, a {a}, b {b}, t {t}"),
            ));
        }
        if prl(m, x)? > t * prl(a, x)? + (1.0 - t) * prl(b, x)? + 1e-9 {
            return Ok((
                false,
                format!("first argument at x̂ {x}, a {a}, b {b}, t {t}"),
            ));
        }
    }
    Ok((true, "10000 triples in each argument".into()))
}

fn prl_scaling(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let (x, xh, s) = (pos(&mut r, 20.0), pos(&mut r, 20.0), pos(&mut r, 10.0));
        let base = prl(x, xh)?;
        let scaled = prl(s * x, s * xh)?;
        // relative to the size of the summands, which bounds the rounding in x ln(x/x̂) − x + x̂
        let size = s * (x * (x / xh).ln().abs() + x + xh);
        worst = worst.max((scaled - s * base).abs() / size);
    }
    Ok((
        worst < 1e-10,
        format!("10000 triples, max error relative to term size {worst:.2e}"),
    ))
}

fn prl_blowup(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    for _ in 0..10_000 {
        let x = pos(&mut r, 50.0);
        let mut prev = prl(x, x / 10.0)?;
        let mut xh = x / 10.0;
        for _ in 0..30 {
            xh *= 0.5;
            let v = prl(x, xh)?;
            if !(v > prev) {
                return Ok((false, format!("not increasing at x {x}, x̂ {xh}")));
            }
            prev = v;
        }
    }
    Ok((true, "10000 points, 30 halvings below x/10".into()))
}

fn conjugate_sup(x: f64) -> f64 {
    let f = |t: f64| x * t - (t.exp() - 1.0);
    let (lo, hi) = (-30.0, x.max(1e-300).ln().max(-30.0) + 10.0);
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + i as f64 * h)
        .fold(lo, |b, t| if f(t) > f(b) { t } else { b });
    // golden-section refinement on the bracketing cells
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(f(best))
}

fn convex_conjugate(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    let mut xs = vec![0.0, 1e-3, 1.0, 7.5];
    xs.extend((0..200).map(|_| 40.0 * r.uniform()));
    let mut worst: f64 = 0.0;
    for x in xs {
        worst = worst.max((l0(x)? - conjugate_sup(x)).abs());
    }
    Ok((
        worst < 1e-6,
        format!("204 points, max abs error {worst:.2e}"),
    ))
}

fn random_prior(r: &mut RngStream, atoms: usize) -> Result<FinitePrior> {
    let mut support: Vec<f64> = (0..atoms).map(|_| pos(r, 20.0)).collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    let weights: Vec<f64> = support.iter().map(|_| 0.05 + r.uniform()).collect();
    FinitePrior::from_weights(support, weights)
}

fn mean_prl(p: &FinitePrior, xh: f64) -> Result<f64> {
    p.support()
        .iter()
        .zip(p.probs())
        .map(|(&x, &w)| Ok(w * prl(x, xh)?))
        .sum()
}

fn bregman_decomposition(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = random_prior(&mut r, 6)?;
        let m = p.mean();
        for _ in 0..5 {
            let xh = pos(&mut r, 25.0);
            let lhs = mean_prl(&p, xh)?;
            let rhs = mean_prl(&p, m)? + prl(m, xh)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok((
        worst < 1e-9,
        format!("1000 cases, max abs error {worst:.2e}"),
    ))
}

fn bregman_minimizer(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    let cell = 1e-3;
    for _ in 0..50 {
        let p = random_prior(&mut r, 5)?;
        let (lo, hi) = (1e-3, 21.0);
        let n = ((hi - lo) / cell) as usize;
        let mut best = (lo, f64::INFINITY);
        for i in 0..=n {
            let xh = lo + i as f64 * cell;
            let v = mean_prl(&p, xh)?;
            if v < best.1 {
                best = (xh, v);
            }
        }
        if (best.0 - p.mean()).abs() > cell {
            return Ok((
                false,
                format!("grid argmin {} vs mean {}", best.0, p.mean()),
            ));
        }
    }
    Ok((
        true,
        format!("50 priors, argmin within one cell ({cell}) of the mean"),
    ))
}

fn poisson_stein(level: Level, rng: &RngStream) -> Result<(bool, String)> {
    let n = match level {
        Level::Fast => 100_000,
        Level::Full => 1_000_000,
    };
    let lambda = 3.7;
    let h = |z: f64| (1.0 + z).ln();
    let mut r = rng.clone();
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let z = poisson_sample(&mut r, lambda)? as f64;
        let d = (z - lambda) * h(z) - lambda * (h(z + 1.0) - h(z));
        s += d;
        s2 += d * d;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    Ok((
        mean.abs() <= 3.0 * se,
        format!("n {n}, mean difference {mean:.3e}, 3σ {:.3e}", 3.0 * se),
    ))
}

fn posterior_monotone(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let mut r = rng.clone();
    for _ in 0..50 {
        let p = random_prior(&mut r, 5)?;
        let collapsed = |m: f64| {
            p.support()
                .iter()
                .any(|&a| (a - m).abs() < 1e-12 * a.max(1.0))
        };
        for &gamma in &[0.1, 1.0, 5.0] {
            let mut prev = f64::NEG_INFINITY;
            for z in 0..40 {
                let m = finite_posterior_mean(&p, gamma, z)?;
                // equality only where the posterior sits on a single atom to machine precision
                if !(m > prev || (m == prev && collapsed(m))) {
                    return Ok((false, format!("gamma {gamma} z {z}: {m} after {prev}")));
                }
                prev = m;
            }
        }
    }
    Ok((true, "50 priors, 3 snr values, z < 40".into()))
}

fn moment_products(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let p = FinitePrior::new(vec![0.5, 1.0, 2.0, 4.0], vec![0.1, 0.2, 0.3, 0.4])?;
    let gamma: f64 = 1.3;
    let mut worst: f64 = 0.0;
    for z in 0..=10 {
        for k in 1..=3 {
            let direct = gamma.powi(k) * p.posterior_moment(gamma, z, k)?;
            let prod = (0..k as u64).try_fold(1.0, |acc, i| {
                Ok::<_, Error>(acc * gamma * finite_posterior_mean(&p, gamma, z + i)?)
            })?;
            worst = worst.max((direct - prod).abs() / direct.max(1.0));
        }
    }
    Ok((
        worst < 1e-8,
        format!("k ≤ 3, z ≤ 10, max error {worst:.2e}"),
    ))
}

fn pmf_derivative(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let p = FinitePrior::new(vec![0.3, 1.0, 2.5], vec![0.3, 0.3, 0.4])?;
    let pmf = |g: f64, z: u64| p.marginal_log_pmf(g, z).exp();
    let mut worst: f64 = 0.0;
    for &gamma in &[0.5, 1.0, 3.0] {
        for z in 0..12 {
            let h = 1e-5 * gamma;
            let d = (pmf(gamma + h, z) - pmf(gamma - h, z)) / (2.0 * h);
            let rhs = z as f64 * pmf(gamma, z) - (z + 1) as f64 * pmf(gamma, z + 1);
            worst = worst.max((gamma * d - rhs).abs());
        }
    }
    Ok((worst < 1e-6, format!("max abs error {worst:.2e}")))
}

// The derivative at z = 0 is minus the posterior variance, not zero.
fn posterior_at_zero(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let p = FinitePrior::new(vec![0.5, 1.0, 3.0], vec![0.2, 0.5, 0.3])?;
    let mut worst: f64 = 0.0;
    for &gamma in &[0.2, 1.0, 4.0] {
        let h = 1e-4 * gamma;
        let f = |g| finite_posterior_mean(&p, g, 0);
        let d = (f(gamma + h)? - f(gamma - h)?) / (2.0 * h);
        let m1 = p.posterior_moment(gamma, 0, 1)?;
        let m2 = p.posterior_moment(gamma, 0, 2)?;
        worst = worst.max((d + (m2 - m1 * m1)).abs());
    }
    Ok((
        worst < 1e-6,
        format!("d/dγ E[X | Z = 0] = −Var(X | Z = 0), max error {worst:.2e}"),
    ))
}

fn entropy_shape(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let h = |l| poisson_entropy(l);
    let mut ok = true;
    let mut l = 0.25;
    while l < 50.0 {
        let (a, b, c) = (h(l)?, h(l + 0.25)?, h(l + 0.5)?);
        ok &= b > a && b > 0.5 * (a + c);
        l += 0.25;
    }
    ok &= h(2.0)? > h(1.0)? && h(1.5)? > 0.5 * (h(1.0)? + h(2.0)?);
    Ok((
        ok,
        "increasing and midpoint-concave on λ ∈ [0.25, 50]".into(),
    ))
}

fn tgr_conjugacy(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for &(rate, gamma) in &[(1.0, 1.0), (0.5, 3.0), (4.0, 0.2)] {
        let prior = GammaPrior::exponential(rate)?;
        let m = ExactMarginal(|z| exp_prior_marginal_pmf(rate, gamma, z));
        for z in 0..=50 {
            let t = tgr_estimate(&m, gamma, z)?;
            let want = (z + 1) as f64 / (rate + gamma);
            worst = worst
                .max((t - want).abs())
                .max((gamma_posterior_mean(&prior, gamma, z) - want).abs());
        }
    }
    Ok((worst < 1e-10, format!("z ≤ 50, max abs error {worst:.2e}")))
}

fn gamma_affine(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let g = GammaPrior::new(0.7, 2.5)?;
    let mut worst: f64 = 0.0;
    for &gamma in &[0.01, 1.0, 30.0] {
        for z in 0..20 {
            let slope = gamma_posterior_mean(&g, gamma, z + 1) - gamma_posterior_mean(&g, gamma, z);
            worst = worst.max((slope - 1.0 / (2.5 + gamma)).abs());
        }
    }
    Ok((worst < 1e-10, format!("max slope error {worst:.2e}")))
}

fn pointwise_relation(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let prior = FinitePrior::uniform(vec![1.0, 2.0])?;
    let p: Prior = prior.clone().into();
    let mut worst: f64 = 0.0;
    for &x in &[1.0, 2.0] {
        for &g in &[0.5, 1.0, 3.0] {
            let h = g * 1e-4;
            let d = (pointwise_kl(&prior, g + h, x)? - pointwise_kl(&prior, g - h, x)?) / (2.0 * h);
            let m = pointwise_mprl(&p, g, x)?;
            worst = worst.max(((d - m) / m).abs());
        }
    }
    Ok((
        worst < 1e-3,
        format!("d KL/dγ vs pointwise loss, max relative error {worst:.2e}"),
    ))
}

fn information_identity(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let prior = FinitePrior::uniform(vec![1.0, 2.0])?;
    let p: Prior = prior.clone().into();
    let mut worst: f64 = 0.0;
    for &g in &[0.5, 1.0, 2.0] {
        let h = g * 1e-4;
        let d = (mutual_information_finite(&prior, g + h)?
            - mutual_information_finite(&prior, g - h)?)
            / (2.0 * h);
        let m = marginal_mprl(&p, g)?;
        worst = worst.max(((d - m) / m).abs());
    }
    Ok((
        worst < 1e-3,
        format!("dI/dγ vs minimum loss, max relative error {worst:.2e}"),
    ))
}

fn partial_integral(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut bound_ok = true;
    for &g0 in &[0.01, 0.1, 1.0, 10.0] {
        let s = exp_prior_partial_integral(1.0, g0)?;
        bound_ok &= s <= g0 / 2.0;
        // Simpson in t = √γ
        let n = 2000;
        let tmax = g0.sqrt();
        let h = tmax / n as f64;
        let f = |t: f64| -> Result<f64> {
            if t == 0.0 {
                Ok(0.0)
            } else {
                Ok(2.0 * t * exp_prior_mprl_series(1.0, t * t)?)
            }
        };
        let mut q = f(0.0)? + f(tmax)?;
        for i in 1..n {
            q += f(i as f64 * h)? * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        q *= h / 3.0;
        worst = worst.max((q - s).abs());
    }
    Ok((
        bound_ok && worst < 1e-4,
        format!("bound γ₀/2 holds: {bound_ok}, quadrature error {worst:.2e}"),
    ))
}

fn exact_likelihood(_: Level, rng: &RngStream) -> Result<(bool, String)> {
    let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0])?);
    let data: Vec<f64> = (0..1024).map(|i| 1.0 + (i % 2) as f64).collect();
    let r = estimate_nll_poisson(&d, &data, &QuadratureSpec::default(), rng)?;
    let err = (r.total - LN_2).abs();
    Ok((
        err < 0.01,
        format!("nll {:.4} vs ln 2, error {err:.2e}", r.total),
    ))
}

fn binary_gaussian(level: Level, rng: &RngStream) -> Result<(bool, String)> {
    let draws = match level {
        Level::Fast => 1000,
        Level::Full => 4000,
    };
    let quad = QuadratureSpec {
        scheme: QuadratureScheme::UniformGrid,
        n_points: 600,
        alpha_lo: -12.0,
        alpha_hi: 6.0,
        mc_draws_per_node: draws,
        ..QuadratureSpec::default()
    };
    let r = estimate_nll_gaussian(&BinaryTanhDenoiser, &[-1.0, 1.0], &quad, rng)?;
    let tol = match level {
        Level::Fast => 5e-3,
        Level::Full => 2e-3,
    };
    let err = (r.total - LN_2).abs();
    Ok((
        err < tol,
        format!(
            "{draws} draws/node: {:.5} vs ln 2, error {err:.2e}",
            r.total
        ),
    ))
}

/// Largest relative error between the analytic gradient and central
/// differences over every parameter of a small network.
pub fn gradient_check_error(
    activation: OutputActivation,
    loss: LossKind,
    hidden: usize,
    seed: u64,
) -> Result<f64> {
    let arch = ArchSpec {
        input_dim: 1,
        hidden_dim: hidden,
        n_hidden_layers: 2,
        embed_dim: 4,
        output_activation: activation,
        ..ArchSpec::default()
    };
    let mut rng = RngStream::new(seed, 0);
    let params = DenoiserParams::init(arch, &mut rng)?;
    // perturb away from the init so every parameter carries gradient
    let mut values = params.values().to_vec();
    for v in &mut values {
        *v += 0.1 * rng.std_normal();
    }
    let params = DenoiserParams::from_values(arch, values)?;
    let z = [0.3, 1.7, 0.9, 2.4];
    let alpha = [-1.3, -1.3, 2.2, 0.4];
    let targets = [0.4, 2.0, 1.1, 3.0];
    let weights = [0.7, 1.2, 0.9, 1.0];
    let (_, g) = params.loss_and_grad(&z, &alpha, &targets, &weights, loss)?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut p = params.clone();
    for i in 0..g.len() {
        let v = p.values()[i];
        p.values_mut()[i] = v + h;
        let up = p.loss_and_grad(&z, &alpha, &targets, &weights, loss)?.0;
        p.values_mut()[i] = v - h;
        let down = p.loss_and_grad(&z, &alpha, &targets, &weights, loss)?.0;
        p.values_mut()[i] = v;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / fd.abs().max(g[i].abs()).max(1e-6));
    }
    Ok(worst)
}

fn network_gradients(_: Level, _: &RngStream) -> Result<(bool, String)> {
    let prl_err = gradient_check_error(OutputActivation::SoftplusEps, LossKind::Prl, 8, 3)?;
    let mse_err = gradient_check_error(OutputActivation::Identity, LossKind::Mse, 8, 3)?;
    let worst = prl_err.max(mse_err);
    Ok((
        worst < 1e-5,
        format!("8 hidden units, prl {prl_err:.2e}, mse {mse_err:.2e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let r = run_suite(Level::Fast, 0);
        assert!(r.passed(), "{}", r.table());
        assert_eq!(r.checks.len(), CHECKS.len());
    }

    #[test]
    fn conjugate_sup_examples() {
        assert!((conjugate_sup(1.0) - 0.0).abs() < 1e-9);
        assert!((conjugate_sup(std::f64::consts::E) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn level_parse() {
        assert_eq!("fast".parse::<Level>().unwrap(), Level::Fast);
        assert!("slow".parse::<Level>().is_err());
    }
}
