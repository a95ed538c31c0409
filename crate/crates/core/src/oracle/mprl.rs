//! Minimum Poisson reconstruction loss: the expected PRL of the exact
//! posterior mean, either at a fixed input (pointwise) or averaged over the
//! prior (marginal).

use super::{FinitePrior, GammaPrior, Prior, TAIL_MASS};
use crate::error::{domain, Result};
use crate::math::special::digamma_succ_minus_log;
use crate::math::{digamma_succ_minus_log_real, poisson_log_pmf, poisson_window, prl_unchecked};

/// E_{Z ~ Pois(γx)}[prl(x, E[X | Z])].
pub fn pointwise_mprl(prior: &Prior, gamma: f64, x: f64) -> Result<f64> {
    pointwise_mprl_window(prior, gamma, x).map(|(v, _)| v)
}

/// [`pointwise_mprl`] together with the inclusive output window `[lo, hi]`
/// that the sum was truncated to.
pub fn pointwise_mprl_window(prior: &Prior, gamma: f64, x: f64) -> Result<(f64, (u64, u64))> {
    check_snr(gamma)?;
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("input must be finite and >= 0, got {x}"));
    }
    let lambda = gamma * x;
    let (lo, hi) = poisson_window(lambda, TAIL_MASS);
    let mut acc = 0.0;
    for z in lo..=hi {
        let w = poisson_log_pmf(z, lambda).exp();
        if w == 0.0 {
            continue;
        }
        acc += w * prl_unchecked(x, prior.posterior_mean(gamma, z)?);
    }
    Ok((acc, (lo, hi)))
}

/// E_X[pointwise_mprl(X, γ)]: an exact sum for finite priors, a convergent
/// series for Gamma priors.
pub fn marginal_mprl(prior: &Prior, gamma: f64) -> Result<f64> {
    check_snr(gamma)?;
    match prior {
        Prior::Finite(f) => finite_marginal_mprl(f, gamma),
        Prior::Gamma(g) if g.shape() == 1.0 => exp_prior_mprl_series(g.rate(), gamma),
        Prior::Gamma(g) => gamma_marginal_mprl(g, gamma),
    }
}

fn check_snr(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("snr must be positive and finite, got {gamma}"));
    }
    Ok(())
}

fn finite_marginal_mprl(prior: &FinitePrior, gamma: f64) -> Result<f64> {
    let (lo, hi) = prior.output_range(gamma, TAIL_MASS);
    let means = (lo..=hi)
        .map(|z| prior.posterior_moment(gamma, z, 1))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for (&x, &p) in prior.support().iter().zip(prior.probs()) {
        if p == 0.0 {
            continue;
        }
        let lambda = gamma * x;
        let (a, b) = poisson_window(lambda, TAIL_MASS);
        let mut acc = 0.0;
        for z in a..=b {
            let w = poisson_log_pmf(z, lambda).exp();
            acc += w * prl_unchecked(x, means[(z - lo) as usize]);
        }
        total += p * acc;
    }
    Ok(total)
}

// Posterior Gamma(A, B) with A = a + z, B = b + γ gives
// E[X ln X | z] − x̂ ln x̂ = (A/B)(ψ(A + 1) − ln A); average over the
// negative-binomial marginal of Z.
fn gamma_marginal_mprl(prior: &GammaPrior, gamma: f64) -> Result<f64> {
    const MAX_TERMS: u64 = 100_000_000;
    let (a, b) = (prior.shape(), prior.rate());
    let big_b = b + gamma;
    let q = b / big_b;
    let ln_fail = (gamma / big_b).ln();
    let mut lp = a * q.ln();
    let mut sum = 0.0;
    let mut z = 0u64;
    loop {
        let big_a = a + z as f64;
        let term = lp.exp() * (big_a / big_b) * digamma_succ_minus_log_real(big_a)?;
        sum += term;
        let ratio = ((big_a) / (z + 1) as f64).ln() + ln_fail;
        // remaining terms are each below P(z') / B, with P geometric-bounded
        let r = ratio.exp().max(gamma / big_b);
        if ratio < 0.0 && lp.exp() * r / (1.0 - r) / big_b < 1e-15 * sum {
            break;
        }
        z += 1;
        if z > MAX_TERMS {
            return domain(format!(
                "gamma-prior series did not converge at snr {gamma}"
            ));
        }
        lp += ratio;
    }
    Ok(sum)
}

/// Exponential-prior MPRL
/// `λ/(λ+γ)² Σ_{z≥0} (z+1) p^z [ψ(z+2) − ln(z+1)]` with `p = γ/(λ+γ)`.
///
/// Summed directly until a term drops below 1e−14 of the partial sum; for
/// `p` close to 1 the slowly decaying part of the summand is summed in
/// closed form first.
pub fn exp_prior_mprl_series(rate: f64, gamma: f64) -> Result<f64> {
    if !(rate > 0.0) || !(gamma > 0.0) || !rate.is_finite() || !gamma.is_finite() {
        return domain(format!(
            "rate and snr must be positive (got {rate}, {gamma})"
        ));
    }
    let p = gamma / (rate + gamma);
    let pref = rate / ((rate + gamma) * (rate + gamma));
    let s = if p <= 0.9 {
        mprl_sum_direct(p)
    } else {
        mprl_sum_accelerated(p)
    };
    Ok(pref * s)
}

// Σ_{k≥1} k p^{k−1} d(k) with d(k) = ψ(k+1) − ln k.
fn mprl_sum_direct(p: f64) -> f64 {
    let mut s = 0.0;
    let mut pk = 1.0;
    let mut k = 1u64;
    loop {
        let term = k as f64 * pk * digamma_succ_minus_log(k);
        s += term;
        if term / (1.0 - p) < 1e-14 * s {
            return s;
        }
        pk *= p;
        k += 1;
    }
}

// Same sum, using k d(k) = 1/2 − 1/(12k) + r(k) for k >= 10 so that only the
// fast-decaying r(k) is summed term by term.
fn mprl_sum_accelerated(p: f64) -> f64 {
    let mut s = 0.0;
    let mut head_log = 0.0;
    let mut pk = 1.0;
    for k in 1..10u64 {
        s += k as f64 * pk * digamma_succ_minus_log(k);
        head_log += pk * p / k as f64;
        pk *= p;
    }
    // pk = p^9 here
    s += 0.5 * pk / (1.0 - p);
    s -= (-(-p).ln_1p() - head_log) / (12.0 * p);
    let mut k = 10u64;
    loop {
        let term = pk * stirling_residual(k as f64);
        s += term;
        if term * k as f64 / 2.0 < 1e-15 * s || k > 100_000_000 {
            return s;
        }
        pk *= p;
        k += 1;
    }
}

// r(k) = 1/(12k) − k·tail(k), where tail is the digamma asymptotic remainder:
// 1/(120k³) − 1/(252k⁵) + 1/(240k⁷) − 1/(132k⁹).
fn stirling_residual(k: f64) -> f64 {
    let i2 = 1.0 / (k * k);
    i2 * i2 * k * (1.0 / 120.0 - i2 * (1.0 / 252.0 - i2 * (1.0 / 240.0 - i2 / 132.0)))
}

/// `∫₀^{γ₀} mprl(γ) dγ` for an exponential prior, as the series
/// `Σ_{k≥1} [ψ(k+1) − ln k] x^k` with `x = γ₀/(λ+γ₀)`.
pub fn exp_prior_partial_integral(rate: f64, gamma0: f64) -> Result<f64> {
    if !(rate > 0.0) || !(gamma0 > 0.0) || !rate.is_finite() || !gamma0.is_finite() {
        return domain(format!(
            "rate and snr must be positive (got {rate}, {gamma0})"
        ));
    }
    let x = gamma0 / (rate + gamma0);
    Ok(if x <= 0.9 {
        partial_sum_direct(x)
    } else {
        partial_sum_accelerated(x)
    })
}

fn partial_sum_direct(x: f64) -> f64 {
    let mut s = 0.0;
    let mut xk = x;
    let mut k = 1u64;
    loop {
        let term = digamma_succ_minus_log(k) * xk;
        s += term;
        if term / (1.0 - x) < 1e-15 * s {
            return s;
        }
        xk *= x;
        k += 1;
    }
}

// d(k) = 1/(2k) − 1/(12k²) + r(k)/k for k >= 10
fn partial_sum_accelerated(x: f64) -> f64 {
    let mut s = 0.0;
    let (mut h1, mut h2) = (0.0, 0.0);
    let mut xk = x;
    for k in 1..10u64 {
        let kf = k as f64;
        s += digamma_succ_minus_log(k) * xk;
        h1 += xk / kf;
        h2 += xk / (kf * kf);
        xk *= x;
    }
    s += 0.5 * (-(-x).ln_1p() - h1);
    s -= (dilog(x) - h2) / 12.0;
    let mut k = 10u64;
    loop {
        let kf = k as f64;
        let term = xk * stirling_residual(kf) / kf;
        s += term;
        if term * kf / 3.0 < 1e-15 * s || k > 100_000_000 {
            return s;
        }
        xk *= x;
        k += 1;
    }
}

/// Li₂(x) for x in [0, 1].
fn dilog(x: f64) -> f64 {
    fn series(x: f64) -> f64 {
        let (mut s, mut xk, mut k) = (0.0, x, 1.0);
        while xk > 1e-17 * k * k {
            s += xk / (k * k);
            xk *= x;
            k += 1.0;
        }
        s
    }
    if x == 1.0 {
        std::f64::consts::PI.powi(2) / 6.0
    } else if x <= 0.5 {
        series(x)
    } else {
        let y = 1.0 - x;
        std::f64::consts::PI.powi(2) / 6.0 - x.ln() * y.ln() - series(y)
    }
}
