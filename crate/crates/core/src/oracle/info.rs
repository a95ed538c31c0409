use super::{FinitePrior, TAIL_MASS};
use crate::error::{domain, Result};
use crate::math::{poisson_log_pmf, poisson_window};

fn check_snr(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return domain(format!("snr must be positive and finite, got {gamma}"));
    }
    Ok(())
}

/// Marginal log-PMF over the window `[lo, hi]`.
fn marginal_table(prior: &FinitePrior, gamma: f64, lo: u64, hi: u64) -> Vec<f64> {
    (lo..=hi)
        .map(|z| prior.marginal_log_pmf(gamma, z))
        .collect()
}

/// I(X; Z_γ) in nats for a finite prior.
pub fn mutual_information_finite(prior: &FinitePrior, gamma: f64) -> Result<f64> {
    check_snr(gamma)?;
    let (lo, hi) = prior.output_range(gamma, TAIL_MASS);
    let log_marg = marginal_table(prior, gamma, lo, hi);
    let mut total = 0.0;
    for (&x, &p) in prior.support().iter().zip(prior.probs()) {
        if p > 0.0 {
            total += p * kl_against(&log_marg, lo, gamma * x);
        }
    }
    Ok(total.max(0.0))
}

/// D_KL(P(z | x) ‖ P(z)) where `P(z)` is the marginal under `prior`.
pub fn pointwise_kl(prior: &FinitePrior, gamma: f64, x: f64) -> Result<f64> {
    check_snr(gamma)?;
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("input must be finite and >= 0, got {x}"));
    }
    let (lo, hi) = prior.output_range(gamma, TAIL_MASS);
    let (a, b) = poisson_window(gamma * x, TAIL_MASS);
    let (lo, hi) = (lo.min(a), hi.max(b));
    let log_marg = marginal_table(prior, gamma, lo, hi);
    Ok(kl_against(&log_marg, lo, gamma * x))
}

fn kl_against(log_marg: &[f64], lo: u64, lambda: f64) -> f64 {
    let (a, b) = poisson_window(lambda, TAIL_MASS);
    let mut acc = 0.0;
    for z in a..=b {
        let lp = poisson_log_pmf(z, lambda);
        if lp == f64::NEG_INFINITY {
            continue;
        }
        acc += lp.exp() * (lp - log_marg[(z - lo) as usize]);
    }
    acc
}

/// dI/dγ by central differences with step `γ·1e−4`, refined by one
/// Richardson extrapolation step.
pub fn mutual_information_derivative(prior: &FinitePrior, gamma: f64) -> Result<f64> {
    check_snr(gamma)?;
    let h = gamma * 1e-4;
    let central = |h: f64| -> Result<f64> {
        let up = mutual_information_finite(prior, gamma + h)?;
        let down = mutual_information_finite(prior, gamma - h)?;
        Ok((up - down) / (2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Entropy of Poisson(λ) in nats:
/// `λ − λ ln λ + e^{−λ} Σ_k λ^k ln(k!)/k!`.
pub fn poisson_entropy(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("poisson entropy needs lambda > 0, got {lambda}"));
    }
    // −Σ P ln P rather than the expanded form, which cancels badly for large λ
    let (lo, hi) = poisson_window(lambda, 1e-14);
    let (mut mass, mut acc) = (0.0, 0.0);
    for k in lo..=hi {
        let lp = poisson_log_pmf(k, lambda);
        let p = lp.exp();
        mass += p;
        acc -= p * lp;
    }
    Ok(acc / mass)
}
