//! Special functions: log-factorial, log-gamma, digamma, Hurwitz zeta, the
//! Poisson log-PMF and the logistic distribution used for log-SNR sampling.

use std::sync::OnceLock;

use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const FACT_TABLE: usize = 256;

/// Stirling series for ln Γ(x), valid to ~1e-15 relative for x >= 15.
fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

fn fact_table() -> &'static [f64; FACT_TABLE] {
    static TABLE: OnceLock<[f64; FACT_TABLE]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; FACT_TABLE];
        let mut acc = 0.0;
        for n in 1..FACT_TABLE {
            if n <= 20 {
                acc += (n as f64).ln();
                t[n] = acc;
            } else {
                t[n] = stirling_ln_gamma(n as f64 + 1.0);
            }
        }
        t
    })
}

/// ln(n!). Exact summation of ln k for n <= 20, Stirling series beyond.
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < FACT_TABLE {
        fact_table()[n as usize]
    } else {
        stirling_ln_gamma(n as f64 + 1.0)
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= 15.0 {
        return stirling_ln_gamma(x);
    }
    // Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
    let mut shift = 0.0;
    let mut y = x;
    while y < 15.0 {
        shift += y.ln();
        y += 1.0;
    }
    stirling_ln_gamma(y) - shift
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Digamma ψ(a) = d/da ln Γ(a), via upward recurrence and the asymptotic series.
pub fn digamma(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("digamma requires a > 0, got {a}"));
    }
    let mut acc = 0.0;
    let mut x = a;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    Ok(acc + x.ln() - 0.5 / x - asymptotic_tail(x))
}

// 1/(12x²) − 1/(120x⁴) + 1/(252x⁶) − 1/(240x⁸) + 1/(132x¹⁰)
fn asymptotic_tail(x: f64) -> f64 {
    let i2 = 1.0 / (x * x);
    i2 * (1.0 / 12.0 - i2 * (1.0 / 120.0 - i2 * (1.0 / 252.0 - i2 * (1.0 / 240.0 - i2 / 132.0))))
}

/// ψ(k + 1) − ln k for integer k >= 1, evaluated without cancellation.
///
/// This is the per-term weight of the exponential-prior MPRL series and
/// behaves like 1/(2k) for large k.
pub fn digamma_succ_minus_log(k: u64) -> f64 {
    debug_assert!(k >= 1);
    if k < 10 {
        // ψ(k+1) = H_k − γ_E
        let h: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
        return h - 0.577_215_664_901_532_9 - (k as f64).ln();
    }
    // ψ(k+1) = ψ(k) + 1/k and ψ(k) = ln k − 1/(2k) − tail(k)
    let x = k as f64;
    0.5 / x - asymptotic_tail(x)
}

/// ψ(y + 1) − ln y for real y > 0; the large-y branch avoids cancellation.
pub fn digamma_succ_minus_log_real(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("requires y > 0, got {y}"));
    }
    if y < 10.0 {
        return Ok(digamma(y + 1.0)? - y.ln());
    }
    Ok(0.5 / y - asymptotic_tail(y))
}

/// Hurwitz zeta Σ_{n>=0} (n + q)^{-s} for s > 1, q > 0 (Euler-Maclaurin).
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !(q > 0.0) {
        return domain(format!(
            "hurwitz_zeta requires s > 1, q > 0 (s = {s}, q = {q})"
        ));
    }
    const N: usize = 12;
    // B_{2k} / (2k)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let mut sum = 0.0;
    for n in 0..N {
        sum += (q + n as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s(s+1)...(s+2k-2), times a^{-s-2k+1}
    let mut rising = s;
    let mut pow = a.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * pow;
        let m = 2.0 * k as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        pow /= a * a;
    }
    Ok(sum)
}

/// Riemann zeta for s > 1.
pub fn zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// ln P(Z = z) for Z ~ Poisson(lambda). `lambda = 0` is the point mass at zero.
pub fn poisson_log_pmf(z: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if z == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    z as f64 * lambda.ln() - lambda - log_factorial(z)
}

/// Smallest window `[lo, hi]` around the mode of Poisson(mean) carrying at
/// least `1 - tail` of the mass.
pub fn poisson_window(mean: f64, tail: f64) -> (u64, u64) {
    if mean <= 0.0 {
        return (0, 0);
    }
    if mean > 1e8 {
        // normal regime; 12 sd is far beyond any tail target we use
        let half = 12.0 * mean.sqrt();
        return (((mean - half).max(0.0)) as u64, (mean + half) as u64 + 1);
    }
    let ln_mean = mean.ln();
    let mode = mean.floor() as u64;
    let lp_mode = poisson_log_pmf(mode, mean);
    let (mut lo, mut hi) = (mode, mode);
    let (mut lp_lo, mut lp_hi) = (lp_mode, lp_mode);
    let mut mass = lp_mode.exp();
    while 1.0 - mass > tail {
        let next_hi = lp_hi + ln_mean - ((hi + 1) as f64).ln();
        let next_lo = if lo > 0 {
            lp_lo + (lo as f64).ln() - ln_mean
        } else {
            f64::NEG_INFINITY
        };
        if next_hi >= next_lo {
            hi += 1;
            lp_hi = next_hi;
            mass += next_hi.exp();
        } else {
            lo -= 1;
            lp_lo = next_lo;
            mass += next_lo.exp();
        }
        // rounding in `mass` can stall just short of the target
        if next_hi.max(next_lo) < (tail * 1e-6).ln() {
            break;
        }
    }
    (lo, hi)
}

/// Numerically stable ln Σ exp(v).
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^t) without overflow.
pub fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t + (-t).exp()
    } else {
        t.exp().ln_1p()
    }
}

/// Quantile of Logistic(loc, scale).
pub fn logistic_quantile(u: f64, loc: f64, scale: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("logistic quantile requires u in (0, 1), got {u}"));
    }
    if !(scale > 0.0) {
        return domain(format!("logistic scale must be positive, got {scale}"));
    }
    Ok(loc + scale * (u / (1.0 - u)).ln())
}

/// Density of Logistic(loc, scale) at `alpha`.
pub fn logistic_pdf(alpha: f64, loc: f64, scale: f64) -> f64 {
    let t = (alpha - loc) / scale;
    sigmoid(t) * sigmoid(-t) / scale
}

pub fn logistic_cdf(alpha: f64, loc: f64, scale: f64) -> f64 {
    sigmoid((alpha - loc) / scale)
}
