//! Random variate generation on top of [`RngStream`].

use super::rng::RngStream;
use super::special::log_factorial;
use crate::error::{domain, Result};

/// Rates below this use sequential inversion; at or above it the transformed
/// rejection method (PTRS). The cut is fixed so that draw sequences are
/// reproducible across releases.
pub const POISSON_INVERSION_CUTOFF: f64 = 30.0;

/// Draw from Poisson(lambda).
pub fn poisson_sample(rng: &mut RngStream, lambda: f64) -> Result<u64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return domain(format!(
            "poisson rate must be finite and >= 0, got {lambda}"
        ));
    }
    Ok(poisson_unchecked(rng, lambda))
}

pub(crate) fn poisson_unchecked(rng: &mut RngStream, lambda: f64) -> u64 {
    if lambda == 0.0 {
        0
    } else if lambda < POISSON_INVERSION_CUTOFF {
        poisson_inversion(rng, lambda)
    } else {
        poisson_ptrs(rng, lambda)
    }
}

fn poisson_inversion(rng: &mut RngStream, lambda: f64) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        // cdf can saturate below u through rounding; the remaining mass there is < 1e-15
        if p < 1e-300 && k as f64 > lambda {
            break;
        }
    }
    k
}

// Hörmann (1993), "The transformed rejection method for generating Poisson
// random variables".
fn poisson_ptrs(rng: &mut RngStream, lambda: f64) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.024_83 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let kf = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return kf as u64;
        }
        if kf < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let k = kf as u64;
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= -lambda + kf * loglam - log_factorial(k)
        {
            return k;
        }
    }
}

/// Poisson(lambda) conditioned on being at least 1; `lambda > 0`.
pub(crate) fn zero_truncated_poisson(rng: &mut RngStream, lambda: f64) -> u64 {
    if lambda > 1.0 {
        loop {
            let k = poisson_unchecked(rng, lambda);
            if k > 0 {
                return k;
            }
        }
    }
    if !(lambda > 0.0) {
        return 1;
    }
    // inversion over k >= 1 with P(k) = λ^k e^{-λ} / (k! (1 − e^{-λ}))
    let u = rng.uniform();
    let mut k = 1u64;
    let mut p = lambda / (lambda.exp_m1());
    let mut cdf = p;
    while u > cdf && p > 1e-300 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k
}

/// Draw from Gamma(shape, rate); mean `shape / rate`.
pub fn gamma_sample(rng: &mut RngStream, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0) || !(rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
        return domain(format!(
            "gamma requires shape, rate > 0 (got {shape}, {rate})"
        ));
    }
    Ok(gamma_unit(rng, shape) / rate)
}

// Marsaglia & Tsang (2000), with the U^{1/a} boost for a < 1.
pub(crate) fn gamma_unit(rng: &mut RngStream, shape: f64) -> f64 {
    if shape < 1.0 {
        let g = gamma_unit(rng, shape + 1.0);
        return g * rng.uniform().powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.std_normal();
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = rng.uniform();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

pub(crate) fn beta_sample(rng: &mut RngStream, a: f64, b: f64) -> f64 {
    let x = gamma_unit(rng, a);
    let y = gamma_unit(rng, b);
    x / (x + y)
}

/// Number of failures before the `r`-th success with success probability `p`
/// (support 0, 1, ...; mean r(1−p)/p). Sampled as a Gamma-Poisson mixture.
pub(crate) fn neg_binomial_sample(rng: &mut RngStream, r: f64, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let lambda = gamma_unit(rng, r) * (1.0 - p) / p;
    poisson_unchecked(rng, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::special::poisson_log_pmf;

    #[test]
    fn zero_truncated_poisson_moments() {
        let mut rng = RngStream::new(5, 0);
        assert_eq!(zero_truncated_poisson(&mut rng, 0.0), 1);
        for &lam in &[0.01, 0.5, 3.0] {
            let xs: Vec<f64> = (0..200_000)
                .map(|_| zero_truncated_poisson(&mut rng, lam) as f64)
                .collect();
            assert!(xs.iter().all(|&x| x >= 1.0));
            let (m, _) = mean_var(&xs);
            let want = lam / (1.0 - (-lam).exp());
            assert!(
                (m - want).abs() < 0.01 * want,
                "lambda {lam}: {m} vs {want}"
            );
        }
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn poisson_zero_rate() {
        let mut rng = RngStream::new(1, 1);
        for _ in 0..10 {
            assert_eq!(poisson_sample(&mut rng, 0.0).unwrap(), 0);
        }
        assert!(poisson_sample(&mut rng, -1.0).is_err());
        assert!(poisson_sample(&mut rng, f64::NAN).is_err());
    }

    #[test]
    fn poisson_moments_at_four() {
        let mut rng = RngStream::new(42, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| poisson_sample(&mut rng, 4.0).unwrap() as f64)
            .collect();
        let (m, v) = mean_var(&xs);
        assert!((m - 4.0).abs() < 0.01, "mean {m}");
        assert!((v - 4.0).abs() < 0.05, "var {v}");
    }

    #[test]
    fn poisson_moments_large_rate() {
        let mut rng = RngStream::new(5, 0);
        for &lam in &[30.0, 250.0, 1e6] {
            let xs: Vec<f64> = (0..200_000)
                .map(|_| poisson_sample(&mut rng, lam).unwrap() as f64)
                .collect();
            let (m, v) = mean_var(&xs);
            let se = (lam / 200_000f64).sqrt();
            assert!((m - lam).abs() < 5.0 * se, "lambda {lam}: mean {m}");
            assert!((v / lam - 1.0).abs() < 0.02, "lambda {lam}: var {v}");
        }
    }

    #[test]
    fn poisson_pmf_agreement_small() {
        let mut rng = RngStream::new(9, 0);
        let n = 200_000;
        let mut counts = [0usize; 8];
        for _ in 0..n {
            let k = poisson_sample(&mut rng, 1.3).unwrap() as usize;
            if k < 8 {
                counts[k] += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = poisson_log_pmf(k as u64, 1.3).exp();
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() < 5.0 * se + 1e-6, "k = {k}");
        }
    }

    #[test]
    fn gamma_moments() {
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| gamma_sample(&mut rng, 2.0, 3.0).unwrap())
            .collect();
        let (m, v) = mean_var(&xs);
        assert!((m - 2.0 / 3.0).abs() < 0.005, "mean {m}");
        assert!((v - 2.0 / 9.0).abs() < 0.01, "var {v}");
        assert!(gamma_sample(&mut rng, 0.0, 1.0).is_err());
        assert!(gamma_sample(&mut rng, 1.0, -2.0).is_err());
    }

    #[test]
    fn gamma_shape_one_is_exponential() {
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..400_000)
            .map(|_| gamma_sample(&mut rng, 1.0, 4.0).unwrap())
            .collect();
        let (m, v) = mean_var(&xs);
        assert!((m - 0.25).abs() < 5.0 * 0.25 / (400_000f64).sqrt());
        assert!((v - 0.0625).abs() < 0.002);
    }

    #[test]
    fn gamma_small_shape() {
        let mut rng = RngStream::new(13, 0);
        let xs: Vec<f64> = (0..400_000)
            .map(|_| gamma_sample(&mut rng, 0.5, 0.5).unwrap())
            .collect();
        let (m, v) = mean_var(&xs);
        assert!((m - 1.0).abs() < 0.01, "mean {m}");
        assert!((v - 2.0).abs() < 0.05, "var {v}");
    }
}
