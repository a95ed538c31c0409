//! Goodness-of-fit of every sampler against independent reference
//! distributions from `statrs`.

mod common;

use common::{assert_fits, ks_critical, ks_statistic};
use poisson_diffusion::math::{gamma_sample, poisson_sample, RngStream};
use poisson_diffusion::synthetic::{DistributionSpec, CONTINUOUS_PRESETS, DISCRETE_PRESETS};
use statrs::distribution::{
    Beta, Cauchy, ContinuousCDF, Discrete, Gamma, LogNormal, NegativeBinomial, Poisson, StudentsT,
    Uniform, Weibull,
};

const N: usize = 100_000;

fn poisson_pmf(lambda: f64, cap: u64) -> Vec<f64> {
    let d = Poisson::new(lambda).unwrap();
    (0..=cap).map(|k| d.pmf(k)).collect()
}

#[test]
fn poisson_sampler_matches_reference_pmf() {
    for (i, &lambda) in [0.5, 4.0, 100.0].iter().enumerate() {
        let mut rng = RngStream::new(11, i as u64);
        let draws: Vec<u64> = (0..N)
            .map(|_| poisson_sample(&mut rng, lambda).unwrap())
            .collect();
        assert_fits(
            &format!("poisson({lambda})"),
            draws,
            &poisson_pmf(lambda, (lambda * 3.0 + 30.0) as u64),
        );
    }
}

#[test]
fn gamma_sampler_matches_reference_cdf() {
    for (i, &(shape, rate)) in [(0.5, 1.0), (1.0, 2.0), (7.5, 0.3)].iter().enumerate() {
        let mut rng = RngStream::new(12, i as u64);
        let draws: Vec<f64> = (0..N)
            .map(|_| gamma_sample(&mut rng, shape, rate).unwrap())
            .collect();
        let d = Gamma::new(shape, rate).unwrap();
        let ks = ks_statistic(&draws, |x| d.cdf(x));
        assert!(ks < ks_critical(), "gamma({shape}, {rate}): D√n = {ks:.3}");
    }
}

/// Reference PMF for each discrete preset, built from `statrs` components
/// or closed forms, truncated and renormalized like the preset.
fn reference_pmf(name: &str, cap: u64) -> Vec<f64> {
    match name {
        "poissmix" => {
            let (a, b) = (Poisson::new(1.0).unwrap(), Poisson::new(100.0).unwrap());
            (0..=cap).map(|k| 0.1 * a.pmf(k) + 0.9 * b.pmf(k)).collect()
        }
        "zip" => {
            let d = Poisson::new(5.0).unwrap();
            (0..=cap)
                .map(|k| 0.3 * d.pmf(k) + if k == 0 { 0.7 } else { 0.0 })
                .collect()
        }
        "nbinommix" => {
            let (a, b) = (
                NegativeBinomial::new(1.0, 0.9).unwrap(),
                NegativeBinomial::new(10.0, 0.1).unwrap(),
            );
            (0..=cap).map(|k| 0.8 * a.pmf(k) + 0.2 * b.pmf(k)).collect()
        }
        "bnb" => (0..=cap)
            .map(|k| bnb_by_quadrature(k, 0.5, 1.5, 5.0))
            .collect(),
        // unnormalized power law; the truncated preset is renormalized below
        "zipf" => (0..=cap)
            .map(|k| if k == 0 { 0.0 } else { (k as f64).powf(-1.7) })
            .collect(),
        // ρ = 2: ρ·B(k, ρ+1) = 4 / (k (k+1) (k+2))
        "yulesimon" => (0..=cap)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    4.0 / (k * (k + 1) * (k + 2)) as f64
                }
            })
            .collect(),
        other => panic!("no reference for {other}"),
    }
}

/// Beta-negative-binomial PMF as the Beta mixture of negative binomials,
/// integrated numerically after the substitution p = u² that removes the
/// endpoint singularity of Beta(0.5, ·).
fn bnb_by_quadrature(k: u64, a: f64, b: f64, r: f64) -> f64 {
    let beta = Beta::new(a, b).unwrap();
    let m = 200_000;
    let h = 1.0 / m as f64;
    (0..m)
        .map(|i| {
            let u = (i as f64 + 0.5) * h;
            let p = u * u;
            let nb = NegativeBinomial::new(r, p).unwrap().pmf(k);
            let dens = statrs::distribution::Continuous::pdf(&beta, p);
            nb * dens * 2.0 * u * h
        })
        .sum()
}

#[test]
fn discrete_pmfs_match_independent_references() {
    for name in DISCRETE_PRESETS {
        let spec = DistributionSpec::preset(name).unwrap();
        let cap = spec.truncation.unwrap_or(400);
        let ours = spec.pmf_table(cap).unwrap();
        let mut reference = reference_pmf(name, cap);
        if spec.truncation.is_some() {
            let z: f64 = reference.iter().sum();
            reference.iter_mut().for_each(|p| *p /= z);
        }
        let tol = if name == "bnb" { 1e-6 } else { 1e-10 };
        for (k, (p, q)) in ours.iter().zip(&reference).enumerate() {
            assert!(
                (p - q).abs() <= tol * q.max(1e-300) + 1e-300,
                "{name} pmf({k}): {p} vs {q}"
            );
        }
    }
}

#[test]
fn discrete_samplers_fit_their_pmfs() {
    for (i, name) in DISCRETE_PRESETS.iter().enumerate() {
        let spec = DistributionSpec::preset(name).unwrap();
        let cap = spec.truncation.unwrap_or(400);
        let xs = spec.sample(N, &RngStream::new(13, i as u64)).unwrap();
        assert!(
            xs.iter().all(|x| x.fract() == 0.0 && *x >= 0.0),
            "{name} produced a non-count"
        );
        assert_fits(
            name,
            xs.iter().map(|&x| x as u64),
            &spec.pmf_table(cap).unwrap(),
        );
    }
}

fn reference_cdf(name: &str) -> Box<dyn Fn(f64) -> f64> {
    match name {
        "gamma" => {
            let d = Gamma::new(0.5, 0.5).unwrap();
            Box::new(move |x| d.cdf(x))
        }
        "lognormal" => {
            let d = LogNormal::new(0.0, 1.5).unwrap();
            Box::new(move |x| d.cdf(x))
        }
        "lomax" => Box::new(|x: f64| 1.0 - (1.0 + x).powf(-2.0)),
        "halfcauchy" => {
            let d = Cauchy::new(0.0, 1.0).unwrap();
            Box::new(move |x| 2.0 * d.cdf(x) - 1.0)
        }
        "halft" => {
            let d = StudentsT::new(0.0, 1.0, 3.0).unwrap();
            Box::new(move |x| 2.0 * d.cdf(x) - 1.0)
        }
        "weibull" => {
            let d = Weibull::new(1.5, 1.0).unwrap();
            Box::new(move |x| d.cdf(x))
        }
        "beta" => {
            let d = Beta::new(2.0, 2.0).unwrap();
            Box::new(move |x| d.cdf(x))
        }
        "uniform" => {
            let d = Uniform::new(0.0, 1.0).unwrap();
            Box::new(move |x| d.cdf(x))
        }
        other => panic!("no reference for {other}"),
    }
}

#[test]
fn continuous_samplers_fit_reference_cdfs() {
    for (i, name) in CONTINUOUS_PRESETS.iter().enumerate() {
        let spec = DistributionSpec::preset(name).unwrap();
        let xs = spec.sample(N, &RngStream::new(14, i as u64)).unwrap();
        let ks = ks_statistic(&xs, reference_cdf(name));
        assert!(
            ks < ks_critical(),
            "{name}: D√n = {ks:.3} exceeds {:.3}",
            ks_critical()
        );
    }
}

#[test]
fn continuous_densities_match_references() {
    use statrs::distribution::Continuous;
    let checks: [(&str, Box<dyn Fn(f64) -> f64>); 4] = [
        ("gamma", Box::new(|x| Gamma::new(0.5, 0.5).unwrap().pdf(x))),
        (
            "lognormal",
            Box::new(|x| LogNormal::new(0.0, 1.5).unwrap().pdf(x)),
        ),
        (
            "weibull",
            Box::new(|x| Weibull::new(1.5, 1.0).unwrap().pdf(x)),
        ),
        ("beta", Box::new(|x| Beta::new(2.0, 2.0).unwrap().pdf(x))),
    ];
    for (name, reference) in checks {
        let spec = DistributionSpec::preset(name).unwrap();
        for x in [0.05, 0.3, 0.7, 0.95] {
            let (p, q) = (spec.pdf(x).unwrap(), reference(x));
            assert!((p - q).abs() < 1e-10 * q, "{name} pdf({x}): {p} vs {q}");
        }
    }
}
