//! Invariants of the NLL estimator: unbiasedness of the importance scheme,
//! agreement between schemes, and the integrated loss identity.

mod common;

use poisson_diffusion::channel::NoiseKind;
use poisson_diffusion::denoiser::{ConstantDenoiser, PosteriorMeanDenoiser};
use poisson_diffusion::likelihood::{estimate_nll_poisson, QuadratureScheme, QuadratureSpec};
use poisson_diffusion::math::{prl, RngStream};
use poisson_diffusion::oracle::{marginal_mprl, FinitePrior, Prior};
use std::f64::consts::LN_2;

fn no_tails(scheme: QuadratureScheme, n_points: usize) -> QuadratureSpec {
    QuadratureSpec {
        scheme,
        n_points,
        tails: false,
        ..QuadratureSpec::default()
    }
}

/// A constant denoiser has a deterministic loss `l(x, c)` at every node, so
/// the window integral is `l(x, c)·(e^hi − e^lo)` exactly.
#[test]
fn importance_scheme_is_unbiased_on_a_known_integral() {
    let d = ConstantDenoiser {
        value: 2.5,
        noise: NoiseKind::Poisson,
    };
    let data = [1.0, 4.0];
    let quad = QuadratureSpec {
        alpha_lo: -28.0,
        alpha_hi: 3.0,
        ..no_tails(QuadratureScheme::LogisticImportance, 40)
    };
    let mean_loss = (prl(1.0, 2.5).unwrap() + prl(4.0, 2.5).unwrap()) / 2.0;
    let exact = mean_loss * (quad.alpha_hi.exp() - quad.alpha_lo.exp());
    let estimates: Vec<f64> = (0..400)
        .map(|s| {
            estimate_nll_poisson(&d, &data, &quad, &RngStream::new(s, 0))
                .unwrap()
                .diffusion_term
        })
        .collect();
    let m = common::mean(&estimates);
    let se = common::std_dev(&estimates) / (estimates.len() as f64).sqrt();
    assert!(se > 0.0, "node placement should vary with the seed");
    assert!(
        (m - exact).abs() < 4.0 * se,
        "mean {m} vs exact {exact} (se {se})"
    );

    let grid = estimate_nll_poisson(
        &d,
        &data,
        &no_tails(QuadratureScheme::UniformGrid, 20_000),
        &RngStream::new(0, 0),
    )
    .unwrap();
    let exact_full = mean_loss * (37f64.exp() - (-28f64).exp());
    assert!(
        (grid.diffusion_term / exact_full - 1.0).abs() < 1e-5,
        "grid {}",
        grid.diffusion_term
    );
}

#[test]
fn schemes_agree_for_the_exact_posterior_mean() {
    let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0]).unwrap());
    let data: Vec<f64> = (0..2048).map(|i| 1.0 + (i % 2) as f64).collect();
    let rng = RngStream::new(3, 0);
    let imp = estimate_nll_poisson(
        &d,
        &data,
        &no_tails(QuadratureScheme::LogisticImportance, 1000),
        &rng,
    )
    .unwrap();
    let grid = estimate_nll_poisson(
        &d,
        &data,
        &no_tails(QuadratureScheme::UniformGrid, 1000),
        &rng,
    )
    .unwrap();
    let rel = (imp.diffusion_term - grid.diffusion_term).abs() / grid.diffusion_term;
    assert!(
        rel < 0.02,
        "importance {} vs grid {}",
        imp.diffusion_term,
        grid.diffusion_term
    );
    assert!(
        (grid.diffusion_term - LN_2).abs() < 0.01,
        "grid {} imp {}",
        grid.diffusion_term,
        imp.diffusion_term
    );
}

/// ∫ mprl(γ) dγ over (0, ∞) recovers the prior entropy, here ln 2, using
/// exact marginal MPRL values and no Monte Carlo.
#[test]
fn integrated_mprl_recovers_the_entropy() {
    let prior = Prior::Finite(FinitePrior::uniform(vec![1.0, 2.0]).unwrap());
    let (lo, hi, n) = (-30.0_f64, 12.0_f64, 8001);
    let h = (hi - lo) / (n - 1) as f64;
    let total: f64 = (0..n)
        .map(|i| {
            let a = lo + h * i as f64;
            let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
            w * a.exp() * marginal_mprl(&prior, a.exp()).unwrap()
        })
        .sum();
    assert!((total - LN_2).abs() < 1e-4, "∫ mprl = {total}");
}

#[test]
fn tails_bound_the_truncated_mass() {
    let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0]).unwrap());
    let data: Vec<f64> = (0..256).map(|i| 1.0 + (i % 2) as f64).collect();
    let quad = QuadratureSpec {
        scheme: QuadratureScheme::UniformGrid,
        alpha_lo: -4.0,
        alpha_hi: 3.0,
        ..QuadratureSpec::default()
    };
    let r = estimate_nll_poisson(&d, &data, &quad, &RngStream::new(4, 0)).unwrap();
    assert!(r.left_tail > 0.0 && r.right_tail > 0.0);
    // the bounds cap what the narrow window leaves out
    assert!(
        r.total >= LN_2 - 0.01,
        "bounded total {} below ln 2",
        r.total
    );
}
