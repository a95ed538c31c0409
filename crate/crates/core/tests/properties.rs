//! Property tests over randomly drawn inputs.

use poisson_diffusion::channel::SnrPoint;
use poisson_diffusion::math::{l0, prl, RngStream};
use poisson_diffusion::metrics::wasserstein1;
use poisson_diffusion::oracle::{
    finite_posterior_mean, gamma_posterior_mean, FinitePrior, GammaPrior,
};
use poisson_diffusion::sampler::make_schedule;
use poisson_diffusion::synthetic::{DistributionSpec, DISCRETE_PRESETS};
use proptest::prelude::*;

fn positive() -> impl Strategy<Value = f64> {
    (-6.0f64..6.0).prop_map(f64::exp)
}

/// Finite priors with 2 to 6 distinct atoms in (0, 20] and random weights.
fn finite_prior() -> impl Strategy<Value = FinitePrior> {
    prop::collection::vec((0.05f64..20.0, 0.05f64..1.0), 2..6).prop_filter_map(
        "distinct atoms",
        |mut atoms| {
            atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
            atoms.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-3);
            if atoms.len() < 2 {
                return None;
            }
            let (s, w): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
            FinitePrior::from_weights(s, w).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn prl_is_nonnegative_and_zero_only_at_equality(x in positive(), xhat in positive()) {
        let l = prl(x, xhat).unwrap();
        prop_assert!(l >= 0.0);
        if (x - xhat).abs() > 1e-6 * x.max(xhat) {
            prop_assert!(l > 0.0);
        }
        prop_assert_eq!(prl(x, x).unwrap(), 0.0);
    }

    #[test]
    fn prl_is_convex_in_the_estimate(x in positive(), a in positive(), b in positive(), t in 0.0f64..1.0) {
        let mid = prl(x, t * a + (1.0 - t) * b).unwrap();
        let chord = t * prl(x, a).unwrap() + (1.0 - t) * prl(x, b).unwrap();
        prop_assert!(mid <= chord + 1e-9 * (1.0 + chord));
    }

    #[test]
    fn prl_is_homogeneous(x in positive(), xhat in positive(), s in positive()) {
        let lhs = prl(s * x, s * xhat).unwrap();
        let rhs = s * prl(x, xhat).unwrap();
        let magnitude = s * (x * (x / xhat).ln().abs() + x + xhat);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * magnitude);
    }

    #[test]
    fn conjugate_bound_holds_for_every_slope(x in positive(), t in -30.0f64..10.0) {
        // l0 is the supremum, so no single slope can exceed it
        prop_assert!(x * t - (t.exp() - 1.0) <= l0(x).unwrap() + 1e-9 * (1.0 + x));
    }

    #[test]
    fn bregman_decomposition(prior in finite_prior(), xhat in positive()) {
        let m = prior.mean();
        let lhs: f64 = prior.support().iter().zip(prior.probs()).map(|(&x, &p)| p * prl(x, xhat).unwrap()).sum();
        let at_mean: f64 = prior.support().iter().zip(prior.probs()).map(|(&x, &p)| p * prl(x, m).unwrap()).sum();
        let rhs = at_mean + prl(m, xhat).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn posterior_mean_is_monotone_and_bounded(prior in finite_prior(), gamma in 0.01f64..50.0) {
        let (lo, hi) = (prior.support()[0], *prior.support().last().unwrap());
        let mut prev = f64::NEG_INFINITY;
        for z in 0..30u64 {
            let m = finite_posterior_mean(&prior, gamma, z).unwrap();
            prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
            let at_atom = prior.support().iter().any(|s| (s - m).abs() <= 1e-12 * s);
            prop_assert!(m > prev || (at_atom && m >= prev - 1e-12), "z {}: {} after {}", z, m, prev);
            prev = m;
        }
    }

    #[test]
    fn gamma_posterior_mean_is_affine(shape in 0.2f64..10.0, rate in 0.1f64..10.0, gamma in 0.0f64..20.0) {
        let prior = GammaPrior::new(shape, rate).unwrap();
        let slope = 1.0 / (rate + gamma);
        for z in 0..20u64 {
            let d = gamma_posterior_mean(&prior, gamma, z + 1) - gamma_posterior_mean(&prior, gamma, z);
            prop_assert!((d - slope).abs() < 1e-10 * (1.0 + slope));
        }
    }

    #[test]
    fn snr_round_trips(alpha in -30.0f64..40.0) {
        let back = SnrPoint::from_gamma(SnrPoint::from_alpha(alpha).gamma).alpha;
        prop_assert!((back - alpha).abs() < 1e-12 * (1.0 + alpha.abs()));
    }

    #[test]
    fn schedule_is_log_spaced(steps in 2usize..200, lo in -20.0f64..0.0, width in 0.5f64..30.0) {
        let s = make_schedule(steps, lo, lo + width).unwrap();
        let g: Vec<f64> = (1..=steps).map(|t| s.gamma(t)).collect();
        let ratio = (width / (steps - 1) as f64).exp();
        for w in g.windows(2) {
            prop_assert!((w[0] / w[1] / ratio - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn wasserstein_is_a_metric(a in prop::collection::vec(0.0f64..50.0, 1..40), shift in -5.0f64..5.0) {
        let b: Vec<f64> = a.iter().map(|x| x + shift).collect();
        prop_assert!(wasserstein1(&a, &a).unwrap().abs() < 1e-12);
        let d = wasserstein1(&a, &b).unwrap();
        prop_assert!((d - shift.abs()).abs() < 1e-9);
        prop_assert!((d - wasserstein1(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn discrete_samples_are_counts_within_the_cap(seed in 0u64..1000, which in 0usize..6) {
        let spec = DistributionSpec::preset(DISCRETE_PRESETS[which]).unwrap();
        let xs = spec.sample(200, &RngStream::new(seed, 0)).unwrap();
        for x in xs {
            prop_assert!(x >= 0.0 && x.fract() == 0.0);
            if let Some(k) = spec.truncation {
                prop_assert!(x <= k as f64);
            }
        }
    }
}
