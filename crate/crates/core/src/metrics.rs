//! Sample-quality metrics: W1 distance, empirical NLL of held-out data
//! under a generated PMF, and smoothed PMF estimates with bootstrap bands.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::math::RngStream;
use crate::oracle::EmpiricalPmf;

/// Default lattice-Gaussian bandwidth.
pub const DEFAULT_BANDWIDTH: f64 = 1.0;
/// Default number of bootstrap resamples.
pub const DEFAULT_BOOTSTRAP: usize = 10;

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return domain(format!("{name} is empty"));
    }
    if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
        return domain(format!("{name} contains non-finite value {bad}"));
    }
    Ok(())
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Wasserstein-1 distance between two empirical distributions.
///
/// Equal sizes use the mean absolute difference of order statistics;
/// otherwise the integral of the absolute CDF difference.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    check_finite("first sample", a)?;
    check_finite("second sample", b)?;
    let (sa, sb) = (sorted(a), sorted(b));
    if sa.len() == sb.len() {
        let total: f64 = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum();
        return Ok(total / sa.len() as f64);
    }
    Ok(cdf_distance(&sa, &sb))
}

// ∫ |F_a − F_b| dx over the merged breakpoints of two sorted samples.
fn cdf_distance(sa: &[f64], sb: &[f64]) -> f64 {
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = 0.0;
    let mut prev = sa[0].min(sb[0]);
    while i < sa.len() || j < sb.len() {
        let next = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / na - j as f64 / nb).abs() * (next - prev);
        while i < sa.len() && sa[i] == next {
            i += 1;
        }
        while j < sb.len() && sb[j] == next {
            j += 1;
        }
        prev = next;
    }
    total
}

/// Nearest lattice point, ties to even. Negative or non-finite values map to
/// `None`.
pub fn to_lattice(x: f64) -> Option<u64> {
    let r = x.round_ties_even();
    (r >= 0.0 && r < u64::MAX as f64).then_some(r as u64)
}

/// Histogram over `0..=k` of samples rounded to the lattice. Values above
/// `k` and negative values are counted as overflow.
pub fn estimate_pmf(samples: &[f64], k: usize) -> EmpiricalPmf {
    EmpiricalPmf::from_samples(
        samples.iter().map(|&x| to_lattice(x).unwrap_or(u64::MAX)),
        k,
    )
}

/// Outcome of [`empirical_nll`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalNll {
    /// Mean negative log-probability of the test points, nats.
    pub nll: f64,
    /// Cells of the generated PMF that were raised to the floor.
    pub floored_cells: usize,
    /// Test points outside `0..=K`, scored at the floor.
    pub out_of_support: usize,
    pub floor: f64,
}

/// Mean negative log-probability of held-out samples under `gen_pmf`
/// (cells `0..=K`).
///
/// Cells below `floor` are raised to it and the PMF renormalized, so no test
/// point scores `−∞`. Points outside `0..=K` are scored at the floor.
pub fn empirical_nll(test: &[f64], gen_pmf: &[f64], floor: f64) -> Result<EmpiricalNll> {
    check_finite("test sample", test)?;
    if gen_pmf.is_empty() || gen_pmf.iter().any(|p| !(*p >= 0.0)) {
        return domain("generated pmf must be a non-empty non-negative vector");
    }
    if !(floor >= 0.0) {
        return domain(format!("floor must be non-negative, got {floor}"));
    }
    let mut floored_cells = 0;
    let raised: Vec<f64> = gen_pmf
        .iter()
        .map(|&p| {
            if p < floor {
                floored_cells += 1;
                floor
            } else {
                p
            }
        })
        .collect();
    let z: f64 = raised.iter().sum();
    if !(z > 0.0) {
        return domain("generated pmf has no mass");
    }
    let log_probs: Vec<f64> = raised.iter().map(|p| (p / z).ln()).collect();
    let log_floor = (floor / z).ln();
    let mut out_of_support = 0;
    let mut total = 0.0;
    for &x in test {
        match to_lattice(x).and_then(|k| log_probs.get(k as usize)) {
            Some(lp) => total -= lp,
            None => {
                out_of_support += 1;
                total -= log_floor;
            }
        }
    }
    Ok(EmpiricalNll {
        nll: total / test.len() as f64,
        floored_cells,
        out_of_support,
        floor,
    })
}

/// The default floor `1 / (N (K + 1))` for a PMF estimated from `n_gen`
/// samples over `0..=K`.
pub fn default_floor(n_gen: u64, k: usize) -> f64 {
    1.0 / (n_gen.max(1) as f64 * (k as f64 + 1.0))
}

/// Convolution with the discrete Gaussian kernel of bandwidth `h`,
/// renormalized over `0..=K`.
pub fn smooth_pmf(pmf: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return domain(format!("bandwidth must be positive, got {h}"));
    }
    if pmf.is_empty() {
        return domain("pmf is empty");
    }
    let n = pmf.len();
    let kernel: Vec<f64> = (0..n)
        .map(|d| (-(d as f64).powi(2) / (2.0 * h * h)).exp())
        .collect();
    let z = kernel[0] + 2.0 * kernel[1..].iter().sum::<f64>();
    let mut out: Vec<f64> = (0..n)
        .map(|x| {
            pmf.iter()
                .enumerate()
                .map(|(y, &p)| p * kernel[x.abs_diff(y)])
                .sum::<f64>()
                / z
        })
        .collect();
    let total: f64 = out.iter().sum();
    if !(total > 0.0) {
        return domain("pmf has no mass");
    }
    out.iter_mut().for_each(|v| *v /= total);
    Ok(out)
}

/// Cellwise mean and sample standard deviation of smoothed bootstrap PMFs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapBands {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

pub fn bootstrap_bands(
    samples: &[f64],
    b: usize,
    k: usize,
    h: f64,
    rng: &RngStream,
) -> Result<BootstrapBands> {
    check_finite("sample", samples)?;
    if b < 2 {
        return domain(format!("need at least 2 bootstrap resamples, got {b}"));
    }
    let lattice: Vec<u64> = samples
        .iter()
        .map(|&x| to_lattice(x).unwrap_or(u64::MAX))
        .collect();
    let reps: Vec<Vec<f64>> = (0..b as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.substream(i);
            let draw = (0..lattice.len()).map(|_| lattice[r.index(lattice.len())]);
            smooth_pmf(&EmpiricalPmf::from_samples(draw, k).probs(), h)
        })
        .collect::<Result<_>>()?;
    // Welford updates, exact for identical resamples
    let mut mean = vec![0.0; k + 1];
    let mut m2 = vec![0.0; k + 1];
    for (i, r) in reps.iter().enumerate() {
        for c in 0..=k {
            let d = r[c] - mean[c];
            mean[c] += d / (i + 1) as f64;
            m2[c] += d * (r[c] - mean[c]);
        }
    }
    let sd = m2.iter().map(|v| (v / (b - 1) as f64).sqrt()).collect();
    Ok(BootstrapBands { mean, sd })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// PMF support is `0..=k`.
    pub k: usize,
    pub bandwidth: f64,
    pub bootstrap: usize,
    /// Score the test set under the smoothed rather than the raw PMF.
    pub smoothed_nll: bool,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: 50,
            bandwidth: DEFAULT_BANDWIDTH,
            bootstrap: DEFAULT_BOOTSTRAP,
            smoothed_nll: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub w1: f64,
    pub nll: EmpiricalNll,
    pub pmf: EmpiricalPmf,
    pub smoothed_pmf: Vec<f64>,
    pub bootstrap: BootstrapBands,
    pub n_generated: usize,
    pub n_test: usize,
    pub config: EvalConfig,
}

/// Every metric for generated samples against a held-out test set.
pub fn evaluate(generated: &[f64], test: &[f64], config: &EvalConfig) -> Result<MetricReport> {
    let w1 = wasserstein1(generated, test)?;
    let pmf = estimate_pmf(generated, config.k);
    let smoothed_pmf = smooth_pmf(&pmf.probs(), config.bandwidth)?;
    let scored = if config.smoothed_nll {
        smoothed_pmf.clone()
    } else {
        pmf.probs()
    };
    let nll = empirical_nll(test, &scored, default_floor(pmf.n(), config.k))?;
    let bootstrap = bootstrap_bands(
        generated,
        config.bootstrap,
        config.k,
        config.bandwidth,
        &RngStream::new(config.seed, 0),
    )?;
    Ok(MetricReport {
        w1,
        nll,
        pmf,
        smoothed_pmf,
        bootstrap,
        n_generated: generated.len(),
        n_test: test.len(),
        config: config.clone(),
    })
}

impl MetricReport {
    /// Columns `cell, raw, smoothed, band_lo, band_hi`.
    pub fn pmf_csv(&self) -> String {
        let raw = self.pmf.probs();
        let mut s = String::from("cell,raw,smoothed,band_lo,band_hi\n");
        for (c, r) in raw.iter().enumerate() {
            let (m, sd) = (self.bootstrap.mean[c], self.bootstrap.sd[c]);
            s.push_str(&format!(
                "{c},{r},{},{},{}\n",
                self.smoothed_pmf[c],
                m - sd,
                m + sd
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{DistributionSpec, EntropyMode};
    use proptest::prelude::*;

    #[test]
    fn w1_examples() {
        assert_eq!(wasserstein1(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(
            wasserstein1(&[3.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap(),
            0.0
        );
        let a = [0.5, 3.0, -1.0, 7.0];
        let b: Vec<f64> = a.iter().map(|x| x + 2.5).collect();
        assert!((wasserstein1(&a, &b).unwrap() - 2.5).abs() < 1e-12);
        assert!(wasserstein1(&[], &[1.0]).is_err());
        assert!(wasserstein1(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn w1_forms_agree() {
        // {0, 1, 3} vs {1, 2}: F_a − F_b is 1/3 on [0,1), −1/6 on [1,2), 2/3 − 1 on [2,3)
        let want = 1.0 / 3.0 + 1.0 / 6.0 + 1.0 / 3.0;
        assert!((wasserstein1(&[0.0, 1.0, 3.0], &[1.0, 2.0]).unwrap() - want).abs() < 1e-12);
        let (a, b) = ([0.0, 2.0, 5.0, 1.0], [1.0, 1.0, 4.0, 3.0]);
        let sorted_form = wasserstein1(&a, &b).unwrap();
        assert!((cdf_distance(&sorted(&a), &sorted(&b)) - sorted_form).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn w1_is_a_metric(
            a in prop::collection::vec(-50.0f64..50.0, 1..20),
            b in prop::collection::vec(-50.0f64..50.0, 1..20),
            c in prop::collection::vec(-50.0f64..50.0, 1..20),
        ) {
            let ab = wasserstein1(&a, &b).unwrap();
            let ba = wasserstein1(&b, &a).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() < 1e-12);
            let bc = wasserstein1(&b, &c).unwrap();
            let ac = wasserstein1(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn w1_sorted_equals_cdf_form(a in prop::collection::vec(-20.0f64..20.0, 1..15), seed in 0u64..1000) {
            let mut r = RngStream::new(seed, 0);
            let b: Vec<f64> = a.iter().map(|_| (r.uniform() * 40.0 - 20.0).round()).collect();
            let direct = wasserstein1(&a, &b).unwrap();
            prop_assert!((cdf_distance(&sorted(&a), &sorted(&b)) - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn nll_examples() {
        let uniform = vec![1.0 / 51.0; 51];
        let r = empirical_nll(&[0.0, 7.0, 50.0], &uniform, 0.0).unwrap();
        assert!((r.nll - 51f64.ln()).abs() < 1e-12);
        let atom = [0.0, 1.0, 0.0];
        let r = empirical_nll(&[1.0, 1.0], &atom, 0.0).unwrap();
        assert_eq!(r.nll, 0.0);
        let r = empirical_nll(&[0.0], &atom, 1e-3).unwrap();
        assert_eq!(r.floored_cells, 2);
        assert!(r.nll.is_finite());
        let r = empirical_nll(&[99.0], &atom, 1e-3).unwrap();
        assert_eq!(r.out_of_support, 1);
    }

    #[test]
    fn nll_recovers_entropy() {
        let spec = DistributionSpec::preset("zip").unwrap();
        let h = spec.true_entropy(EntropyMode::RenormalizedK).unwrap();
        let big = spec.sample(2_000_000, &RngStream::new(11, 0)).unwrap();
        let pmf = estimate_pmf(&big, 50);
        let test = spec.sample(100_000, &RngStream::new(12, 0)).unwrap();
        let r = empirical_nll(&test, &pmf.probs(), default_floor(pmf.n(), 50)).unwrap();
        let lp: Vec<f64> = test
            .iter()
            .map(|&x| spec.log_pmf(x as u64).unwrap())
            .collect();
        let m = lp.iter().sum::<f64>() / lp.len() as f64;
        let sd = (lp.iter().map(|v| (v - m).powi(2)).sum::<f64>() / lp.len() as f64).sqrt();
        let se = sd / (test.len() as f64).sqrt();
        assert!(
            (r.nll - h).abs() < 3.0 * se + 1e-3,
            "{} vs {h} (se {se})",
            r.nll
        );
    }

    #[test]
    fn pmf_estimation() {
        let p = estimate_pmf(&[0.0, 0.0, 1.0], 2);
        assert_eq!(p.probs(), vec![2.0 / 3.0, 1.0 / 3.0, 0.0]);
        let p = estimate_pmf(&[0.0, 5.0, -1.0, 2.5], 2);
        assert_eq!(p.overflow(), 2);
        assert_eq!(p.counts(), &[1, 0, 1]);
        assert!((p.probs().iter().sum::<f64>() - 0.5).abs() < 1e-15);
        let zip = DistributionSpec::preset("zip")
            .unwrap()
            .with_truncation(None);
        let xs = zip.sample(1_000_000, &RngStream::new(13, 0)).unwrap();
        assert!((estimate_pmf(&xs, 50).prob(0) - 0.702).abs() < 0.002);
    }

    #[test]
    fn smoothing() {
        let p = [0.1, 0.2, 0.4, 0.2, 0.1];
        let s = smooth_pmf(&p, 1e-3).unwrap();
        for (a, b) in s.iter().zip(&p) {
            assert!((a - b).abs() < 1e-9);
        }
        let s = smooth_pmf(&p, 1.3).unwrap();
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..5 {
            assert!((s[i] - s[4 - i]).abs() < 1e-15);
        }
        assert!(smooth_pmf(&p, 0.0).is_err());
    }

    #[test]
    fn bootstrap_behaviour() {
        let flat = vec![3.0; 500];
        let b = bootstrap_bands(&flat, 10, 10, 1.0, &RngStream::new(1, 0)).unwrap();
        assert!(b.sd.iter().all(|&s| s == 0.0));
        assert!(bootstrap_bands(&flat, 1, 10, 1.0, &RngStream::new(1, 0)).is_err());

        let zip = DistributionSpec::preset("zip").unwrap();
        let small = zip.sample(1_000, &RngStream::new(2, 0)).unwrap();
        let large = zip.sample(100_000, &RngStream::new(3, 0)).unwrap();
        let bs = bootstrap_bands(&small, 10, 50, 1.0, &RngStream::new(4, 0)).unwrap();
        let bl = bootstrap_bands(&large, 10, 50, 1.0, &RngStream::new(4, 0)).unwrap();
        let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(avg(&bl.sd) < avg(&bs.sd));

        let full = smooth_pmf(&estimate_pmf(&large, 50).probs(), 1.0).unwrap();
        for c in 0..=50 {
            assert!(
                (bl.mean[c] - full[c]).abs() <= 3.0 * bl.sd[c] + 1e-12,
                "cell {c}"
            );
        }
    }

    #[test]
    fn evaluate_identical_files() {
        let xs: Vec<f64> = (0..200).map(|i| (i % 13) as f64).collect();
        let r = evaluate(&xs, &xs, &EvalConfig::default()).unwrap();
        assert_eq!(r.w1, 0.0);
        assert_eq!(r.pmf_csv().lines().count(), 52);
        let again = evaluate(&xs, &xs, &EvalConfig::default()).unwrap();
        assert_eq!(r, again);
    }
}
