#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Significance level shared by every goodness-of-fit test.
pub const ALPHA: f64 = 1e-4;

/// Asymptotic Kolmogorov critical value for `D·√n` at [`ALPHA`].
pub fn ks_critical() -> f64 {
    (-(ALPHA / 2.0).ln() / 2.0).sqrt()
}

/// Pearson χ² statistic of `counts` against `probs`, pooling adjacent cells
/// until every expected count is at least 5. Returns the statistic and its
/// degrees of freedom.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> (f64, usize) {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        o += c as f64;
        e += p * n;
        if e >= 5.0 {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    // leftover mass joins the last cell, including anything beyond `probs`
    let rest = n - cells.iter().map(|c| c.1).sum::<f64>();
    let observed_rest = n - cells.iter().map(|c| c.0).sum::<f64>();
    if let Some(last) = cells.last_mut() {
        last.0 += observed_rest;
        last.1 += rest;
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    (stat, cells.len().saturating_sub(1))
}

/// Upper [`ALPHA`] quantile of χ² with `df` degrees of freedom.
pub fn chi_square_critical(df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - ALPHA)
}

/// Asserts a sample of counts fits `probs` at level [`ALPHA`].
pub fn assert_fits(label: &str, samples: impl IntoIterator<Item = u64>, probs: &[f64]) {
    let mut counts = vec![0u64; probs.len()];
    let mut beyond = 0u64;
    for s in samples {
        match counts.get_mut(s as usize) {
            Some(c) => *c += 1,
            None => beyond += 1,
        }
    }
    let tail = 1.0 - probs.iter().sum::<f64>();
    let mut counts = counts;
    let mut probs = probs.to_vec();
    counts.push(beyond);
    probs.push(tail.max(0.0));
    let (stat, df) = chi_square(&counts, &probs);
    let crit = chi_square_critical(df);
    assert!(
        stat < crit,
        "{label}: χ² = {stat:.2} on {df} df exceeds {crit:.2}"
    );
}

/// Kolmogorov-Smirnov `D·√n` of a sample against a CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d * n.sqrt()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}
