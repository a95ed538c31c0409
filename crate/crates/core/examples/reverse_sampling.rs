//! Reverse generation from zero counts with the exact posterior mean of an
//! Exp(1) prior, compared against fresh prior draws.

use poisson_diffusion::denoiser::PosteriorMeanDenoiser;
use poisson_diffusion::math::RngStream;
use poisson_diffusion::metrics::wasserstein1;
use poisson_diffusion::oracle::GammaPrior;
use poisson_diffusion::sampler::{make_schedule, reverse_sample, ReverseUpdate};

fn main() -> poisson_diffusion::Result<()> {
    let prior = GammaPrior::exponential(1.0)?;
    let d = PosteriorMeanDenoiser::new(prior);
    let schedule = make_schedule(100, -10.0, 8.0)?;
    let n = 20_000;
    let mut rng = RngStream::new(5, 0);
    let reference: Vec<f64> = (0..n)
        .map(|_| prior.sample(&mut rng).round_ties_even())
        .collect();
    for update in [
        ReverseUpdate::Resample,
        ReverseUpdate::Thicken,
        ReverseUpdate::CorrectedThicken,
    ] {
        let s = reverse_sample(&d, &schedule, update, n, &RngStream::new(6, 0))?;
        let rounded: Vec<f64> = s.rounded.iter().map(|&v| v as f64).collect();
        let mean = s.values.iter().sum::<f64>() / n as f64;
        println!(
            "{update:?}: mean {mean:.3}, W1 to Exp(1) {:.4}",
            wasserstein1(&rounded, &reference)?
        );
    }
    Ok(())
}
