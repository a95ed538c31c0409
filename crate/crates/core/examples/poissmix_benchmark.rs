//! Poisson diffusion against the Gaussian baseline on PoissMix, scored by
//! sample W1. Usage: `poissmix_benchmark [epochs] [n_train] [ema_decay]`
//! (defaults 20, 50000, none).

use poisson_diffusion::channel::NoiseKind;
use poisson_diffusion::math::{LossKind, RngStream};
use poisson_diffusion::metrics::wasserstein1;
use poisson_diffusion::sampler::{
    default_alpha_window, gaussian_reverse_sample, make_schedule, reverse_sample,
    LinearBetaSchedule, ReverseUpdate,
};
use poisson_diffusion::synthetic::DistributionSpec;
use poisson_diffusion::trainer::{train, TrainConfig};
use std::time::Instant;

fn main() -> poisson_diffusion::Result<()> {
    let arg = |i: usize| std::env::args().nth(i);
    let epochs = arg(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let n_train = arg(2).and_then(|s| s.parse().ok()).unwrap_or(50_000);
    let ema_decay = arg(3).and_then(|s| s.parse().ok());
    let spec = DistributionSpec::preset("poissmix")?;
    let train_x = spec.sample(n_train, &RngStream::new(80, 0))?;
    let test = spec.sample(50_000, &RngStream::new(81, 0))?;
    for (noise, loss) in [
        (NoiseKind::Poisson, LossKind::Prl),
        (NoiseKind::Gaussian, LossKind::Mse),
    ] {
        let config = TrainConfig {
            epochs,
            ema_decay,
            seed: 8,
            ..TrainConfig::for_variant(noise, loss)
        };
        let t = Instant::now();
        let out = train(&config, &train_x)?;
        let samples = match noise {
            NoiseKind::Poisson => {
                let (loc, scale) = out.config.snr_logistic();
                let (lo, hi) = default_alpha_window(loc, scale);
                let schedule = make_schedule(100, lo, hi)?;
                reverse_sample(
                    &out.model,
                    &schedule,
                    ReverseUpdate::default(),
                    50_000,
                    &RngStream::new(82, 0),
                )?
            }
            NoiseKind::Gaussian => gaussian_reverse_sample(
                &out.model,
                &LinearBetaSchedule::default(),
                50_000,
                &RngStream::new(83, 0),
            )?,
        };
        let rounded: Vec<f64> = samples.rounded.iter().map(|&v| v as f64).collect();
        println!(
            "{noise:?} + {loss:?}: W1 {:.3} after {epochs} epochs ({:.0}s)",
            wasserstein1(&rounded, &test)?,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
