//! The four noise/loss combinations trained on the same data, scored by
//! sample W1 against held-out data.

use poisson_diffusion::channel::NoiseKind;
use poisson_diffusion::denoiser::{ArchSpec, Denoiser};
use poisson_diffusion::math::RngStream;
use poisson_diffusion::metrics::wasserstein1;
use poisson_diffusion::sampler::{
    default_alpha_window, gaussian_reverse_sample, make_schedule, reverse_sample,
    LinearBetaSchedule, ReverseUpdate,
};
use poisson_diffusion::synthetic::DistributionSpec;
use poisson_diffusion::trainer::{cross_train, TrainConfig};

fn main() -> poisson_diffusion::Result<()> {
    let spec = DistributionSpec::preset("nbinommix")?;
    let data = spec.sample(3000, &RngStream::new(1, 0))?;
    let test = spec.sample(3000, &RngStream::new(2, 0))?;
    let base = TrainConfig {
        epochs: 15,
        arch: ArchSpec {
            hidden_dim: 32,
            embed_dim: 16,
            ..ArchSpec::default()
        },
        ..TrainConfig::default()
    };
    for out in cross_train(&base, &data)? {
        let model = &out.model;
        let samples = match model.noise() {
            NoiseKind::Poisson => {
                let (loc, scale) = out.config.snr_logistic();
                let (lo, hi) = default_alpha_window(loc, scale);
                reverse_sample(
                    model,
                    &make_schedule(100, lo, hi)?,
                    ReverseUpdate::default(),
                    3000,
                    &RngStream::new(3, 0),
                )?
            }
            NoiseKind::Gaussian => gaussian_reverse_sample(
                model,
                &LinearBetaSchedule::default(),
                3000,
                &RngStream::new(3, 0),
            )?,
        };
        let rounded: Vec<f64> = samples.rounded.iter().map(|&v| v as f64).collect();
        println!(
            "{:?} noise + {:?} loss: final loss {:.4}, W1 {:.3}",
            model.noise(),
            model.loss,
            out.history.last().copied().unwrap_or(f64::NAN),
            wasserstein1(&rounded, &test)?
        );
    }
    Ok(())
}
