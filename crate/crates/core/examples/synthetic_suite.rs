//! The benchmark distributions: samples, entropies and densities.

use poisson_diffusion::math::RngStream;
use poisson_diffusion::synthetic::{
    DistributionSpec, EntropyMode, CONTINUOUS_PRESETS, DISCRETE_PRESETS,
};

fn main() -> poisson_diffusion::Result<()> {
    println!("discrete presets:");
    for name in DISCRETE_PRESETS {
        let spec = DistributionSpec::preset(name)?;
        let xs = spec.sample(10_000, &RngStream::new(1, 0))?;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let mode = if spec.truncation.is_some() {
            EntropyMode::RenormalizedK
        } else {
            EntropyMode::Untruncated
        };
        println!(
            "  {name:<10} cap {:?}, entropy {:.4} nats, sample mean {mean:.2}",
            spec.truncation,
            spec.true_entropy(mode)?
        );
    }
    println!("continuous presets:");
    for name in CONTINUOUS_PRESETS {
        let spec = DistributionSpec::preset(name)?;
        let xs = spec.sample(10_000, &RngStream::new(2, 0))?;
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        println!(
            "  {name:<10} median {:.3}, pdf(0.5) {:.4}",
            sorted[sorted.len() / 2],
            spec.pdf(0.5)?
        );
    }
    Ok(())
}
