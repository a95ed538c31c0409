//! Likelihood bound of a trained Poisson model on held-out counts, by both
//! quadrature schemes, next to the true entropy.

use poisson_diffusion::channel::NoiseKind;
use poisson_diffusion::likelihood::{estimate_nll, QuadratureScheme, QuadratureSpec};
use poisson_diffusion::math::{LossKind, RngStream};
use poisson_diffusion::synthetic::{DistributionSpec, EntropyMode};
use poisson_diffusion::trainer::{train, TrainConfig};

fn main() -> poisson_diffusion::Result<()> {
    let spec = DistributionSpec::preset("zip")?;
    let data = spec.sample(5000, &RngStream::new(1, 0))?;
    let test = spec.sample(500, &RngStream::new(2, 0))?;
    let config = TrainConfig {
        epochs: 30,
        ..TrainConfig::for_variant(NoiseKind::Poisson, LossKind::Prl)
    };
    let model = train(&config, &data)?.model;
    for scheme in [
        QuadratureScheme::LogisticImportance,
        QuadratureScheme::UniformGrid,
    ] {
        let quad = QuadratureSpec {
            scheme,
            ..QuadratureSpec::for_model(&model)
        };
        let r = estimate_nll(&model, &test, &quad, &RngStream::new(3, 0))?;
        println!(
            "{scheme:?}: nll bound {:.4} nats (diffusion {:.4})",
            r.total, r.diffusion_term
        );
    }
    println!(
        "true entropy {:.4} nats",
        spec.true_entropy(EntropyMode::RenormalizedK)?
    );
    Ok(())
}
