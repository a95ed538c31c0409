//! Training the Poisson denoiser with the reconstruction loss, saving a
//! checkpoint and resuming from it.

use poisson_diffusion::channel::NoiseKind;
use poisson_diffusion::denoiser::{load_checkpoint, save_checkpoint, ArchSpec};
use poisson_diffusion::math::{LossKind, RngStream};
use poisson_diffusion::synthetic::DistributionSpec;
use poisson_diffusion::trainer::{TrainConfig, Trainer};

fn main() -> poisson_diffusion::Result<()> {
    let data = DistributionSpec::preset("zip")?.sample(4000, &RngStream::new(1, 0))?;
    let config = TrainConfig {
        epochs: 20,
        arch: ArchSpec {
            hidden_dim: 32,
            embed_dim: 16,
            ..TrainConfig::for_variant(NoiseKind::Poisson, LossKind::Prl).arch
        },
        ..TrainConfig::for_variant(NoiseKind::Poisson, LossKind::Prl)
    };
    let mut trainer = Trainer::new(&config, &data)?;
    for _ in 0..10 {
        let loss = trainer.run_epoch()?;
        println!(
            "epoch {:>2}: mean weighted loss {loss:.5}",
            trainer.epochs_done()
        );
    }
    let dir = std::env::temp_dir().join("pdiff-train-example");
    std::fs::create_dir_all(&dir).map_err(|e| poisson_diffusion::Error::Config(e.to_string()))?;
    let path = dir.join("half.ckpt");
    save_checkpoint(&path, &trainer.checkpoint())?;

    let mut resumed = Trainer::resume(&config, &data, load_checkpoint(&path)?)?;
    resumed.run()?;
    let h = resumed.history();
    println!(
        "resumed to epoch {}: last loss {:.5}",
        resumed.epochs_done(),
        h[h.len() - 1]
    );
    println!("checkpoint written to {}", path.display());
    Ok(())
}
