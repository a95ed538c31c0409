//! The likelihood of a two-point source recovered by integrating the loss
//! of the exact posterior-mean denoiser over log-SNR.

use poisson_diffusion::denoiser::PosteriorMeanDenoiser;
use poisson_diffusion::likelihood::{estimate_nll_poisson, QuadratureScheme, QuadratureSpec};
use poisson_diffusion::math::RngStream;
use poisson_diffusion::oracle::FinitePrior;

fn main() -> poisson_diffusion::Result<()> {
    let d = PosteriorMeanDenoiser::new(FinitePrior::uniform(vec![1.0, 2.0])?);
    let data: Vec<f64> = (0..2048).map(|i| 1.0 + (i % 2) as f64).collect();
    for scheme in [
        QuadratureScheme::LogisticImportance,
        QuadratureScheme::UniformGrid,
    ] {
        let quad = QuadratureSpec {
            scheme,
            ..QuadratureSpec::default()
        };
        let r = estimate_nll_poisson(&d, &data, &quad, &RngStream::new(0, 0))?;
        println!(
            "{scheme:?}: nll {:.5} nats (diffusion {:.5}, tails {:.1e} + {:.1e}); ln 2 = {:.5}",
            r.total,
            r.diffusion_term,
            r.left_tail,
            r.right_tail,
            std::f64::consts::LN_2
        );
    }
    Ok(())
}
