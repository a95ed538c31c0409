//! Half the integrated MMSE of an equiprobable ±1 source through the
//! Gaussian channel equals its entropy, ln 2.

use poisson_diffusion::denoiser::BinaryTanhDenoiser;
use poisson_diffusion::likelihood::{estimate_nll_gaussian, QuadratureScheme, QuadratureSpec};
use poisson_diffusion::math::RngStream;

fn main() -> poisson_diffusion::Result<()> {
    for draws in [250, 1000, 4000] {
        let quad = QuadratureSpec {
            scheme: QuadratureScheme::UniformGrid,
            n_points: 600,
            alpha_lo: -12.0,
            alpha_hi: 6.0,
            mc_draws_per_node: draws,
            ..QuadratureSpec::default()
        };
        let r = estimate_nll_gaussian(
            &BinaryTanhDenoiser,
            &[-1.0, 1.0],
            &quad,
            &RngStream::new(1, 0),
        )?;
        println!(
            "{draws:>5} draws/node: {:.5} (ln 2 = {:.5})",
            r.total,
            std::f64::consts::LN_2
        );
    }
    Ok(())
}
