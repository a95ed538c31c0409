//! Corrupting counts with the Poisson channel and the Gaussian channel at
//! a range of log-SNR values.

use poisson_diffusion::channel::{
    corrupt_gaussian, corrupt_poisson, normalize_observation, SnrPoint,
};
use poisson_diffusion::math::RngStream;

fn main() -> poisson_diffusion::Result<()> {
    let x = [0.0, 1.0, 5.0, 20.0];
    let mut rng = RngStream::new(1, 0);
    for alpha in [-2.0, 0.0, 3.0, 8.0] {
        let snr = SnrPoint::from_alpha(alpha);
        let z = corrupt_poisson(&x, snr.gamma, 0.0, &mut rng)?;
        let scaled: Vec<f64> = z.iter().map(|&c| c as f64 / snr.gamma).collect();
        println!(
            "α = {alpha:>4}: counts {z:?}, z/γ {:.2?}, z/(1+γ) {:.2?}",
            scaled,
            normalize_observation(&z, snr.gamma)
        );
    }
    let y = corrupt_gaussian(&x, 4.0, &mut rng)?;
    println!("gaussian channel at γ = 4: {y:.3?}");
    Ok(())
}
