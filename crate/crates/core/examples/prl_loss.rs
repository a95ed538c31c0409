//! The Poisson reconstruction loss, its convex conjugate and the Bregman
//! decomposition that makes the posterior mean its minimizer.

use poisson_diffusion::math::{l0, prl};

fn main() -> poisson_diffusion::Result<()> {
    println!("prl(x, x̂) for x = 4:");
    for xhat in [0.5, 2.0, 4.0, 8.0] {
        println!("  x̂ = {xhat:>4}: {:.6}", prl(4.0, xhat)?);
    }
    println!("prl(0, x̂) = x̂: prl(0, 1.5) = {}", prl(0.0, 1.5)?);

    // l0(x) = sup_t {x t − (e^t − 1)} is attained at t = ln x
    let x: f64 = 3.0;
    let t = x.ln();
    println!(
        "l0({x}) = {:.6}, x·ln x − (x − 1) = {:.6}",
        l0(x)?,
        x * t - (t.exp() - 1.0)
    );

    // E l(X, x̂) = E l(X, E X) + l(E X, x̂) for X uniform on {1, 5}
    let xs = [1.0, 5.0];
    let mean = 3.0;
    for xhat in [2.0, 3.0, 4.5] {
        let lhs = xs
            .iter()
            .map(|&x| prl(x, xhat))
            .sum::<poisson_diffusion::Result<f64>>()?
            / 2.0;
        let at_mean = xs
            .iter()
            .map(|&x| prl(x, mean))
            .sum::<poisson_diffusion::Result<f64>>()?
            / 2.0;
        println!(
            "x̂ = {xhat}: expected loss {lhs:.6} = {at_mean:.6} + {:.6}",
            prl(mean, xhat)?
        );
    }
    Ok(())
}
