//! Closed-form and brute-force oracles: posterior means, the
//! Turing-Good-Robbins estimate, MPRL and mutual information.

use poisson_diffusion::oracle::{
    exp_prior_marginal_pmf, exp_prior_mprl_series, finite_posterior_mean, gamma_posterior_mean,
    marginal_mprl, mutual_information_derivative, mutual_information_finite, tgr_estimate,
    ExactMarginal, FinitePrior, GammaPrior, Prior,
};

fn main() -> poisson_diffusion::Result<()> {
    let (rate, gamma) = (1.0, 2.0);
    let exp_prior = GammaPrior::exponential(rate)?;
    let marginal = ExactMarginal(move |z| exp_prior_marginal_pmf(rate, gamma, z));
    println!("Exp(1) prior at γ = 2: posterior mean vs TGR estimate");
    for z in 0..5u64 {
        println!(
            "  z = {z}: {:.6} vs {:.6}",
            gamma_posterior_mean(&exp_prior, gamma, z),
            tgr_estimate(&marginal, gamma, z)?
        );
    }
    println!(
        "exponential-prior MPRL at γ = 1: {:.6}",
        exp_prior_mprl_series(1.0, 1.0)?
    );

    let two_point = FinitePrior::uniform(vec![1.0, 2.0])?;
    let prior = Prior::Finite(two_point.clone());
    println!("uniform{{1,2}} prior:");
    for g in [0.5, 1.0, 2.0] {
        println!(
            "  γ = {g}: E[X|Z=0] {:.4}, I {:.6}, dI/dγ {:.6}, mprl {:.6}",
            finite_posterior_mean(&two_point, g, 0)?,
            mutual_information_finite(&two_point, g)?,
            mutual_information_derivative(&two_point, g)?,
            marginal_mprl(&prior, g)?
        );
    }
    Ok(())
}
