//! Analytic caps on the reconstruction-loss integral outside a finite SNR
//! window.

use crate::error::{domain, Result};

/// Upper bound on `∫₀^{γ₀} mprl dγ` for `dims` independent coordinates under
/// the maximum-entropy exponential prior with the given rate: `d γ₀ / (2λ)`.
pub fn left_tail_bound(gamma0: f64, rate: f64, dims: u64) -> Result<f64> {
    if !(gamma0 > 0.0) || !(rate > 0.0) || dims == 0 {
        return domain(format!(
            "left tail bound needs positive inputs (gamma0 {gamma0}, rate {rate}, dims {dims})"
        ));
    }
    Ok(dims as f64 * gamma0 / (2.0 * rate))
}

// (1 + u) ln(1 + u) − u, the Poisson large-deviation rate function.
fn cramer_h(u: f64) -> f64 {
    (1.0 + u) * u.ln_1p() - u
}

/// Chernoff bound on the loss integral beyond `γ₁` when every coordinate
/// lies on a lattice of spacing `delta`:
///
/// `Σ_i Σ_{j=1}^{j_max} [x_i ln(x_i/(x_i − jΔ)) − jΔ] e^{−c_ij γ₁} / c_ij`
///
/// with exponent `c_ij = x_i h((j − ½)Δ / x_i)`, the large-deviation rate of
/// a Poisson count straying past the midpoint between lattice neighbours.
pub fn right_tail_bound(x: &[f64], delta: f64, gamma1: f64, j_max: u32) -> Result<f64> {
    if !(delta > 0.0) || !(gamma1 > 0.0) {
        return domain(format!(
            "right tail bound needs delta, gamma1 > 0 (got {delta}, {gamma1})"
        ));
    }
    if j_max == 0 {
        return Ok(0.0);
    }
    let reach = j_max as f64 * delta;
    if let Some(bad) = x.iter().find(|&&xi| !(xi - reach > 0.0)) {
        return domain(format!(
            "lattice step too large: x = {bad} but j_max·delta = {reach}"
        ));
    }
    let mut total = 0.0;
    for &xi in x {
        for j in 1..=j_max {
            let shift = j as f64 * delta;
            let gap = xi * (xi / (xi - shift)).ln() - shift;
            let c = xi * cramer_h((j as f64 - 0.5) * delta / xi);
            total += gap * (-c * gamma1).exp() / c;
        }
    }
    Ok(total)
}
