//! The Poisson reconstruction loss family.
//!
//! `l0(x) = x ln x − x + 1` is the convex conjugate of the Poisson log-MGF
//! `e^t − 1`, and the reconstruction loss `prl(x, x̂) = x ln(x/x̂) − x + x̂` is
//! the Bregman divergence it generates. Both use the convention `0 ln 0 = 0`.

use crate::error::{domain, Result};

/// `x ln x − x + 1`, extended to `l0(0) = 1`.
pub fn l0(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return domain(format!("l0 requires x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(x * x.ln() - x + 1.0)
}

/// Poisson reconstruction loss `x ln(x/x̂) − x + x̂`.
///
/// The loss grows without bound as `x̂ → 0⁺` for any `x > 0`, so a
/// non-positive estimate is rejected.
pub fn prl(x: f64, xhat: f64) -> Result<f64> {
    if !(xhat > 0.0) {
        return domain(format!("prl requires xhat > 0, got {xhat}"));
    }
    if !(x >= 0.0) {
        return domain(format!("prl requires x >= 0, got {x}"));
    }
    Ok(prl_unchecked(x, xhat))
}

/// [`prl`] without argument validation, for inner loops whose inputs are
/// positive by construction.
#[inline]
pub fn prl_unchecked(x: f64, xhat: f64) -> f64 {
    if x == 0.0 {
        xhat
    } else {
        x * (x / xhat).ln() - x + xhat
    }
}

/// ∂prl/∂x̂ = 1 − x/x̂.
#[inline]
pub fn prl_grad_xhat(x: f64, xhat: f64) -> f64 {
    1.0 - x / xhat
}

#[inline]
pub fn squared_error(x: f64, xhat: f64) -> f64 {
    let d = x - xhat;
    d * d
}

/// Loss selector shared by training and likelihood estimation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Prl,
    Mse,
}

impl LossKind {
    #[inline]
    pub fn value(self, x: f64, xhat: f64) -> f64 {
        match self {
            LossKind::Prl => prl_unchecked(x, xhat),
            LossKind::Mse => squared_error(x, xhat),
        }
    }

    /// Derivative with respect to the estimate.
    #[inline]
    pub fn grad(self, x: f64, xhat: f64) -> f64 {
        match self {
            LossKind::Prl => prl_grad_xhat(x, xhat),
            LossKind::Mse => 2.0 * (xhat - x),
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "prl" => Ok(LossKind::Prl),
            "mse" => Ok(LossKind::Mse),
            other => Err(format!("unknown loss '{other}' (expected prl or mse)")),
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossKind::Prl => "prl",
            LossKind::Mse => "mse",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rng::RngStream;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn l0_values() {
        assert_eq!(l0(1.0).unwrap(), 0.0);
        assert_eq!(l0(0.0).unwrap(), 1.0);
        assert!((l0(2.0).unwrap() - (2.0 * LN2 - 1.0)).abs() < 1e-15);
        assert!(l0(-0.5).is_err());
    }

    #[test]
    fn prl_values() {
        assert_eq!(prl(1.0, 1.0).unwrap(), 0.0);
        assert!((prl(2.0, 1.0).unwrap() - 0.386_294_361_119_890_6).abs() < 1e-15);
        assert!((prl(6.0, 3.0).unwrap() - 1.158_883_083_359_671_9).abs() < 1e-14);
        assert_eq!(prl(0.0, 2.5).unwrap(), 2.5);
        assert!(prl(1.0, 0.0).is_err());
        assert!(prl(1.0, -1.0).is_err());
    }

    #[test]
    fn prl_is_scaled_l0() {
        for (x, xh) in [(0.3, 2.0), (5.0, 1.5), (1e-3, 7.0)] {
            let lhs = prl(x, xh).unwrap();
            let rhs = xh * l0(x / xh).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn squared_error_values() {
        assert_eq!(squared_error(3.0, 3.0), 0.0);
        assert_eq!(squared_error(3.0, 1.0), 4.0);
        assert_eq!(squared_error(-1.0, 1.0), 4.0);
    }

    #[test]
    fn loss_gradients_match_finite_differences() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..100 {
            let x = 5.0 * rng.uniform();
            let xh = 0.1 + 5.0 * rng.uniform();
            let h = 1e-6;
            for kind in [LossKind::Prl, LossKind::Mse] {
                let fd = (kind.value(x, xh + h) - kind.value(x, xh - h)) / (2.0 * h);
                assert!((fd - kind.grad(x, xh)).abs() < 1e-6);
            }
        }
        assert_eq!(prl_grad_xhat(2.0, 1.0), -1.0);
    }

    #[test]
    fn loss_kind_parse() {
        assert_eq!("PRL".parse::<LossKind>().unwrap(), LossKind::Prl);
        assert!("l1".parse::<LossKind>().is_err());
    }
}
