use serde::{Deserialize, Serialize};

use super::{Denoiser, DenoiserParams};
use crate::channel::{NoiseKind, SnrPoint};
use crate::error::{Error, Result};
use crate::math::LossKind;

/// Affine map from data units to the units the network works in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataTransform {
    /// `x / scale`
    Scale { scale: f64 },
    /// `(x − mean) / sd`
    Standardize { mean: f64, sd: f64 },
    /// `1 + x / scale`, keeping a non-negative signal inside [1, 2]
    UnitShift { scale: f64 },
}

impl DataTransform {
    pub fn forward(&self, x: f64) -> f64 {
        match *self {
            DataTransform::Scale { scale } => x / scale,
            DataTransform::Standardize { mean, sd } => (x - mean) / sd,
            DataTransform::UnitShift { scale } => 1.0 + x / scale,
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            DataTransform::Scale { scale } => y * scale,
            DataTransform::Standardize { mean, sd } => mean + y * sd,
            DataTransform::UnitShift { scale } => (y - 1.0) * scale,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DataTransform::Scale { scale } | DataTransform::UnitShift { scale } => {
                scale > 0.0 && scale.is_finite()
            }
            DataTransform::Standardize { mean, sd } => {
                mean.is_finite() && sd > 0.0 && sd.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid data transform {self:?}")))
        }
    }
}

/// A trained network together with everything needed to apply it to raw
/// observations.
///
/// With a `Scale` transform a Poisson model observes raw counts, sees
/// `z / (1 + γ)` passed through the transform and predicts the transformed
/// clean value. With `UnitShift` the Poisson channel itself acts on the
/// shifted data in [1, 2] and the network sees `z / (1 + γ)` directly.
/// Gaussian models act on transformed data; the network sees `z / √(1 + γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub params: DenoiserParams,
    pub noise: NoiseKind,
    pub loss: LossKind,
    pub transform: DataTransform,
    pub eps_shift: f64,
    /// Log-SNR range seen in training. Outside it the network is evaluated
    /// at the nearest edge.
    pub alpha_range: Option<[f64; 2]>,
}

const EVAL_CHUNK: usize = 4096;

impl TrainedModel {
    pub fn new(
        params: DenoiserParams,
        noise: NoiseKind,
        loss: LossKind,
        transform: DataTransform,
        eps_shift: f64,
    ) -> Result<Self> {
        transform.validate()?;
        if noise == NoiseKind::Poisson && matches!(transform, DataTransform::Standardize { .. }) {
            return Err(Error::Config(
                "poisson models need a non-negative (scale or unit_shift) transform".into(),
            ));
        }
        Ok(Self {
            params,
            noise,
            loss,
            transform,
            eps_shift,
            alpha_range: None,
        })
    }

    pub fn with_alpha_range(mut self, range: Option<[f64; 2]>) -> Result<Self> {
        if let Some([lo, hi]) = range {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("invalid log-snr range [{lo}, {hi}]")));
            }
        }
        self.alpha_range = range;
        Ok(self)
    }

    /// The log-SNR handed to the network.
    pub fn network_alpha(&self, alpha: f64) -> f64 {
        match self.alpha_range {
            Some([lo, hi]) => alpha.clamp(lo, hi),
            None => alpha,
        }
    }

    /// Whether the Poisson channel acts on transformed data rather than raw
    /// counts.
    fn poisson_in_channel_space(&self) -> bool {
        matches!(self.transform, DataTransform::UnitShift { .. })
    }

    /// Network input for a batch of channel observations.
    pub fn network_input(&self, obs: &[f64], snr: SnrPoint) -> Vec<f64> {
        match self.noise {
            NoiseKind::Poisson => {
                let s = 1.0 / (1.0 + snr.gamma);
                if self.poisson_in_channel_space() {
                    obs.iter().map(|&z| z * s).collect()
                } else {
                    obs.iter().map(|&z| self.transform.forward(z * s)).collect()
                }
            }
            NoiseKind::Gaussian => {
                let s = 1.0 / (1.0 + snr.gamma).sqrt();
                obs.iter().map(|&z| z * s).collect()
            }
        }
    }
}

impl Denoiser for TrainedModel {
    fn noise(&self) -> NoiseKind {
        self.noise
    }

    fn denoise(&self, obs: &[f64], snr: SnrPoint) -> Result<Vec<f64>> {
        let d = self.params.arch().input_dim;
        if obs.len() % d != 0 {
            return Err(Error::Shape(format!(
                "{} observations do not fill rows of width {d}",
                obs.len()
            )));
        }
        let input = self.network_input(obs, snr);
        let mut out = Vec::with_capacity(obs.len());
        for chunk in input.chunks(EVAL_CHUNK * d) {
            let alpha = vec![self.network_alpha(snr.alpha); chunk.len() / d];
            out.extend(self.params.forward(chunk, &alpha)?);
        }
        if self.noise == NoiseKind::Poisson && !self.poisson_in_channel_space() {
            for v in &mut out {
                *v = self.transform.inverse(*v);
            }
        }
        Ok(out)
    }

    fn to_channel(&self, x: f64) -> f64 {
        if self.noise == NoiseKind::Poisson && !self.poisson_in_channel_space() {
            x
        } else {
            self.transform.forward(x)
        }
    }

    fn from_channel(&self, x: f64) -> f64 {
        if self.noise == NoiseKind::Poisson && !self.poisson_in_channel_space() {
            x
        } else {
            self.transform.inverse(x)
        }
    }
}
