//! The learned denoiser and the interface every denoiser (learned or exact)
//! exposes to the sampler and the likelihood estimator.

mod adam;
mod checkpoint;
mod linalg;
mod mlp;
mod model;
mod stubs;

pub use adam::{adam_step, AdamState};
pub use checkpoint::{
    load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use mlp::{
    sinusoidal_features, ArchSpec, DenoiserParams, OutputActivation, Tape, SOFTPLUS_FLOOR,
};
pub use model::{DataTransform, TrainedModel};
pub use stubs::{BinaryTanhDenoiser, ConstantDenoiser, PosteriorMeanDenoiser};

use crate::channel::{NoiseKind, SnrPoint};
use crate::error::Result;

/// An estimator of the clean signal from a noisy observation at known SNR.
///
/// Observations and estimates live in the channel space: raw counts and
/// data units for the Poisson channel, and the (possibly standardized)
/// space the Gaussian channel acts on otherwise. [`Denoiser::to_channel`]
/// and [`Denoiser::from_channel`] map between data and channel space.
pub trait Denoiser: Sync {
    fn noise(&self) -> NoiseKind;

    /// One estimate per observation, all at the same SNR.
    fn denoise(&self, obs: &[f64], snr: SnrPoint) -> Result<Vec<f64>>;

    fn to_channel(&self, x: f64) -> f64 {
        x
    }

    fn from_channel(&self, x: f64) -> f64 {
        x
    }
}

impl<D: Denoiser + ?Sized> Denoiser for &D {
    fn noise(&self) -> NoiseKind {
        (**self).noise()
    }
    fn denoise(&self, obs: &[f64], snr: SnrPoint) -> Result<Vec<f64>> {
        (**self).denoise(obs, snr)
    }
    fn to_channel(&self, x: f64) -> f64 {
        (**self).to_channel(x)
    }
    fn from_channel(&self, x: f64) -> f64 {
        (**self).from_channel(x)
    }
}
