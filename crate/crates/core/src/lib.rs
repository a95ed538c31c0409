pub mod channel;
pub mod cli;
pub mod denoiser;
pub mod error;
pub mod likelihood;
pub mod math;
pub mod metrics;
pub mod oracle;
pub mod sampler;
pub mod synthetic;
pub mod trainer;
pub mod validate;

pub use error::{Error, Result};
