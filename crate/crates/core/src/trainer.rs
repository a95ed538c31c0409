//! Denoiser training: one logistic log-SNR draw per mini-batch, fresh channel
//! corruption, an importance-weighted loss and an Adam step.
//!
//! Randomness is split by purpose: parameter initialization uses substream 0
//! of the run seed and epoch `e` uses substream `e + 1`, so a run resumed at an
//! epoch boundary retraces the uninterrupted trajectory exactly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{NoiseKind, DEFAULT_EPS_SHIFT};
use crate::denoiser::{
    adam_step, AdamState, ArchSpec, Checkpoint, DataTransform, DenoiserParams, OutputActivation,
    TrainedModel,
};
use crate::error::{domain, Error, Result};
use crate::math::dist::poisson_unchecked;
use crate::math::{logistic_cdf, logistic_pdf, logistic_quantile, LossKind, RngStream};
use crate::sampler::default_alpha_window;

/// Importance weight applied to the loss at a sampled log-SNR.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `1 / q(α)`
    #[default]
    InvQ,
    /// `e^α / q(α)`, the weighting of the likelihood integral
    EaOverQ,
    /// No reweighting: the expected loss under the proposal itself.
    Unit,
}

impl WeightMode {
    pub fn weight(self, alpha: f64, proposal: &SnrProposal) -> f64 {
        let q = proposal.density(alpha);
        match self {
            WeightMode::InvQ => 1.0 / q,
            WeightMode::EaOverQ => alpha.exp() / q,
            WeightMode::Unit => 1.0,
        }
    }
}

/// Logistic log-SNR proposal truncated to `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrProposal {
    pub loc: f64,
    pub scale: f64,
    pub lo: f64,
    pub hi: f64,
    f_lo: f64,
    mass: f64,
}

impl SnrProposal {
    pub fn new(loc: f64, scale: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(scale > 0.0) || !loc.is_finite() || !(lo < hi) {
            return Err(Error::Config(format!(
                "invalid log-snr proposal: loc {loc}, scale {scale}, window [{lo}, {hi}]"
            )));
        }
        let f_lo = logistic_cdf(lo, loc, scale);
        let mass = logistic_cdf(hi, loc, scale) - f_lo;
        if !(mass > 0.0) {
            return Err(Error::Config(format!(
                "logistic({loc}, {scale}) has no mass on [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            loc,
            scale,
            lo,
            hi,
            f_lo,
            mass,
        })
    }

    pub fn density(&self, alpha: f64) -> f64 {
        if alpha < self.lo || alpha > self.hi {
            return 0.0;
        }
        logistic_pdf(alpha, self.loc, self.scale) / self.mass
    }

    /// Inverse-CDF draw.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u =
            (self.f_lo + self.mass * rng.uniform()).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
        logistic_quantile(u, self.loc, self.scale)
            .expect("u in (0, 1) and scale > 0")
            .clamp(self.lo, self.hi)
    }
}

pub const DEFAULT_EMA_DECAY: f64 = 0.999;

/// Where the Poisson channel acts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoissonNorm {
    /// On raw counts; the network sees scaled observations.
    #[default]
    Scale,
    /// On data shifted into [1, 2].
    UnitShift,
}

/// Default `(loc, scale)` of the training log-SNR logistic.
pub fn default_snr_logistic(noise: NoiseKind) -> (f64, f64) {
    match noise {
        NoiseKind::Poisson => (-1.0, 5.0),
        NoiseKind::Gaussian => (6.0, 3.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub noise: NoiseKind,
    pub loss: LossKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Logistic location; the channel default when absent.
    pub snr_loc: Option<f64>,
    /// Logistic scale; the channel default when absent.
    pub snr_scale: Option<f64>,
    /// Log-SNR window `[lo, hi]` the logistic is truncated to;
    /// `loc ± 2 scale` when absent.
    pub snr_window: Option<[f64; 2]>,
    pub weight_mode: WeightMode,
    pub seed: u64,
    pub eps_shift: f64,
    /// Data scale `K` of the input transform; the data maximum when absent.
    pub data_scale: Option<f64>,
    pub poisson_norm: PoissonNorm,
    /// Decay of the parameter moving average that becomes the exported
    /// model; `None` exports the last iterate.
    pub ema_decay: Option<f64>,
    pub arch: ArchSpec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            noise: NoiseKind::Poisson,
            loss: LossKind::Prl,
            epochs: 200,
            batch_size: 128,
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            snr_loc: None,
            snr_scale: None,
            snr_window: None,
            weight_mode: WeightMode::InvQ,
            seed: 0,
            eps_shift: DEFAULT_EPS_SHIFT,
            data_scale: None,
            poisson_norm: PoissonNorm::Scale,
            ema_decay: None,
            arch: ArchSpec::default(),
        }
    }
}

impl TrainConfig {
    /// Defaults for a given channel and loss, with the output head matched to
    /// the loss: identity for Gaussian + MSE, positive otherwise.
    pub fn for_variant(noise: NoiseKind, loss: LossKind) -> Self {
        let mut c = Self {
            noise,
            loss,
            ..Self::default()
        };
        c.arch.output_activation = default_head(noise, loss);
        c
    }

    pub fn snr_logistic(&self) -> (f64, f64) {
        let (loc, scale) = default_snr_logistic(self.noise);
        (self.snr_loc.unwrap_or(loc), self.snr_scale.unwrap_or(scale))
    }

    pub fn snr_window(&self) -> [f64; 2] {
        let (loc, scale) = self.snr_logistic();
        self.snr_window.unwrap_or_else(|| {
            let (lo, hi) = default_alpha_window(loc, scale);
            [lo, hi]
        })
    }

    pub fn snr_proposal(&self) -> Result<SnrProposal> {
        let (loc, scale) = self.snr_logistic();
        let [lo, hi] = self.snr_window();
        SnrProposal::new(loc, scale, lo, hi)
    }

    /// Copy with every optional field filled in from `data`.
    pub fn resolved(&self, data: &[f64]) -> Result<Self> {
        let mut c = self.clone();
        let (loc, scale) = self.snr_logistic();
        c.snr_loc = Some(loc);
        c.snr_scale = Some(scale);
        c.snr_window = Some(self.snr_window());
        c.data_scale = Some(match self.data_scale {
            Some(k) => k,
            None => data.iter().cloned().fold(0.0, f64::max).max(1.0),
        });
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let (_, scale) = self.snr_logistic();
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be positive");
        }
        if !(self.lr > 0.0) {
            return bad("lr must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("adam betas must lie in [0, 1)");
        }
        if !(scale > 0.0) {
            return bad("snr_scale must be positive");
        }
        self.snr_proposal()?;
        if !(self.eps_shift >= 0.0) {
            return bad("eps_shift must be non-negative");
        }
        if let Some(d) = self.ema_decay {
            if !(0.0..1.0).contains(&d) {
                return bad("ema_decay must lie in [0, 1)");
            }
        }
        if let Some(k) = self.data_scale {
            if !(k > 0.0 && k.is_finite()) {
                return bad("data_scale must be positive");
            }
        }
        if self.loss == LossKind::Prl
            && self.arch.output_activation != OutputActivation::SoftplusEps
        {
            return bad("the prl loss needs the positive (softplus_eps) output head");
        }
        if self.noise == NoiseKind::Gaussian
            && self.loss == LossKind::Mse
            && self.arch.output_activation != OutputActivation::Identity
        {
            return bad("gaussian + mse trains on z-scores and needs the identity output head");
        }
        self.arch.validate()
    }
}

fn default_head(noise: NoiseKind, loss: LossKind) -> OutputActivation {
    match (noise, loss) {
        (NoiseKind::Gaussian, LossKind::Mse) => OutputActivation::Identity,
        _ => OutputActivation::SoftplusEps,
    }
}

/// The transform a variant trains under: scaled counts (or the [1, 2] shift
/// under [`PoissonNorm::UnitShift`]) for Poisson, z-scores for Gaussian + MSE,
/// and a shift into [1, 2] for Gaussian + PRL.
pub fn variant_transform(
    noise: NoiseKind,
    loss: LossKind,
    poisson_norm: PoissonNorm,
    data: &[f64],
    scale: f64,
) -> DataTransform {
    match (noise, loss) {
        (NoiseKind::Poisson, _) => match poisson_norm {
            PoissonNorm::Scale => DataTransform::Scale { scale },
            PoissonNorm::UnitShift => DataTransform::UnitShift { scale },
        },
        (NoiseKind::Gaussian, LossKind::Mse) => {
            let n = data.len() as f64;
            let mean = data.iter().sum::<f64>() / n;
            let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            DataTransform::Standardize { mean, sd }
        }
        (NoiseKind::Gaussian, LossKind::Prl) => DataTransform::UnitShift { scale },
    }
}

/// SHA-256 of the little-endian bytes of `data`, as lowercase hex.
pub fn data_hash(data: &[f64]) -> String {
    let mut h = Sha256::new();
    for x in data {
        h.update(x.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Training state that advances one epoch at a time.
#[derive(Clone, Debug)]
pub struct Trainer<'a> {
    config: TrainConfig,
    data: &'a [f64],
    model: TrainedModel,
    adam: AdamState,
    history: Vec<f64>,
    steps: usize,
    ema: Option<Vec<f64>>,
}

impl<'a> Trainer<'a> {
    pub fn new(config: &TrainConfig, data: &'a [f64]) -> Result<Self> {
        let config = config.resolved(data)?;
        check_data(&config, data)?;
        let root = RngStream::new(config.seed, 0);
        let params = DenoiserParams::init(config.arch, &mut root.substream(0))?;
        let transform = variant_transform(
            config.noise,
            config.loss,
            config.poisson_norm,
            data,
            config.data_scale.expect("resolved"),
        );
        let model = TrainedModel::new(
            params,
            config.noise,
            config.loss,
            transform,
            config.eps_shift,
        )?
        .with_alpha_range(Some(config.snr_window()))?;
        let adam = AdamState::new(
            config.arch.n_params(),
            config.lr,
            config.beta1,
            config.beta2,
        );
        let ema = config.ema_decay.map(|_| model.params.values().to_vec());
        Ok(Self {
            config,
            data,
            model,
            adam,
            history: Vec::new(),
            steps: 0,
            ema,
        })
    }

    /// Continue from a checkpoint that carries optimizer state.
    pub fn resume(config: &TrainConfig, data: &'a [f64], ckpt: Checkpoint) -> Result<Self> {
        let config = config.resolved(data)?;
        check_data(&config, data)?;
        let adam = ckpt
            .adam
            .ok_or_else(|| Error::Checkpoint("checkpoint has no optimizer state".into()))?;
        if *ckpt.model.params.arch() != config.arch
            || ckpt.model.noise != config.noise
            || ckpt.model.loss != config.loss
        {
            return Err(Error::Checkpoint(
                "checkpoint does not match the training configuration".into(),
            ));
        }
        if ckpt.history.len() as u64 != ckpt.epochs_done {
            return Err(Error::Checkpoint(
                "history length differs from epoch count".into(),
            ));
        }
        let steps = adam.step as usize;
        let mut model = ckpt.model;
        let ema = match (config.ema_decay, ckpt.online) {
            (Some(_), Some(online)) => {
                if online.len() != model.params.values().len() {
                    return Err(Error::Checkpoint(
                        "online parameters have the wrong length".into(),
                    ));
                }
                let averaged = model.params.values().to_vec();
                model.params.values_mut().copy_from_slice(&online);
                Some(averaged)
            }
            (None, None) => None,
            _ => {
                return Err(Error::Checkpoint(
                    "checkpoint and configuration disagree on parameter averaging".into(),
                ))
            }
        };
        Ok(Self {
            config,
            data,
            model,
            adam,
            history: ckpt.history,
            steps,
            ema,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn model(&self) -> &TrainedModel {
        &self.model
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn epochs_done(&self) -> usize {
        self.history.len()
    }

    /// The model to export: the parameter average when enabled, otherwise
    /// the last iterate.
    pub fn exported_model(&self) -> TrainedModel {
        let mut m = self.model.clone();
        if let Some(ema) = &self.ema {
            m.params.values_mut().copy_from_slice(ema);
        }
        m
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            model: self.exported_model(),
            epochs_done: self.history.len() as u64,
            adam: Some(self.adam.clone()),
            history: self.history.clone(),
            online: self
                .ema
                .as_ref()
                .map(|_| self.model.params.values().to_vec()),
        }
    }

    /// One pass over the data in shuffled mini-batches; returns the epoch's
    /// mean weighted loss.
    pub fn run_epoch(&mut self) -> Result<f64> {
        let epoch = self.history.len() as u64;
        let mut rng = RngStream::new(self.config.seed, 0).substream(epoch + 1);
        let d = self.config.arch.input_dim;
        let rows = self.data.len() / d;
        let mut order: Vec<usize> = (0..rows).collect();
        for i in (1..rows).rev() {
            let j = rng.index(i + 1);
            order.swap(i, j);
        }
        let proposal = self.config.snr_proposal()?;
        let bs = self.config.batch_size;
        let mut input = Vec::with_capacity(bs * d);
        let mut target = Vec::with_capacity(bs * d);
        let mut total = 0.0;
        let mut n_batches = 0usize;
        for batch in order.chunks(bs) {
            let alpha = proposal.sample(&mut rng);
            let gamma = alpha.exp();
            input.clear();
            target.clear();
            for &r in batch {
                let x = &self.data[r * d..(r + 1) * d];
                self.corrupt_row(x, gamma, &mut rng, &mut input, &mut target);
            }
            let w = self.config.weight_mode.weight(alpha, &proposal) / batch.len() as f64;
            let weights = vec![w; batch.len()];
            let alphas = vec![alpha; batch.len()];
            let step = self.steps;
            let numeric = |what: String| Error::Numeric { step, what };
            let (loss, grad) = self
                .model
                .params
                .loss_and_grad(&input, &alphas, &target, &weights, self.config.loss)
                .map_err(|e| numeric(format!("epoch {epoch}, alpha {alpha:.3}: {e}")))?;
            if !loss.is_finite() {
                return Err(numeric(format!(
                    "epoch {epoch}, alpha {alpha:.3}: loss {loss}"
                )));
            }
            if let Some(g) = grad.iter().find(|g| !g.is_finite()) {
                return Err(numeric(format!(
                    "epoch {epoch}, alpha {alpha:.3}: gradient {g}"
                )));
            }
            adam_step(&mut self.adam, self.model.params.values_mut(), &grad)?;
            if let (Some(ema), Some(d)) = (&mut self.ema, self.config.ema_decay) {
                for (e, p) in ema.iter_mut().zip(self.model.params.values()) {
                    *e = d * *e + (1.0 - d) * p;
                }
            }
            self.steps += 1;
            total += loss;
            n_batches += 1;
        }
        let mean = total / n_batches as f64;
        self.history.push(mean);
        Ok(mean)
    }

    /// Runs until `config.epochs` epochs are complete.
    pub fn run(&mut self) -> Result<()> {
        while self.history.len() < self.config.epochs {
            self.run_epoch()?;
        }
        Ok(())
    }

    pub fn into_outcome(self) -> TrainOutcome {
        let model = self.exported_model();
        let online = self.ema.map(|_| self.model.params.values().to_vec());
        TrainOutcome {
            adam: self.adam,
            history: self.history,
            model,
            online,
            config: self.config,
        }
    }

    fn corrupt_row(
        &self,
        x: &[f64],
        gamma: f64,
        rng: &mut RngStream,
        input: &mut Vec<f64>,
        target: &mut Vec<f64>,
    ) {
        let t = &self.model.transform;
        match self.config.noise {
            NoiseKind::Poisson => {
                let s = 1.0 / (1.0 + gamma);
                let shifted = matches!(t, DataTransform::UnitShift { .. });
                for &xi in x {
                    let xc = if shifted { t.forward(xi) } else { xi };
                    let z = poisson_unchecked(rng, gamma * (xc + self.config.eps_shift)) as f64;
                    input.push(if shifted { z * s } else { t.forward(z * s) });
                    target.push(t.forward(xi));
                }
            }
            NoiseKind::Gaussian => {
                let (sg, s) = (gamma.sqrt(), 1.0 / (1.0 + gamma).sqrt());
                for &xi in x {
                    let xn = t.forward(xi);
                    input.push((sg * xn + rng.std_normal()) * s);
                    target.push(xn);
                }
            }
        }
    }
}

fn check_data(config: &TrainConfig, data: &[f64]) -> Result<()> {
    let d = config.arch.input_dim;
    if data.is_empty() || data.len() % d != 0 {
        return domain(format!(
            "training data must be a non-empty multiple of input_dim {d}, got {} values",
            data.len()
        ));
    }
    if let Some(x) = data.iter().find(|x| !x.is_finite()) {
        return domain(format!("training data contains {x}"));
    }
    if config.noise == NoiseKind::Poisson {
        if let Some(x) = data.iter().find(|x| **x < 0.0) {
            return domain(format!(
                "poisson training data must be non-negative, got {x}"
            ));
        }
    }
    Ok(())
}

/// Result of a completed training run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    /// Mean weighted loss per epoch.
    pub history: Vec<f64>,
    pub adam: AdamState,
    /// Last-iterate parameters when `model` holds a moving average.
    pub online: Option<Vec<f64>>,
    /// The configuration with all defaults materialized.
    pub config: TrainConfig,
}

impl TrainOutcome {
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            model: self.model.clone(),
            epochs_done: self.history.len() as u64,
            adam: Some(self.adam.clone()),
            history: self.history.clone(),
            online: self.online.clone(),
        }
    }

    /// Loss history as `epoch,mean_loss` CSV, epochs counted from 1.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("epoch,mean_loss\n");
        for (i, l) in self.history.iter().enumerate() {
            s.push_str(&format!("{},{:e}\n", i + 1, l));
        }
        s
    }

    pub fn manifest(&self, data: &[f64]) -> TrainManifest {
        TrainManifest {
            config: self.config.clone(),
            data_hash: data_hash(data),
            n_data: data.len(),
            transform: self.model.transform,
            epochs_done: self.history.len(),
            final_loss: self.history.last().copied(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Everything needed to reproduce a training run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainManifest {
    pub config: TrainConfig,
    pub data_hash: String,
    pub n_data: usize,
    pub transform: DataTransform,
    pub epochs_done: usize,
    pub final_loss: Option<f64>,
    pub crate_version: String,
}

pub fn train(config: &TrainConfig, data: &[f64]) -> Result<TrainOutcome> {
    let mut t = Trainer::new(config, data)?;
    t.run()?;
    Ok(t.into_outcome())
}

/// All four channel × loss variants from one base configuration, sharing
/// seed, epochs and optimizer settings. Logistic parameters and output heads
/// follow each variant's defaults unless the base sets them.
pub fn cross_train(base: &TrainConfig, data: &[f64]) -> Result<Vec<TrainOutcome>> {
    let mut out = Vec::with_capacity(4);
    for noise in [NoiseKind::Gaussian, NoiseKind::Poisson] {
        for loss in [LossKind::Mse, LossKind::Prl] {
            let mut c = base.clone();
            c.noise = noise;
            c.loss = loss;
            c.arch.output_activation = default_head(noise, loss);
            if base.noise != noise {
                c.snr_loc = None;
                c.snr_scale = None;
                c.snr_window = None;
            }
            out.push(train(&c, data)?);
        }
    }
    Ok(out)
}
