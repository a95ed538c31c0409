//! The `pdiff` command line: data generation, training, sampling,
//! likelihood estimation, metric evaluation and the identity suite.
//!
//! Every command writes its primary output plus a `<output>.manifest.json`
//! that records the fully resolved arguments, input and output digests and
//! the crate version. Rerunning with the same arguments at the same thread
//! count reproduces every primary output byte for byte.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::NoiseKind;
use crate::denoiser::{load_checkpoint, save_checkpoint, Denoiser};
use crate::error::{Error, Result};
use crate::likelihood::{estimate_nll, QuadratureScheme, QuadratureSpec};
use crate::math::{LossKind, RngStream};
use crate::metrics::{evaluate, to_lattice, EvalConfig};
use crate::sampler::{
    default_alpha_window, gaussian_reverse_sample, make_schedule, reverse_sample,
    LinearBetaSchedule, ReverseUpdate,
};
use crate::synthetic::DistributionSpec;
use crate::trainer::{default_snr_logistic, TrainConfig, Trainer};
use crate::validate::{run_suite, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "PDIFF_THREADS";

/// Upper limit on the automatically chosen PMF support.
pub const MAX_AUTO_K: u64 = 100_000;

const VARIANTS: &str = "poisson+prl, poisson+mse, gaussian+prl, gaussian+mse";

#[derive(Debug, Parser)]
#[command(name = "pdiff", version, about = "Poisson diffusion for count data")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw i.i.d. samples from a synthetic benchmark distribution.
    GenData(GenDataArgs),
    /// Train a denoiser from a run configuration file.
    Train(TrainArgs),
    /// Generate samples from a trained denoiser.
    Sample(SampleArgs),
    /// Estimate the negative log-likelihood of a data set under a model.
    Nll(NllArgs),
    /// Compare generated samples to a test set.
    Eval(EvalArgs),
    /// Run the identity suite and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenDataArgs {
    /// Named benchmark (poissmix, zip, nbinommix, bnb, zipf, yulesimon,
    /// gamma, lognormal, lomax, halfcauchy, halft, weibull, beta, uniform).
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<String>,
    /// TOML file holding a distribution spec.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Override the preset's truncation; 0 removes it.
    #[arg(long)]
    pub truncation: Option<u64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Run configuration (TOML). Defaults apply when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training data CSV; overrides `paths.train_data`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory; overrides `paths.out_dir`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Channel: poisson or gaussian.
    #[arg(long)]
    pub noise: Option<String>,
    /// Loss: prl or mse.
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Continue from a checkpoint written by an earlier run.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Number of reverse steps.
    #[arg(long = "steps", short = 'T', default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Poisson update rule: resample, thicken or corrected_thicken.
    #[arg(long, default_value = "corrected_thicken")]
    pub update: String,
    /// Lowest log-SNR of the Poisson ladder.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    /// Highest log-SNR of the Poisson ladder.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    /// First variance of the Gaussian schedule.
    #[arg(long, default_value_t = 1e-4)]
    pub beta_min: f64,
    /// Last variance of the Gaussian schedule.
    #[arg(long, default_value_t = 2e-2)]
    pub beta_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NllArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// logistic or uniform.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_hi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub loc: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Monte Carlo draws per quadrature node.
    #[arg(long)]
    pub draws: Option<usize>,
    /// Decode Poisson observations to the lattice from this log-SNR upward
    /// (defaults to the top of the training window).
    #[arg(long, allow_negative_numbers = true)]
    pub snap_alpha: Option<f64>,
    /// Skip the analytic tail terms.
    #[arg(long)]
    pub no_tails: bool,
    /// Report bits per dimension instead of nats.
    #[arg(long)]
    pub bits: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    /// Generated samples CSV (first column).
    #[arg(long)]
    pub generated: PathBuf,
    /// Test set CSV (first column).
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// PMF support is 0..=k; the largest rounded value in either file
    /// when absent.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 10)]
    pub bootstrap: usize,
    /// Score the test set under the smoothed PMF.
    #[arg(long)]
    pub smoothed_nll: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    /// fast or full.
    #[arg(long, default_value = "fast")]
    pub level: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Structured run configuration read by `pdiff train`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub train: TrainConfig,
    pub quadrature: Option<QuadratureSpec>,
    pub distribution: Option<DistributionSpec>,
    pub sample: SampleSection,
    pub eval: EvalConfig,
    pub paths: PathsSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub steps: usize,
    pub n: usize,
    pub seed: u64,
    pub update: ReverseUpdate,
    pub alpha_window: Option<[f64; 2]>,
    pub beta: LinearBetaSchedule,
}

impl Default for SampleSection {
    fn default() -> Self {
        Self {
            steps: 100,
            n: 50_000,
            seed: 0,
            update: ReverseUpdate::CorrectedThicken,
            alpha_window: None,
            beta: LinearBetaSchedule::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsSection {
    pub train_data: Option<PathBuf>,
    pub test_data: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for PathsSection {
    fn default() -> Self {
        Self {
            train_data: None,
            test_data: None,
            out_dir: PathBuf::from("run"),
        }
    }
}

impl RunConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_text(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce one command's output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub crate_version: String,
    pub threads: Option<usize>,
    pub args: serde_json::Value,
    pub resolved: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for a library error: numeric failures map to 2, everything
/// else (bad input, bad configuration, io) to 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numeric { .. }
        | Error::NonFinite { .. }
        | Error::Underflow { .. }
        | Error::UndefinedConditional { .. } => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::GenData(a) => cmd_gen_data(a, cli.threads),
        Command::Train(a) => cmd_train(a, cli.threads),
        Command::Sample(a) => cmd_sample(a, cli.threads),
        Command::Nll(a) => cmd_nll(a, cli.threads),
        Command::Eval(a) => cmd_eval(a, cli.threads),
        Command::Validate(a) => cmd_validate(a, cli.threads),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn digest(path: &Path) -> Result<FileDigest> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect(),
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Config(e.to_string()))
}

fn to_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Config(e.to_string()))
}

/// `<path>.manifest.json`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[allow(clippy::too_many_arguments)]
fn write_manifest<A: Serialize, R: Serialize>(
    command: &str,
    threads: Option<usize>,
    args: &A,
    resolved: &R,
    inputs: &[&Path],
    outputs: &[&Path],
    at: &Path,
) -> Result<()> {
    let m = Manifest {
        command: command.to_string(),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        threads,
        args: to_json(args)?,
        resolved: to_json(resolved)?,
        inputs: inputs.iter().map(|p| digest(p)).collect::<Result<_>>()?,
        outputs: outputs.iter().map(|p| digest(p)).collect::<Result<_>>()?,
    };
    write_bytes(&manifest_path(at), to_pretty(&m)?.as_bytes())
}

/// Reads the first column of a CSV file as numbers. A non-numeric first
/// row is treated as a header.
pub fn read_column(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let Some(field) = rec.get(0) else { continue };
        let field = field.trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(_) => {
                return Err(Error::Config(format!(
                    "{}: row {} is not a number: {field:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

/// One value per line under the header `x`.
pub fn column_csv(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 8 + 2);
    s.push_str("x\n");
    for v in values {
        s.push_str(&format!("{v}\n"));
    }
    s
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn cmd_gen_data(a: &GenDataArgs, threads: Option<usize>) -> Result<i32> {
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    let mut spec = match (&a.preset, &a.spec) {
        (Some(name), None) => DistributionSpec::preset(name)?,
        (None, Some(path)) => toml::from_str::<DistributionSpec>(&read_text(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        _ => return Err(usage("give exactly one of --preset or --spec")),
    };
    if let Some(k) = a.truncation {
        spec = spec.with_truncation((k > 0).then_some(k));
    }
    spec.validate()?;
    let x = spec.sample(a.n, &RngStream::new(a.seed, 0))?;
    write_bytes(&a.out, column_csv(&x).as_bytes())?;
    write_manifest("gen-data", threads, a, &spec, &[], &[&a.out], &a.out)?;
    eprintln!(
        "wrote {} samples of {} to {}",
        a.n,
        spec.name(),
        a.out.display()
    );
    Ok(EXIT_OK)
}

fn parse_variant(
    noise: Option<&str>,
    loss: Option<&str>,
    base: &TrainConfig,
) -> Result<(NoiseKind, LossKind)> {
    let bad = |what: &str, v: &str| {
        usage(format!(
            "unknown {what} {v:?}; valid noise+loss combinations: {VARIANTS}"
        ))
    };
    let n = match noise {
        Some(s) => s.parse::<NoiseKind>().map_err(|_| bad("noise", s))?,
        None => base.noise,
    };
    let l = match loss {
        Some(s) => s.parse::<LossKind>().map_err(|_| bad("loss", s))?,
        None => base.loss,
    };
    Ok((n, l))
}

fn cmd_train(a: &TrainArgs, threads: Option<usize>) -> Result<i32> {
    let mut run = match &a.config {
        Some(p) => RunConfigFile::load(p)?,
        None => RunConfigFile::default(),
    };
    let (noise, loss) = parse_variant(a.noise.as_deref(), a.loss.as_deref(), &run.train)?;
    if (noise, loss) != (run.train.noise, run.train.loss) {
        let arch = run.train.arch;
        let variant = TrainConfig::for_variant(noise, loss);
        run.train.noise = noise;
        run.train.loss = loss;
        run.train.arch = crate::denoiser::ArchSpec {
            output_activation: variant.arch.output_activation,
            ..arch
        };
    }
    if let Some(e) = a.epochs {
        run.train.epochs = e;
    }
    if let Some(s) = a.seed {
        run.train.seed = s;
    }
    let data_path = a
        .data
        .clone()
        .or_else(|| run.paths.train_data.clone())
        .ok_or_else(|| usage("no training data: pass --data or set paths.train_data"))?;
    let out_dir = a
        .out_dir
        .clone()
        .unwrap_or_else(|| run.paths.out_dir.clone());
    let data = read_column(&data_path)?;
    let mut trainer = match &a.resume {
        Some(p) => Trainer::resume(&run.train, &data, load_checkpoint(p)?)?,
        None => Trainer::new(&run.train, &data)?,
    };
    let start = trainer.epochs_done();
    while trainer.epochs_done() < trainer.config().epochs {
        let loss = trainer.run_epoch()?;
        let e = trainer.epochs_done();
        if e == start + 1 || e % 10 == 0 || e == trainer.config().epochs {
            eprintln!("epoch {e}/{} loss {loss:.6}", trainer.config().epochs);
        }
    }
    let ckpt_path = out_dir.join("model.ckpt");
    let hist_path = out_dir.join("history.csv");
    fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    save_checkpoint(&ckpt_path, &trainer.checkpoint())?;
    let config = trainer.config().clone();
    let outcome = trainer.into_outcome();
    write_bytes(&hist_path, outcome.history_csv().as_bytes())?;
    run.train = config;
    run.paths.train_data = Some(data_path.clone());
    run.paths.out_dir = out_dir.clone();
    #[derive(Serialize)]
    struct Resolved<'a> {
        run: &'a RunConfigFile,
        train: crate::trainer::TrainManifest,
        resumed_from_epoch: usize,
    }
    let resolved = Resolved {
        run: &run,
        train: outcome.manifest(&data),
        resumed_from_epoch: start,
    };
    let mut inputs: Vec<&Path> = vec![&data_path];
    if let Some(p) = &a.resume {
        inputs.push(p);
    }
    write_manifest(
        "train",
        threads,
        a,
        &resolved,
        &inputs,
        &[&ckpt_path, &hist_path],
        &ckpt_path,
    )?;
    eprintln!("wrote {}", ckpt_path.display());
    Ok(EXIT_OK)
}

fn cmd_sample(a: &SampleArgs, threads: Option<usize>) -> Result<i32> {
    if a.model.as_os_str().is_empty() {
        return Err(usage("--model is empty"));
    }
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    let update: ReverseUpdate = a.update.parse().map_err(usage)?;
    let model = load_checkpoint(&a.model)?.model;
    let rng = RngStream::new(a.seed, 0);
    #[derive(Serialize)]
    enum Resolved {
        Poisson {
            update: ReverseUpdate,
            steps: usize,
            alpha_min: f64,
            alpha_max: f64,
        },
        Gaussian {
            schedule: LinearBetaSchedule,
        },
    }
    let (samples, resolved) = match model.noise() {
        NoiseKind::Poisson => {
            let (loc, scale) = default_snr_logistic(NoiseKind::Poisson);
            let (lo, hi) = default_alpha_window(loc, scale);
            let (alpha_min, alpha_max) = (a.alpha_min.unwrap_or(lo), a.alpha_max.unwrap_or(hi));
            let schedule = make_schedule(a.steps, alpha_min, alpha_max)?;
            let s = reverse_sample(&model, &schedule, update, a.n, &rng)?;
            (
                s,
                Resolved::Poisson {
                    update,
                    steps: a.steps,
                    alpha_min,
                    alpha_max,
                },
            )
        }
        NoiseKind::Gaussian => {
            let schedule = LinearBetaSchedule {
                beta_min: a.beta_min,
                beta_max: a.beta_max,
                steps: a.steps,
            };
            (
                gaussian_reverse_sample(&model, &schedule, a.n, &rng)?,
                Resolved::Gaussian { schedule },
            )
        }
    };
    let mut csv = String::with_capacity(a.n * 16);
    csv.push_str("rounded,value\n");
    for (r, v) in samples.rounded.iter().zip(&samples.values) {
        csv.push_str(&format!("{r},{v}\n"));
    }
    write_bytes(&a.out, csv.as_bytes())?;
    write_manifest(
        "sample",
        threads,
        a,
        &resolved,
        &[&a.model],
        &[&a.out],
        &a.out,
    )?;
    eprintln!("wrote {} samples to {}", a.n, a.out.display());
    Ok(EXIT_OK)
}

fn cmd_nll(a: &NllArgs, threads: Option<usize>) -> Result<i32> {
    let model = load_checkpoint(&a.model)?.model;
    let data = read_column(&a.data)?;
    let mut q = QuadratureSpec::for_model(&model);
    if let Some(s) = &a.scheme {
        q.scheme = s.parse::<QuadratureScheme>().map_err(usage)?;
    }
    if let Some(v) = a.n_points {
        q.n_points = v;
    }
    if let Some(v) = a.alpha_lo {
        q.alpha_lo = v;
    }
    if let Some(v) = a.alpha_hi {
        q.alpha_hi = v;
    }
    if let Some(v) = a.loc {
        q.loc = v;
    }
    if let Some(v) = a.scale {
        q.scale = v;
    }
    if let Some(v) = a.draws {
        q.mc_draws_per_node = v;
    }
    q.snap_alpha = a.snap_alpha.or(q.snap_alpha);
    q.tails &= !a.no_tails;
    q.validate()?;
    let mut report = estimate_nll(&model, &data, &q, &RngStream::new(a.seed, 0))?;
    if a.bits {
        report = report.to_bits_per_dim(model.params.arch().input_dim);
    }
    let curve_path = a.out.with_extension("curve.csv");
    write_bytes(&a.out, to_pretty(&report)?.as_bytes())?;
    write_bytes(&curve_path, report.curve_csv().as_bytes())?;
    write_manifest(
        "nll",
        threads,
        a,
        &q,
        &[&a.model, &a.data],
        &[&a.out, &curve_path],
        &a.out,
    )?;
    println!(
        "nll {:.6} (diffusion {:.6}, left tail {:.3e}, right tail {:.3e})",
        report.total, report.diffusion_term, report.left_tail, report.right_tail
    );
    Ok(EXIT_OK)
}

fn cmd_eval(a: &EvalArgs, threads: Option<usize>) -> Result<i32> {
    let generated = read_column(&a.generated)?;
    let test = read_column(&a.test)?;
    let k = a.k.unwrap_or_else(|| {
        let top = generated
            .iter()
            .chain(&test)
            .filter_map(|&x| to_lattice(x))
            .max()
            .unwrap_or(0);
        top.clamp(1, MAX_AUTO_K) as usize
    });
    let config = EvalConfig {
        k,
        bandwidth: a.bandwidth,
        bootstrap: a.bootstrap,
        smoothed_nll: a.smoothed_nll,
        seed: a.seed,
    };
    let report = evaluate(&generated, &test, &config)?;
    let pmf_path = a.out.with_extension("pmf.csv");
    write_bytes(&a.out, to_pretty(&report)?.as_bytes())?;
    write_bytes(&pmf_path, report.pmf_csv().as_bytes())?;
    write_manifest(
        "eval",
        threads,
        a,
        &config,
        &[&a.generated, &a.test],
        &[&a.out, &pmf_path],
        &a.out,
    )?;
    println!("w1 {:.6} nll {:.6}", report.w1, report.nll.nll);
    Ok(EXIT_OK)
}

fn cmd_validate(a: &ValidateArgs, threads: Option<usize>) -> Result<i32> {
    let level: Level = a.level.parse()?;
    let report = run_suite(level, a.seed);
    print!("{}", report.table());
    if let Some(out) = &a.out {
        write_bytes(out, to_pretty(&report)?.as_bytes())?;
        write_manifest("validate", threads, a, &level, &[], &[out.as_path()], out)?;
    }
    if report.passed() {
        println!("all {} checks passed", report.checks.len());
        Ok(EXIT_OK)
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("failed: {}", names.join(", "));
        Ok(EXIT_VALIDATION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_rejects_unknown_keys() {
        assert!(RunConfigFile::from_toml("[train]\nepochz = 3\n").is_err());
        assert!(RunConfigFile::from_toml("bogus = 1\n").is_err());
        let c = RunConfigFile::from_toml("[train]\nepochs = 3\n[sample]\nsteps = 10\n").unwrap();
        assert_eq!(c.train.epochs, 3);
        assert_eq!(c.sample.steps, 10);
    }

    #[test]
    fn run_config_round_trips() {
        let mut c = RunConfigFile::default();
        c.distribution = Some(DistributionSpec::preset("zip").unwrap());
        c.quadrature = Some(QuadratureSpec::default());
        let back = RunConfigFile::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn variant_errors_list_the_matrix() {
        let e = parse_variant(Some("laplace"), None, &TrainConfig::default()).unwrap_err();
        assert!(e.to_string().contains(VARIANTS));
        let (n, l) = parse_variant(Some("gaussian"), Some("mse"), &TrainConfig::default()).unwrap();
        assert_eq!((n, l), (NoiseKind::Gaussian, LossKind::Mse));
    }

    #[test]
    fn column_io_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let xs = [0.0, 1.5, 1e-300, 123456789.0];
        fs::write(&p, column_csv(&xs)).unwrap();
        assert_eq!(read_column(&p).unwrap(), xs);
        fs::write(&p, "x\n1\nfoo\n").unwrap();
        assert!(read_column(&p).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run([
                "pdiff",
                "gen-data",
                "--preset",
                "zip",
                "--n",
                "0",
                "--out",
                "/nonexistent/x"
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["pdiff", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::Numeric {
                step: 0,
                what: String::new()
            }),
            EXIT_NUMERIC
        );
    }
}
