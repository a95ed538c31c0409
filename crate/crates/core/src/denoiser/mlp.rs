//! Conditional MLP `x̂(z̃, α)` with hand-written reverse mode.
//!
//! Architecture, for input width `D`, hidden width `H`, embedding width `E`
//! and `L` hidden layers:
//!
//! ```text
//! s    = [sin(α f_k), cos(α f_k)]           f_k = 10000^(−k/(E/2))
//! e    = SiLU(W_emb s + b_emb)              (E)
//! u_1  = W_1 z̃ + b_1 + W_proj e             (H)
//! u_l  = W_l h_{l−1} + b_l                  (H), l = 2..L
//! h_l  = LeakyReLU(g_l ⊙ LN(u_l) + β_l)
//! x̂    = act(W_out h_L + b_out)             (D)
//! ```
//!
//! All parameters live in one flat `Vec<f64>` whose layout is fixed by the
//! [`ArchSpec`]; gradients use the same layout.

use serde::{Deserialize, Serialize};

use super::linalg::gemm;
use crate::error::{Error, Result};
use crate::math::{sigmoid, softplus, LossKind, RngStream};

const LN_EPS: f64 = 1e-5;
/// Floor added after the softplus head so the estimate stays strictly positive.
pub const SOFTPLUS_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    /// softplus(raw) + 1e−6
    SoftplusEps,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchSpec {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub n_hidden_layers: usize,
    pub embed_dim: usize,
    pub leaky_slope: f64,
    pub output_activation: OutputActivation,
}

impl Default for ArchSpec {
    fn default() -> Self {
        Self {
            input_dim: 1,
            hidden_dim: 64,
            n_hidden_layers: 3,
            embed_dim: 64,
            leaky_slope: 0.2,
            output_activation: OutputActivation::SoftplusEps,
        }
    }
}

impl ArchSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.input_dim > 0
            && self.hidden_dim > 0
            && self.n_hidden_layers > 0
            && self.embed_dim >= 2
            && self.embed_dim % 2 == 0
            && self.leaky_slope > 0.0
            && self.leaky_slope < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid architecture {self:?}")))
        }
    }

    pub fn n_params(&self) -> usize {
        Layout::new(self).total
    }
}

#[derive(Clone, Copy, Debug)]
struct Dense {
    w: usize,
    b: usize,
    gain: usize,
    shift: usize,
    fan_in: usize,
}

#[derive(Clone, Debug)]
struct Layout {
    emb_w: usize,
    emb_b: usize,
    proj_w: usize,
    hidden: Vec<Dense>,
    out_w: usize,
    out_b: usize,
    total: usize,
}

impl Layout {
    fn new(a: &ArchSpec) -> Self {
        let (d, h, e) = (a.input_dim, a.hidden_dim, a.embed_dim);
        let mut off = 0;
        let mut take = |n: usize| {
            let at = off;
            off += n;
            at
        };
        let emb_w = take(e * e);
        let emb_b = take(e);
        let proj_w = take(h * e);
        let mut hidden = Vec::with_capacity(a.n_hidden_layers);
        for l in 0..a.n_hidden_layers {
            let fan_in = if l == 0 { d } else { h };
            hidden.push(Dense {
                w: take(h * fan_in),
                b: take(h),
                gain: take(h),
                shift: take(h),
                fan_in,
            });
        }
        let out_w = take(d * h);
        let out_b = take(d);
        Self {
            emb_w,
            emb_b,
            proj_w,
            hidden,
            out_w,
            out_b,
            total: off,
        }
    }
}

/// Sinusoidal features of the log-SNR (before the dense layer).
pub fn sinusoidal_features(alpha: f64, embed_dim: usize) -> Vec<f64> {
    let half = embed_dim / 2;
    let mut out = vec![0.0; embed_dim];
    for k in 0..half {
        let f = (-(10_000f64).ln() * k as f64 / half as f64).exp();
        out[k] = (alpha * f).sin();
        out[half + k] = (alpha * f).cos();
    }
    out
}

#[inline]
fn silu(t: f64) -> f64 {
    t * sigmoid(t)
}

#[inline]
fn silu_grad(t: f64) -> f64 {
    let s = sigmoid(t);
    s * (1.0 + t * (1.0 - s))
}

/// Network weights plus the architecture that fixes their layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DenoiserParams {
    arch: ArchSpec,
    values: Vec<f64>,
}

/// Intermediate values kept by [`DenoiserParams::forward_tape`] for the
/// backward pass.
pub struct Tape {
    batch: usize,
    groups: Vec<(usize, usize)>,
    feats: Vec<f64>,
    pre_emb: Vec<f64>,
    emb: Vec<f64>,
    inputs: Vec<f64>,
    layers: Vec<LayerTape>,
    raw: Vec<f64>,
    out: Vec<f64>,
}

struct LayerTape {
    normed: Vec<f64>,
    inv_std: Vec<f64>,
    pre_act: Vec<f64>,
    act: Vec<f64>,
}

impl Tape {
    pub fn output(&self) -> &[f64] {
        &self.out
    }
}

impl DenoiserParams {
    /// Fan-in-scaled uniform weights, zero biases, unit gains, zero shifts.
    pub fn init(arch: ArchSpec, rng: &mut RngStream) -> Result<Self> {
        arch.validate()?;
        let lay = Layout::new(&arch);
        let mut values = vec![0.0; lay.total];
        let mut fill = |at: usize, n: usize, fan_in: usize, rng: &mut RngStream| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for v in &mut values[at..at + n] {
                *v = bound * (2.0 * rng.uniform() - 1.0);
            }
        };
        let (d, h, e) = (arch.input_dim, arch.hidden_dim, arch.embed_dim);
        fill(lay.emb_w, e * e, e, rng);
        fill(lay.proj_w, h * e, e, rng);
        for layer in &lay.hidden {
            fill(layer.w, h * layer.fan_in, layer.fan_in, rng);
        }
        fill(lay.out_w, d * h, h, rng);
        for layer in &lay.hidden {
            values[layer.gain..layer.gain + h].fill(1.0);
        }
        Ok(Self { arch, values })
    }

    pub fn from_values(arch: ArchSpec, values: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        let want = arch.n_params();
        if values.len() != want {
            return Err(Error::Shape(format!(
                "expected {want} parameters, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Checkpoint("non-finite parameter".into()));
        }
        Ok(Self { arch, values })
    }

    pub fn arch(&self) -> &ArchSpec {
        &self.arch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Normalization gains of every hidden layer, concatenated.
    pub fn gains(&self) -> Vec<f64> {
        let lay = Layout::new(&self.arch);
        let h = self.arch.hidden_dim;
        lay.hidden
            .iter()
            .flat_map(|l| self.values[l.gain..l.gain + h].iter().copied())
            .collect()
    }

    /// Conditioning embedding `SiLU(W_emb s(α) + b_emb)`.
    pub fn embed_logsnr(&self, alpha: f64) -> Vec<f64> {
        let lay = Layout::new(&self.arch);
        let e = self.arch.embed_dim;
        let s = sinusoidal_features(alpha, e);
        let mut pre = self.values[lay.emb_b..lay.emb_b + e].to_vec();
        gemm(
            1,
            e,
            e,
            &s,
            false,
            &self.values[lay.emb_w..lay.emb_w + e * e],
            true,
            1.0,
            &mut pre,
        );
        pre.into_iter().map(silu).collect()
    }

    /// Batched forward pass. `z` is row-major `batch × input_dim`.
    pub fn forward(&self, z: &[f64], alpha: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_tape(z, alpha)?.out)
    }

    pub fn forward_tape(&self, z: &[f64], alpha: &[f64]) -> Result<Tape> {
        let a = &self.arch;
        let (d, h, e) = (a.input_dim, a.hidden_dim, a.embed_dim);
        let batch = alpha.len();
        if z.len() != batch * d {
            return Err(Error::Shape(format!(
                "input has {} values for batch {batch} × dim {d}",
                z.len()
            )));
        }
        let lay = Layout::new(a);
        let p = &self.values;

        // runs of equal α share one embedding
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=batch {
            if i == batch || alpha[i].to_bits() != alpha[start].to_bits() {
                groups.push((start, i));
                start = i;
            }
        }
        let ng = groups.len();
        let mut feats = Vec::with_capacity(ng * e);
        for &(s, _) in &groups {
            feats.extend(sinusoidal_features(alpha[s], e));
        }
        let mut pre_emb = vec![0.0; ng * e];
        for row in pre_emb.chunks_mut(e) {
            row.copy_from_slice(&p[lay.emb_b..lay.emb_b + e]);
        }
        gemm(
            ng,
            e,
            e,
            &feats,
            false,
            &p[lay.emb_w..lay.emb_w + e * e],
            true,
            1.0,
            &mut pre_emb,
        );
        let emb: Vec<f64> = pre_emb.iter().map(|&t| silu(t)).collect();
        let mut cond = vec![0.0; ng * h];
        gemm(
            ng,
            e,
            h,
            &emb,
            false,
            &p[lay.proj_w..lay.proj_w + h * e],
            true,
            0.0,
            &mut cond,
        );
        check_finite(&cond, 0, "conditioning embedding")?;

        let mut layers: Vec<LayerTape> = Vec::with_capacity(lay.hidden.len());
        for (li, layer) in lay.hidden.iter().enumerate() {
            let prev: &[f64] = if li == 0 { z } else { &layers[li - 1].act };
            let mut u = vec![0.0; batch * h];
            for row in u.chunks_mut(h) {
                row.copy_from_slice(&p[layer.b..layer.b + h]);
            }
            gemm(
                batch,
                layer.fan_in,
                h,
                prev,
                false,
                &p[layer.w..layer.w + h * layer.fan_in],
                true,
                1.0,
                &mut u,
            );
            if li == 0 {
                for (g, &(s, t)) in groups.iter().enumerate() {
                    let c = &cond[g * h..(g + 1) * h];
                    for row in u[s * h..t * h].chunks_mut(h) {
                        for (x, ci) in row.iter_mut().zip(c) {
                            *x += ci;
                        }
                    }
                }
            }
            let gain = &p[layer.gain..layer.gain + h];
            let shift = &p[layer.shift..layer.shift + h];
            let mut inv_std = vec![0.0; batch];
            let mut pre_act = vec![0.0; batch * h];
            let mut act = vec![0.0; batch * h];
            for b in 0..batch {
                let row = &mut u[b * h..(b + 1) * h];
                let mean = row.iter().sum::<f64>() / h as f64;
                let var = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / h as f64;
                let is = 1.0 / (var + LN_EPS).sqrt();
                inv_std[b] = is;
                for j in 0..h {
                    let n = (row[j] - mean) * is;
                    row[j] = n;
                    let y = gain[j] * n + shift[j];
                    pre_act[b * h + j] = y;
                    act[b * h + j] = if y > 0.0 { y } else { a.leaky_slope * y };
                }
            }
            check_finite(&act, li + 1, "hidden activation")?;
            layers.push(LayerTape {
                normed: u,
                inv_std,
                pre_act,
                act,
            });
        }

        let last = &layers.last().expect("at least one hidden layer").act;
        let mut raw = vec![0.0; batch * d];
        for row in raw.chunks_mut(d) {
            row.copy_from_slice(&p[lay.out_b..lay.out_b + d]);
        }
        gemm(
            batch,
            h,
            d,
            last,
            false,
            &p[lay.out_w..lay.out_w + d * h],
            true,
            1.0,
            &mut raw,
        );
        let out: Vec<f64> = match a.output_activation {
            OutputActivation::SoftplusEps => {
                raw.iter().map(|&r| softplus(r) + SOFTPLUS_FLOOR).collect()
            }
            OutputActivation::Identity => raw.clone(),
        };
        check_finite(&out, lay.hidden.len() + 1, "output")?;
        Ok(Tape {
            batch,
            groups,
            feats,
            pre_emb,
            emb,
            inputs: z.to_vec(),
            layers,
            raw,
            out,
        })
    }

    /// Weighted loss `Σ_i w_i Σ_d loss(target_id, x̂_id)` and its exact
    /// gradient with respect to every parameter.
    pub fn loss_and_grad(
        &self,
        z: &[f64],
        alpha: &[f64],
        targets: &[f64],
        weights: &[f64],
        loss: LossKind,
    ) -> Result<(f64, Vec<f64>)> {
        let tape = self.forward_tape(z, alpha)?;
        self.backward(&tape, targets, weights, loss)
    }

    pub fn backward(
        &self,
        tape: &Tape,
        targets: &[f64],
        weights: &[f64],
        loss: LossKind,
    ) -> Result<(f64, Vec<f64>)> {
        let a = &self.arch;
        let (d, h, e) = (a.input_dim, a.hidden_dim, a.embed_dim);
        let batch = tape.batch;
        if targets.len() != batch * d || weights.len() != batch {
            return Err(Error::Shape(format!(
                "targets {} / weights {} do not match batch {batch} × dim {d}",
                targets.len(),
                weights.len()
            )));
        }
        let lay = Layout::new(a);
        let p = &self.values;
        let mut grad = vec![0.0; lay.total];

        let mut total = 0.0;
        let mut d_raw = vec![0.0; batch * d];
        for b in 0..batch {
            for j in 0..d {
                let i = b * d + j;
                let (x, xh) = (targets[i], tape.out[i]);
                total += weights[b] * loss.value(x, xh);
                let g = weights[b] * loss.grad(x, xh);
                d_raw[i] = match a.output_activation {
                    OutputActivation::SoftplusEps => g * sigmoid(tape.raw[i]),
                    OutputActivation::Identity => g,
                };
            }
        }
        if !total.is_finite() {
            return Err(Error::NonFinite {
                layer: lay.hidden.len() + 1,
                what: "loss".into(),
            });
        }

        let last = &tape.layers.last().expect("at least one hidden layer").act;
        gemm(
            d,
            batch,
            h,
            &d_raw,
            true,
            last,
            false,
            0.0,
            &mut grad[lay.out_w..lay.out_w + d * h],
        );
        for row in d_raw.chunks(d) {
            for (gb, r) in grad[lay.out_b..lay.out_b + d].iter_mut().zip(row) {
                *gb += r;
            }
        }
        let mut d_act = vec![0.0; batch * h];
        gemm(
            batch,
            d,
            h,
            &d_raw,
            false,
            &p[lay.out_w..lay.out_w + d * h],
            false,
            0.0,
            &mut d_act,
        );

        let mut d_u0 = Vec::new();
        for li in (0..lay.hidden.len()).rev() {
            let layer = lay.hidden[li];
            let t = &tape.layers[li];
            let gain = &p[layer.gain..layer.gain + h];
            let mut d_u = vec![0.0; batch * h];
            let mut d_gain = vec![0.0; h];
            let mut d_shift = vec![0.0; h];
            let mut dn = vec![0.0; h];
            for b in 0..batch {
                let r = b * h..(b + 1) * h;
                let normed = &t.normed[r.clone()];
                let mut mean_dn = 0.0;
                let mut mean_dn_n = 0.0;
                for j in 0..h {
                    let y = t.pre_act[b * h + j];
                    let dy = d_act[b * h + j] * if y > 0.0 { 1.0 } else { a.leaky_slope };
                    d_gain[j] += dy * normed[j];
                    d_shift[j] += dy;
                    dn[j] = dy * gain[j];
                    mean_dn += dn[j];
                    mean_dn_n += dn[j] * normed[j];
                }
                mean_dn /= h as f64;
                mean_dn_n /= h as f64;
                let is = t.inv_std[b];
                for j in 0..h {
                    d_u[b * h + j] = is * (dn[j] - mean_dn - normed[j] * mean_dn_n);
                }
            }
            grad[layer.gain..layer.gain + h].copy_from_slice(&d_gain);
            grad[layer.shift..layer.shift + h].copy_from_slice(&d_shift);
            let prev: &[f64] = if li == 0 {
                &tape.inputs
            } else {
                &tape.layers[li - 1].act
            };
            gemm(
                h,
                batch,
                layer.fan_in,
                &d_u,
                true,
                prev,
                false,
                0.0,
                &mut grad[layer.w..layer.w + h * layer.fan_in],
            );
            for row in d_u.chunks(h) {
                for (gb, r) in grad[layer.b..layer.b + h].iter_mut().zip(row) {
                    *gb += r;
                }
            }
            if li > 0 {
                d_act = vec![0.0; batch * h];
                gemm(
                    batch,
                    h,
                    h,
                    &d_u,
                    false,
                    &p[layer.w..layer.w + h * h],
                    false,
                    0.0,
                    &mut d_act,
                );
            } else {
                d_u0 = d_u;
            }
        }

        // conditioning path: u_1 += W_proj e(α_group)
        let ng = tape.groups.len();
        let mut d_cond = vec![0.0; ng * h];
        for (g, &(s, t)) in tape.groups.iter().enumerate() {
            let dc = &mut d_cond[g * h..(g + 1) * h];
            for row in d_u0[s * h..t * h].chunks(h) {
                for (x, r) in dc.iter_mut().zip(row) {
                    *x += r;
                }
            }
        }
        gemm(
            h,
            ng,
            e,
            &d_cond,
            true,
            &tape.emb,
            false,
            0.0,
            &mut grad[lay.proj_w..lay.proj_w + h * e],
        );
        let mut d_emb = vec![0.0; ng * e];
        gemm(
            ng,
            h,
            e,
            &d_cond,
            false,
            &p[lay.proj_w..lay.proj_w + h * e],
            false,
            0.0,
            &mut d_emb,
        );
        for (de, &pre) in d_emb.iter_mut().zip(&tape.pre_emb) {
            *de *= silu_grad(pre);
        }
        gemm(
            e,
            ng,
            e,
            &d_emb,
            true,
            &tape.feats,
            false,
            0.0,
            &mut grad[lay.emb_w..lay.emb_w + e * e],
        );
        for row in d_emb.chunks(e) {
            for (gb, r) in grad[lay.emb_b..lay.emb_b + e].iter_mut().zip(row) {
                *gb += r;
            }
        }
        Ok((total, grad))
    }
}

fn check_finite(v: &[f64], layer: usize, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            layer,
            what: what.to_string(),
        })
    }
}
