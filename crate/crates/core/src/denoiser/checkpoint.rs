//! Versioned binary checkpoints.
//!
//! Layout (little endian): 4-byte magic, `u32` version, `u32` header length,
//! JSON header, `u64` parameter count, the parameters as `f64`, and, when the
//! header says so, the Adam first and second moments and the last-iterate
//! parameters (all of the same length), followed by the per-epoch loss
//! history.
//! The header carries a SHA-256 digest of everything after it.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{AdamState, ArchSpec, DataTransform, DenoiserParams, TrainedModel};
use crate::channel::NoiseKind;
use crate::error::{Error, Result};
use crate::math::LossKind;

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"PDDN";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct AdamHeader {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    arch: ArchSpec,
    noise: NoiseKind,
    loss: LossKind,
    transform: DataTransform,
    eps_shift: f64,
    #[serde(default)]
    alpha_range: Option<[f64; 2]>,
    epochs_done: u64,
    adam: Option<AdamHeader>,
    #[serde(default)]
    online: bool,
    history_len: u64,
    sha256: String,
}

/// A trained model plus optional optimizer state for resuming.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub model: TrainedModel,
    pub epochs_done: u64,
    pub adam: Option<AdamState>,
    /// Mean training loss of every completed epoch.
    pub history: Vec<f64>,
    /// Last-iterate parameters when `model` holds a moving average.
    pub online: Option<Vec<f64>>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn push_f64s(buf: &mut Vec<u8>, xs: &[f64]) {
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn save_checkpoint(path: impl AsRef<Path>, ckpt: &Checkpoint) -> Result<()> {
    let path = path.as_ref();
    let values = ckpt.model.params.values();
    let mut body = Vec::with_capacity(8 + 8 * values.len() * 3);
    body.extend_from_slice(&(values.len() as u64).to_le_bytes());
    push_f64s(&mut body, values);
    if let Some(a) = &ckpt.adam {
        if a.m.len() != values.len() || a.v.len() != values.len() {
            return Err(Error::Shape(
                "adam state does not match parameter count".into(),
            ));
        }
        push_f64s(&mut body, &a.m);
        push_f64s(&mut body, &a.v);
    }
    if let Some(o) = &ckpt.online {
        if o.len() != values.len() {
            return Err(Error::Shape(
                "online parameters do not match parameter count".into(),
            ));
        }
        push_f64s(&mut body, o);
    }
    push_f64s(&mut body, &ckpt.history);
    let header = Header {
        arch: *ckpt.model.params.arch(),
        noise: ckpt.model.noise,
        loss: ckpt.model.loss,
        transform: ckpt.model.transform,
        eps_shift: ckpt.model.eps_shift,
        alpha_range: ckpt.model.alpha_range,
        epochs_done: ckpt.epochs_done,
        adam: ckpt.adam.as_ref().map(|a| AdamHeader {
            lr: a.lr,
            beta1: a.beta1,
            beta2: a.beta2,
            eps: a.eps,
            step: a.step,
        }),
        online: ckpt.online.is_some(),
        history_len: ckpt.history.len() as u64,
        sha256: hex(&Sha256::digest(&body)),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut out = Vec::with_capacity(12 + json.len() + body.len());
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&body);
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn take<'a>(buf: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if buf.len() < n {
        return Err(Error::Checkpoint("truncated file".into()));
    }
    let (head, rest) = buf.split_at(n);
    *buf = rest;
    Ok(head)
}

fn read_f64s(buf: &mut &[u8], n: usize) -> Result<Vec<f64>> {
    let bytes = take(
        buf,
        n.checked_mul(8)
            .ok_or_else(|| Error::Checkpoint("size overflow".into()))?,
    )?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let mut raw = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut raw))
        .map_err(|e| Error::io(path, e))?;
    let mut buf = raw.as_slice();
    if take(&mut buf, 4)? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut buf, 4)?.try_into().expect("4 bytes"));
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {version}, expected {CHECKPOINT_VERSION}"
        )));
    }
    let hlen = u32::from_le_bytes(take(&mut buf, 4)?.try_into().expect("4 bytes")) as usize;
    let header: Header = serde_json::from_slice(take(&mut buf, hlen)?)
        .map_err(|e| Error::Checkpoint(format!("header: {e}")))?;
    if hex(&Sha256::digest(buf)) != header.sha256 {
        return Err(Error::Checkpoint("payload digest mismatch".into()));
    }
    let n = u64::from_le_bytes(take(&mut buf, 8)?.try_into().expect("8 bytes")) as usize;
    if n != header.arch.n_params() {
        return Err(Error::Checkpoint(format!(
            "{n} parameters stored, architecture needs {}",
            header.arch.n_params()
        )));
    }
    let values = read_f64s(&mut buf, n)?;
    let adam = match &header.adam {
        Some(h) => {
            let m = read_f64s(&mut buf, n)?;
            let v = read_f64s(&mut buf, n)?;
            Some(AdamState {
                lr: h.lr,
                beta1: h.beta1,
                beta2: h.beta2,
                eps: h.eps,
                step: h.step,
                m,
                v,
            })
        }
        None => None,
    };
    let online = if header.online {
        Some(read_f64s(&mut buf, n)?)
    } else {
        None
    };
    let history = read_f64s(&mut buf, header.history_len as usize)?;
    if !buf.is_empty() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", buf.len())));
    }
    let params = DenoiserParams::from_values(header.arch, values)?;
    let model = TrainedModel::new(
        params,
        header.noise,
        header.loss,
        header.transform,
        header.eps_shift,
    )?
    .with_alpha_range(header.alpha_range)?;
    Ok(Checkpoint {
        model,
        epochs_done: header.epochs_done,
        adam,
        history,
        online,
    })
}
