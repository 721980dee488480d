//! Binary model container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes   b"SSCL"
//! version u32       1
//! seed    u64       training seed
//! layers  u32       layer count
//! per layer:
//!   m        u32    output dimension
//!   n        u32    input dimension
//!   act      u8     0 linear, 1 relu, 2 sigmoid, 3 tanh, 4 step
//!   weights  m*n f64, row-major
//!   bias     m f64
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use thiserror::Error;

use super::{ActivationKind, DenseLayer, Network, NnError};

const MAGIC: &[u8; 4] = b"SSCL";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown activation tag {0}")]
    BadActivationTag(u8),
    #[error("model file is inconsistent: {0}")]
    Invalid(#[from] NnError),
}

fn activation_tag(kind: ActivationKind) -> u8 {
    match kind {
        ActivationKind::Linear => 0,
        ActivationKind::Relu => 1,
        ActivationKind::Sigmoid => 2,
        ActivationKind::Tanh => 3,
        ActivationKind::Step => 4,
    }
}

fn activation_from_tag(tag: u8) -> Result<ActivationKind, ModelIoError> {
    Ok(match tag {
        0 => ActivationKind::Linear,
        1 => ActivationKind::Relu,
        2 => ActivationKind::Sigmoid,
        3 => ActivationKind::Tanh,
        4 => ActivationKind::Step,
        other => return Err(ModelIoError::BadActivationTag(other)),
    })
}

pub fn save_model(path: &Path, net: &Network, seed: u64) -> Result<(), ModelIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    w.write_all(&(net.layers.len() as u32).to_le_bytes())?;
    for layer in &net.layers {
        w.write_all(&(layer.output_dim() as u32).to_le_bytes())?;
        w.write_all(&(layer.input_dim() as u32).to_le_bytes())?;
        w.write_all(&[activation_tag(layer.activation)])?;
        for v in layer.weights.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in layer.bias.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(Network, u64), ModelIoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ModelIoError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(ModelIoError::UnsupportedVersion(version));
    }
    let seed = read_u64(&mut r)?;
    let n_layers = read_u32(&mut r)? as usize;
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let m = read_u32(&mut r)? as usize;
        let n = read_u32(&mut r)? as usize;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let activation = activation_from_tag(tag[0])?;
        let mut weights = Vec::with_capacity(m * n);
        for _ in 0..m * n {
            weights.push(read_f64(&mut r)?);
        }
        let mut bias = Vec::with_capacity(m);
        for _ in 0..m {
            bias.push(read_f64(&mut r)?);
        }
        let weights = Array2::from_shape_vec((m, n), weights)
            .map_err(|_| ModelIoError::Invalid(NnError::DegenerateLayer))?;
        layers.push(DenseLayer::new(weights, Array1::from_vec(bias), activation)?);
    }
    Ok((Network::new(layers)?, seed))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, std::io::Error> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, std::io::Error> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, std::io::Error> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
