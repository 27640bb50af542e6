//! Binary checkpoints.
//!
//! Layout, all integers u32 little-endian and all reals f64 little-endian:
//!
//! ```text
//! "FYS1"
//! token count, then per token: byte length, UTF-8 bytes
//! embedding_dim, hidden_dim, context, max_positions
//! alpha, epsilon, smoothing length, smoothing probabilities
//! tensor count, then per tensor: rows, cols, rows × cols values (row-major)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ModelShape, Params, Tensor, ToyModel, Vocabulary};
use crate::entmax::AlphaParam;
use crate::error::{Error, Result};
use crate::losses::{SmoothingSpec, TargetDistribution};

pub const MAGIC: &[u8; 4] = b"FYS1";

fn io_err(e: std::io::Error) -> Error {
    Error::Checkpoint(e.to_string())
}

fn put_u32(w: &mut impl Write, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Checkpoint(format!("{v} does not fit in u32")))?;
    w.write_all(&v.to_le_bytes()).map_err(io_err)
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes()).map_err(io_err)
}

fn get_u32(r: &mut impl Read) -> Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_checkpoint(model: &ToyModel, w: &mut impl Write) -> Result<()> {
    w.write_all(MAGIC).map_err(io_err)?;
    let tokens = model.vocab().tokens();
    put_u32(w, tokens.len())?;
    for t in tokens {
        put_u32(w, t.len())?;
        w.write_all(t.as_bytes()).map_err(io_err)?;
    }
    let shape = model.shape();
    for v in [shape.embedding_dim, shape.hidden_dim, shape.context, shape.max_positions] {
        put_u32(w, v)?;
    }
    let smoothing = model.smoothing();
    put_f64(w, smoothing.alpha().get())?;
    put_f64(w, smoothing.epsilon())?;
    let r = smoothing.smoothing_distribution().probabilities();
    put_u32(w, r.len())?;
    for &p in r {
        put_f64(w, p)?;
    }
    let tensors = model.params().tensors();
    put_u32(w, tensors.len())?;
    for t in tensors {
        put_u32(w, t.rows)?;
        put_u32(w, t.cols)?;
        for &v in &t.data {
            put_f64(w, v)?;
        }
    }
    Ok(())
}

/// Guards allocations driven by length fields of a corrupt file.
const MAX_ELEMENTS: usize = 1 << 28;

fn checked_len(n: usize, what: &str) -> Result<usize> {
    if n > MAX_ELEMENTS {
        Err(Error::Checkpoint(format!("implausible {what} length {n}")))
    } else {
        Ok(n)
    }
}

pub fn read_checkpoint(r: &mut impl Read) -> Result<ToyModel> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let count = checked_len(get_u32(r)?, "vocabulary")?;
    let mut tokens = Vec::with_capacity(count);
    for _ in 0..count {
        let len = checked_len(get_u32(r)?, "token")?;
        let mut bytes = vec![0u8; len];
        r.read_exact(&mut bytes).map_err(io_err)?;
        tokens.push(String::from_utf8(bytes).map_err(|e| Error::Checkpoint(e.to_string()))?);
    }
    let vocab = Vocabulary::from_tokens(tokens)?;
    let shape = ModelShape {
        embedding_dim: get_u32(r)?,
        hidden_dim: get_u32(r)?,
        context: get_u32(r)?,
        max_positions: get_u32(r)?,
    };
    let alpha = AlphaParam::new(get_f64(r)?)?;
    let epsilon = get_f64(r)?;
    let r_len = checked_len(get_u32(r)?, "smoothing")?;
    let probs = (0..r_len).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
    let smoothing = SmoothingSpec::new(alpha, epsilon, TargetDistribution::general(probs)?)?;

    let n_tensors = get_u32(r)?;
    if n_tensors != Params::NAMES.len() {
        return Err(Error::Checkpoint(format!("expected 10 tensors, found {n_tensors}")));
    }
    let mut tensors = Vec::with_capacity(n_tensors);
    for _ in 0..n_tensors {
        let rows = get_u32(r)?;
        let cols = get_u32(r)?;
        let n = checked_len(rows.saturating_mul(cols), "tensor")?;
        let data = (0..n).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?;
        tensors.push(Tensor::from_data(rows, cols, data)?);
    }
    ToyModel::from_parts(vocab, shape, smoothing, Params::from_tensors(tensors)?)
}

pub fn save_checkpoint(model: &ToyModel, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_checkpoint(model, &mut w)?;
    w.flush().map_err(io_err)
}

pub fn load_checkpoint(path: &Path) -> Result<ToyModel> {
    let file = File::open(path).map_err(io_err)?;
    read_checkpoint(&mut BufReader::new(file))
}
