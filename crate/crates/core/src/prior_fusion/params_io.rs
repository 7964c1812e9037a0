//! Binary parameter files and loss-curve CSVs.
//!
//! Layout, all little-endian: magic `LTPF`, `u32` version (1), `u32` d_text,
//! `u32` hidden, `u32` d_map, `u64` seed, `f32` λ, then `W1` (row-major,
//! hidden × d_text), `b1`, `W2` (row-major, d_map × hidden), `b2` as `f32`.

use std::io::{Read, Write};

use ndarray::{Array1, Array2};

use super::{FusionError, FusionParams, MlpParams};

pub const PARAMS_MAGIC: &[u8; 4] = b"LTPF";
const VERSION: u32 = 1;

pub fn write_params<W: Write>(mut out: W, params: &FusionParams, seed: u64) -> Result<(), FusionError> {
    let m = &params.mlp;
    m.validate()?;
    out.write_all(PARAMS_MAGIC)?;
    for v in [VERSION, m.d_text() as u32, m.hidden() as u32, m.d_map() as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&seed.to_le_bytes())?;
    out.write_all(&(params.lambda as f32).to_le_bytes())?;
    let values = m.w1.iter().chain(&m.b1).chain(m.w2.iter()).chain(&m.b2);
    let mut buf = Vec::with_capacity(4 * (m.w1.len() + m.b1.len() + m.w2.len() + m.b2.len()));
    for v in values {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, FusionError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>, FusionError> {
    let mut buf = vec![0u8; n * 4];
    r.read_exact(&mut buf)
        .map_err(|e| FusionError::ParamsFormat(format!("truncated parameter block: {e}")))?;
    Ok(buf
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect())
}

/// Returns the parameters and the seed recorded in the header.
pub fn read_params<R: Read>(mut input: R) -> Result<(FusionParams, u64), FusionError> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != PARAMS_MAGIC {
        return Err(FusionError::ParamsFormat("bad magic".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(FusionError::ParamsFormat(format!("unsupported version {version}")));
    }
    let d_text = read_u32(&mut input)? as usize;
    let hidden = read_u32(&mut input)? as usize;
    let d_map = read_u32(&mut input)? as usize;
    if d_text == 0 || hidden == 0 || d_map == 0 {
        return Err(FusionError::ParamsFormat("zero dimension in header".into()));
    }
    let mut seed = [0u8; 8];
    input.read_exact(&mut seed)?;
    let seed = u64::from_le_bytes(seed);
    let lambda = read_f32s(&mut input, 1)?[0];
    let shape_err = |e: ndarray::ShapeError| FusionError::ParamsFormat(e.to_string());
    let w1 = Array2::from_shape_vec((hidden, d_text), read_f32s(&mut input, hidden * d_text)?).map_err(shape_err)?;
    let b1 = Array1::from(read_f32s(&mut input, hidden)?);
    let w2 = Array2::from_shape_vec((d_map, hidden), read_f32s(&mut input, d_map * hidden)?).map_err(shape_err)?;
    let b2 = Array1::from(read_f32s(&mut input, d_map)?);
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(FusionError::ParamsFormat(format!("{} trailing bytes", rest.len())));
    }
    let mlp = MlpParams { w1, b1, w2, b2 };
    mlp.validate()?;
    Ok((FusionParams { mlp, lambda }, seed))
}

/// `epoch,loss` with a header row, epochs numbered from 0.
pub fn write_loss_csv<W: Write>(mut out: W, losses: &[f64]) -> std::io::Result<()> {
    writeln!(out, "epoch,loss")?;
    for (i, l) in losses.iter().enumerate() {
        writeln!(out, "{i},{l}")?;
    }
    Ok(())
}
