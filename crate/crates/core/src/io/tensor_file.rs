//! `TNSR` tensor files.
//!
//! Layout: magic `TNSR`, version byte (1), order byte, each mode length as a
//! little-endian u64, then the elements as little-endian f64 with the last index
//! varying fastest.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{read_dims, Reader};
use crate::tensor::DenseTensor;

pub const MAGIC: &[u8; 4] = b"TNSR";
pub const VERSION: u8 = 1;

pub fn encode_tensor(t: &DenseTensor) -> Result<Vec<u8>> {
    let order = u8::try_from(t.order())
        .map_err(|_| Error::InvalidArgument(format!("order {} exceeds 255", t.order())))?;
    let mut out = Vec::with_capacity(6 + 8 * t.order() + 8 * t.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(order);
    for &d in t.shape() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &x in t.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_tensor(bytes: &[u8]) -> Result<DenseTensor> {
    let mut r = Reader::new(bytes, "tensor file");
    if r.take(4)? != MAGIC {
        return Err(Error::Format("not a tensor file (bad magic)".into()));
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported tensor file version {version}")));
    }
    let order = r.u8()? as usize;
    if order == 0 {
        return Err(Error::Format("tensor order 0".into()));
    }
    let shape = read_dims(&mut r, order)?;
    let n: usize = shape.iter().product();
    if r.remaining() != n * 8 {
        return Err(Error::Format(format!(
            "payload has {} bytes, shape {shape:?} needs {}",
            r.remaining(),
            n * 8
        )));
    }
    let data = r.f64s_le(n)?;
    DenseTensor::new(shape, data)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    fs::write(path, encode_tensor(t)?)?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    decode_tensor(&fs::read(path)?)
}
