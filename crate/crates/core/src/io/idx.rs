//! IDX image and label files (the MNIST distribution format).
//!
//! Images: big-endian magic `0x00000803`, sample count, rows, cols, then unsigned
//! bytes. Labels: magic `0x00000801`, count, then unsigned bytes. Images are
//! returned as a `rows x cols x samples` tensor with pixels scaled to `[0, 1]`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
        .ok_or_else(|| Error::Format(format!("{what}: header truncated")))
}

/// Decodes an IDX image file into a `rows x cols x samples` tensor.
pub fn decode_idx_images(bytes: &[u8]) -> Result<DenseTensor> {
    let magic = be_u32(bytes, 0, "idx images")?;
    if magic != IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "idx images: magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"
        )));
    }
    let n = be_u32(bytes, 4, "idx images")? as usize;
    let rows = be_u32(bytes, 8, "idx images")? as usize;
    let cols = be_u32(bytes, 12, "idx images")? as usize;
    let pixels = &bytes[16..];
    let per = rows * cols;
    if n == 0 || per == 0 {
        return Err(Error::Format("idx images: empty dimension".into()));
    }
    if pixels.len() != n * per {
        return Err(Error::Format(format!(
            "idx images: {} pixel bytes, header declares {}",
            pixels.len(),
            n * per
        )));
    }
    let mut data = vec![0.0; n * per];
    for (s, img) in pixels.chunks_exact(per).enumerate() {
        for (p, &v) in img.iter().enumerate() {
            data[p * n + s] = v as f64 / 255.0;
        }
    }
    DenseTensor::new(vec![rows, cols, n], data)
}

pub fn decode_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let magic = be_u32(bytes, 0, "idx labels")?;
    if magic != LABELS_MAGIC {
        return Err(Error::Format(format!(
            "idx labels: magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"
        )));
    }
    let n = be_u32(bytes, 4, "idx labels")? as usize;
    let body = &bytes[8..];
    if body.len() != n {
        return Err(Error::Format(format!(
            "idx labels: {} label bytes, header declares {n}",
            body.len()
        )));
    }
    Ok(body.iter().map(|&b| b as usize).collect())
}

pub fn read_idx_images(path: impl AsRef<Path>) -> Result<DenseTensor> {
    decode_idx_images(&fs::read(path)?)
}

pub fn read_idx_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    decode_idx_labels(&fs::read(path)?)
}

/// Reads a matched image/label pair, checking that the counts agree.
pub fn read_idx(
    images: impl AsRef<Path>,
    labels: impl AsRef<Path>,
) -> Result<(DenseTensor, Vec<usize>)> {
    let x = read_idx_images(images)?;
    let y = read_idx_labels(labels)?;
    let n = x.shape()[2];
    if y.len() != n {
        return Err(Error::Format(format!(
            "{n} images but {} labels",
            y.len()
        )));
    }
    Ok((x, y))
}

/// Encodes `rows x cols x samples` pixel bytes (sample-major input) as an IDX image file.
pub fn encode_idx_images(rows: usize, cols: usize, images: &[Vec<u8>]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    for d in [images.len(), rows, cols] {
        let d = u32::try_from(d)
            .map_err(|_| Error::InvalidArgument("idx dimension exceeds u32".into()))?;
        out.extend_from_slice(&d.to_be_bytes());
    }
    for img in images {
        if img.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "image has {} pixels, expected {}",
                img.len(),
                rows * cols
            )));
        }
        out.extend_from_slice(img);
    }
    Ok(out)
}

pub fn encode_idx_labels(labels: &[u8]) -> Result<Vec<u8>> {
    let n = u32::try_from(labels.len())
        .map_err(|_| Error::InvalidArgument("too many labels".into()))?;
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&n.to_be_bytes());
    out.extend_from_slice(labels);
    Ok(out)
}

pub fn write_idx_images(
    path: impl AsRef<Path>,
    rows: usize,
    cols: usize,
    images: &[Vec<u8>],
) -> Result<()> {
    fs::write(path, encode_idx_images(rows, cols, images)?)?;
    Ok(())
}

pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    fs::write(path, encode_idx_labels(labels)?)?;
    Ok(())
}
