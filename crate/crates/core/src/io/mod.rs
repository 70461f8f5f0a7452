//! File formats and synthetic data.

pub mod idx;
pub mod synthetic;
pub mod tensor_file;

pub use idx::{read_idx, read_idx_images, read_idx_labels, write_idx_images, write_idx_labels};
pub use synthetic::{SyntheticKind, SyntheticSpec};
pub use tensor_file::{decode_tensor, encode_tensor, read_tensor, write_tensor};

use crate::error::{Error, Result};

/// Little-endian cursor over a byte buffer that reports truncation as a format error.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8], what: &'static str) -> Self {
        Self { buf, pos: 0, what }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(e) => {
                let s = &self.buf[self.pos..e];
                self.pos = e;
                Ok(s)
            }
            None => Err(Error::Format(format!(
                "{} truncated at byte {} (needed {n} more)",
                self.what, self.pos
            ))),
        }
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32_le(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn u64_le(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn f64s_le(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| {
            Error::Format(format!("{} declares an impossible size", self.what))
        })?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

/// Reads `order` u64 mode lengths and checks that their product fits in memory terms.
pub(crate) fn read_dims(r: &mut Reader<'_>, order: usize) -> Result<Vec<usize>> {
    let mut dims = Vec::with_capacity(order);
    let mut total: usize = 1;
    for _ in 0..order {
        let d = usize::try_from(r.u64_le()?)
            .map_err(|_| Error::Format("mode length does not fit in memory".into()))?;
        if d == 0 {
            return Err(Error::Format("mode length 0".into()));
        }
        total = total
            .checked_mul(d)
            .ok_or_else(|| Error::Format("tensor size overflows".into()))?;
        dims.push(d);
    }
    Ok(dims)
}
