//! Dense GTE tensor and its `GTE1` binary container.
//!
//! Layout: `u32` width, height and `D_max`, `f64` cell size, then
//! `width * height * (1 + 3 * D_max)` `f32` values with the channel index
//! varying fastest, then x, then y. All little-endian.

use crate::error::{Error, Result};
use crate::TENSOR_FORMAT;

const HEADER_LEN: usize = 4 + 4 * 3 + 8;

/// One `(edgeness, dx, dy)` group of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSlot {
    pub edgeness: f32,
    pub dx: f32,
    pub dy: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GteTensor {
    width: usize,
    height: usize,
    d_max: usize,
    lambda: f64,
    data: Vec<f32>,
}

impl GteTensor {
    pub fn zeros(width: usize, height: usize, d_max: usize, lambda: f64) -> Result<Self> {
        let len = element_count(width, height, d_max)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("cell size must be positive, got {lambda}")));
        }
        Ok(GteTensor {
            width,
            height,
            d_max,
            lambda,
            data: vec![0.0; len],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Meters per cell.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn channels(&self) -> usize {
        1 + 3 * self.d_max
    }

    pub fn same_shape(&self, other: &GteTensor) -> bool {
        self.width == other.width && self.height == other.height && self.d_max == other.d_max
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    fn offset(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y * self.width + x) * self.channels()
    }

    pub fn cell(&self, x: usize, y: usize) -> &[f32] {
        let o = self.offset(x, y);
        &self.data[o..o + self.channels()]
    }

    pub fn cell_mut(&mut self, x: usize, y: usize) -> &mut [f32] {
        let o = self.offset(x, y);
        let c = self.channels();
        &mut self.data[o..o + c]
    }

    #[inline]
    pub fn vertexness(&self, x: usize, y: usize) -> f32 {
        self.data[self.offset(x, y)]
    }

    /// Slot of sector `sector` in `1..=D_max`.
    pub fn edge(&self, x: usize, y: usize, sector: usize) -> EdgeSlot {
        let c = &self.cell(x, y)[3 * sector - 2..=3 * sector];
        EdgeSlot {
            edgeness: c[0],
            dx: c[1],
            dy: c[2],
        }
    }

    pub fn set_edge(&mut self, x: usize, y: usize, sector: usize, slot: EdgeSlot) {
        let c = &mut self.cell_mut(x, y)[3 * sector - 2..=3 * sector];
        c[0] = slot.edgeness;
        c[1] = slot.dx;
        c[2] = slot.dy;
    }

    /// Channel 0 and the first element of every edge group.
    pub fn is_probability_channel(channel: usize) -> bool {
        channel == 0 || (channel - 1) % 3 == 0
    }

    /// Probabilities in `[0, 1]`, vectors finite.
    pub fn check_ranges(&self) -> Result<()> {
        let c = self.channels();
        for (i, &v) in self.data.iter().enumerate() {
            let ch = i % c;
            let ok = if Self::is_probability_channel(ch) {
                (0.0..=1.0).contains(&v)
            } else {
                v.is_finite()
            };
            if !ok {
                let cell = i / c;
                return Err(Error::Format(format!(
                    "value {v} out of range at cell ({}, {}) channel {ch}",
                    cell % self.width,
                    cell / self.width
                )));
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(TENSOR_FORMAT.as_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.d_max as u32).to_le_bytes());
        out.extend_from_slice(&self.lambda.to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("truncated header: {} bytes", bytes.len())));
        }
        if &bytes[..4] != TENSOR_FORMAT.as_bytes() {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {TENSOR_FORMAT}",
                String::from_utf8_lossy(&bytes[..4])
            )));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let (width, height, d_max) = (u32_at(4), u32_at(8), u32_at(12));
        let lambda = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let len = element_count(width, height, d_max)?;
        let payload = len
            .checked_mul(4)
            .ok_or_else(|| Error::Format("dimension overflow".into()))?;
        let body = &bytes[HEADER_LEN..];
        if body.len() < payload {
            return Err(Error::Format(format!(
                "truncated payload: expected {payload} bytes, found {}",
                body.len()
            )));
        }
        if body.len() > payload {
            return Err(Error::Format(format!("{} trailing bytes after payload", body.len() - payload)));
        }
        let mut t = GteTensor::zeros(width, height, d_max, lambda).map_err(|e| Error::Format(e.to_string()))?;
        for (dst, chunk) in t.data.iter_mut().zip(body.chunks_exact(4)) {
            *dst = f32::from_le_bytes(chunk.try_into().unwrap());
        }
        Ok(t)
    }
}

pub fn save_tensor(tensor: &GteTensor) -> Vec<u8> {
    tensor.to_bytes()
}

pub fn load_tensor(bytes: &[u8]) -> Result<GteTensor> {
    GteTensor::from_bytes(bytes)
}

fn element_count(width: usize, height: usize, d_max: usize) -> Result<usize> {
    if d_max == 0 {
        return Err(Error::Format("D_max must be at least 1".into()));
    }
    width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(1 + 3 * d_max))
        .filter(|&n| n <= isize::MAX as usize / 4)
        .ok_or_else(|| Error::Format(format!("dimension overflow: {width} x {height} x D_max {d_max}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tensor_layout() {
        let t = GteTensor::zeros(4, 4, 6, 1.0).unwrap();
        let bytes = save_tensor(&t);
        assert_eq!(bytes.len(), HEADER_LEN + 304 * 4);
        assert_eq!(&bytes[..4], b"GTE1");
        assert!(bytes[HEADER_LEN..].iter().all(|&b| b == 0));
        assert_eq!(load_tensor(&bytes).unwrap(), t);
    }

    #[test]
    fn channel_order_is_fastest() {
        let mut t = GteTensor::zeros(3, 2, 1, 1.0).unwrap();
        t.cell_mut(1, 1)[2] = 7.0;
        let bytes = t.to_bytes();
        let idx = ((1 * 3 + 1) * 4 + 2) * 4 + HEADER_LEN;
        assert_eq!(f32::from_le_bytes(bytes[idx..idx + 4].try_into().unwrap()), 7.0);
    }

    #[test]
    fn rejects_bad_files() {
        let mut bytes = GteTensor::zeros(4, 4, 6, 1.0).unwrap().to_bytes();
        let mut bad = bytes.clone();
        bad[..4].copy_from_slice(b"XTE1");
        assert!(load_tensor(&bad).is_err());
        assert!(load_tensor(&bytes[..bytes.len() - 1]).is_err());
        assert!(load_tensor(&bytes[..10]).is_err());
        bytes.push(0);
        assert!(load_tensor(&bytes).is_err());
        let mut huge = GteTensor::zeros(1, 1, 1, 1.0).unwrap().to_bytes();
        huge[4..8].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(load_tensor(&huge), Err(Error::Format(m)) if m.contains("overflow")));
    }
}
