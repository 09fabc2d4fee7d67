use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskDomain {
    Frequency,
    Quefrency,
}

/// Diagonal 0/1 mask that keeps indices strictly above `cutoff_index`.
///
/// Features are stored as the non-redundant half `0..=n/2` of an even
/// vector, so zeroing the low indices of that half zeroes the mirrored high
/// indices of the full vector as well.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HighPassMask {
    pub cutoff_index: usize,
    pub length: usize,
    pub domain: MaskDomain,
}

impl HighPassMask {
    pub fn new(cutoff_index: usize, length: usize, domain: MaskDomain) -> Self {
        Self {
            cutoff_index,
            length,
            domain,
        }
    }

    #[inline]
    pub fn weight(&self, l: usize) -> f64 {
        if l > self.cutoff_index {
            1.0
        } else {
            0.0
        }
    }

    pub fn apply_in_place(&self, v: &mut [f64]) -> Result<()> {
        if v.len() != self.length {
            return Err(Error::SizeMismatch {
                expected: self.length,
                actual: v.len(),
            });
        }
        let end = (self.cutoff_index + 1).min(v.len());
        v[..end].fill(0.0);
        Ok(())
    }
}

pub fn apply_mask(v: &[f64], mask: HighPassMask) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    mask.apply_in_place(&mut out)?;
    Ok(out)
}

/// Additive bias vector. The pipeline uses all zeros; the YIN salience uses
/// a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Bias {
    pub values: Vec<f64>,
}

impl Bias {
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    pub fn constant(value: f64, len: usize) -> Self {
        Self {
            values: vec![value; len],
        }
    }

    pub fn add_to(&self, v: &mut [f64]) -> Result<()> {
        if v.len() != self.values.len() {
            return Err(Error::SizeMismatch {
                expected: self.values.len(),
                actual: v.len(),
            });
        }
        v.iter_mut().zip(&self.values).for_each(|(x, b)| *x += b);
        Ok(())
    }
}

// Products such as 27.5 * 8192 / 44100 are not exact in binary; nudge by a
// relative ulp-scale amount so exact ratios do not floor one index low.
fn floor_index(x: f64) -> usize {
    (x * (1.0 + 1e-12)).floor() as usize
}

/// `k_c = floor(f_c · n_fft / f_s)`.
pub fn cutoff_to_frequency_index(f_c: f64, n_fft: usize, f_s: f64) -> Result<usize> {
    if !(f_c > 0.0 && f_c < f_s / 2.0) {
        return Err(Error::param(format!(
            "cutoff frequency {f_c} Hz must lie in (0, {}) Hz",
            f_s / 2.0
        )));
    }
    Ok(floor_index(f_c * n_fft as f64 / f_s))
}

/// `n_c = floor(q_c · f_s)`.
pub fn cutoff_to_quefrency_index(q_c: f64, f_s: f64) -> Result<usize> {
    if !(q_c.is_finite() && q_c > 0.0) {
        return Err(Error::param(format!(
            "cutoff quefrency must be positive, got {q_c}"
        )));
    }
    Ok(floor_index(q_c * f_s))
}
