use std::sync::Arc;

use realfft::num_complex::Complex;
use realfft::{RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// A planned `n`-point real-input DFT.
///
/// Every transform in the layered features acts on either a real frame or a
/// real even-symmetric vector, so a single real-to-complex plan covers all
/// three layers. The plan is immutable and shareable across threads; mutable
/// buffers live in a per-thread [`FourierScratch`].
#[derive(Clone)]
pub struct FourierPlan {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
}

pub struct FourierScratch {
    time: Vec<f64>,
    spec: Vec<Complex<f64>>,
    work: Vec<Complex<f64>>,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("n", &self.n).finish()
    }
}

impl FourierPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!(
                "transform size must be >= 2, got {n}"
            )));
        }
        let r2c = RealFftPlanner::<f64>::new().plan_fft_forward(n);
        Ok(Self { n, r2c })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of non-redundant bins, `n/2 + 1`.
    pub fn half_len(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn make_scratch(&self) -> FourierScratch {
        FourierScratch {
            time: self.r2c.make_input_vec(),
            spec: self.r2c.make_output_vec(),
            work: self.r2c.make_scratch_vec(),
        }
    }

    fn run(&self, s: &mut FourierScratch) {
        // Buffer lengths come from the plan itself, so this cannot fail.
        self.r2c
            .process_with_scratch(&mut s.time, &mut s.spec, &mut s.work)
            .expect("buffers sized by plan");
    }

    /// `|DFT(window · frame)|` on bins `0..=n/2`, the frame zero-padded to `n`.
    pub fn windowed_magnitude(
        &self,
        frame: &[f64],
        window: &[f64],
        out: &mut [f64],
        s: &mut FourierScratch,
    ) -> Result<()> {
        if frame.len() != window.len() {
            return Err(Error::SizeMismatch {
                expected: window.len(),
                actual: frame.len(),
            });
        }
        if frame.len() > self.n {
            return Err(Error::param(format!(
                "frame of {} samples exceeds transform size {}",
                frame.len(),
                self.n
            )));
        }
        check_len(out.len(), self.half_len())?;
        for (t, (&x, &w)) in s.time.iter_mut().zip(frame.iter().zip(window)) {
            *t = x * w;
        }
        s.time[frame.len()..].fill(0.0);
        self.run(s);
        for (o, c) in out.iter_mut().zip(&s.spec) {
            *o = c.norm();
        }
        Ok(())
    }

    /// Forward DFT of the even-symmetric length-`n` vector whose first
    /// `n/2 + 1` entries are `half`. The result is real and even, so only its
    /// first half is written. The inverse DFT of the same vector is this
    /// result divided by `n`.
    pub fn even_dft(&self, half: &[f64], out: &mut [f64], s: &mut FourierScratch) -> Result<()> {
        check_len(half.len(), self.half_len())?;
        check_len(out.len(), self.half_len())?;
        let n = self.n;
        s.time[..half.len()].copy_from_slice(half);
        for k in half.len()..n {
            s.time[k] = half[n - k];
        }
        self.run(s);
        for (o, c) in out.iter_mut().zip(&s.spec) {
            *o = c.re;
        }
        Ok(())
    }
}

fn check_len(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::SizeMismatch { expected, actual });
    }
    Ok(())
}

/// Full-length magnitude spectrum `|DFT(w·x)|` with `x` zero-padded to `n_fft`.
///
/// The output is conjugate-symmetric by construction: `out[k] == out[n_fft-k]`.
pub fn dft_magnitude(frame: &[f64], window: &[f64], n_fft: usize) -> Result<Vec<f64>> {
    let plan = FourierPlan::new(n_fft)?;
    let mut scratch = plan.make_scratch();
    let mut half = vec![0.0; plan.half_len()];
    plan.windowed_magnitude(frame, window, &mut half, &mut scratch)?;
    Ok(mirror(&half, n_fft))
}

/// Inverse DFT of a real even-symmetric vector.
///
/// Rejects inputs whose asymmetry `max |v[k] - v[n-k]|` exceeds
/// `1e-9 · max |v|`. The (vanishing) imaginary part is discarded.
pub fn inverse_dft_real(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tolerance = 1e-9 * peak;
    let residue = (1..n).fold(0.0_f64, |m, k| m.max((v[k] - v[n - k]).abs()));
    if residue > tolerance {
        return Err(Error::NotSymmetric { residue, tolerance });
    }
    let plan = FourierPlan::new(n)?;
    let mut scratch = plan.make_scratch();
    let mut half = vec![0.0; plan.half_len()];
    plan.even_dft(&v[..plan.half_len()], &mut half, &mut scratch)?;
    let scale = 1.0 / n as f64;
    half.iter_mut().for_each(|x| *x *= scale);
    Ok(mirror(&half, n))
}

/// Expand the first `n/2 + 1` entries of an even vector to full length.
pub(crate) fn mirror(half: &[f64], n: usize) -> Vec<f64> {
    let mut full = Vec::with_capacity(n);
    full.extend_from_slice(&half[..half.len().min(n)]);
    for k in full.len()..n {
        full.push(half[n - k]);
    }
    full
}
