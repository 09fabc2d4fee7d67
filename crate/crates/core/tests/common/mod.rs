//! Independent reference computations shared by the integration tests.
//! Nothing here goes through the library's transform code.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use realfft::RealFftPlanner;

/// Symmetric 4-term Blackman-Harris window evaluated point by point.
pub fn blackman_harris(len: usize) -> Vec<f64> {
    let d = (len - 1) as f64;
    (0..len)
        .map(|j| {
            let p = 2.0 * PI * j as f64 / d;
            let v =
                0.35875 - 0.48829 * p.cos() + 0.14128 * (2.0 * p).cos() - 0.01168 * (3.0 * p).cos();
            v.max(0.0)
        })
        .collect()
}

pub fn windowed(frame: &[f64], window: &[f64]) -> Vec<f64> {
    frame.iter().zip(window).map(|(x, w)| x * w).collect()
}

/// `r[n] = Σ_q x[q] x[(q+n) mod n_fft]` for `n = 0..=max_lag`, with `x`
/// zero-padded to `n_fft`.
pub fn circular_acf(x: &[f64], n_fft: usize, max_lag: usize) -> Vec<f64> {
    let mut padded = x.to_vec();
    padded.resize(n_fft, 0.0);
    (0..=max_lag)
        .map(|n| {
            let (head, tail) = padded.split_at(n_fft - n);
            let direct: f64 = head.iter().zip(&padded[n..]).map(|(a, b)| a * b).sum();
            let wrapped: f64 = tail.iter().zip(&padded[..n]).map(|(a, b)| a * b).sum();
            direct + wrapped
        })
        .collect()
}

/// `d[n] = Σ_q (x[q] - x[(q+n) mod n_fft])²`.
pub fn circular_difference(x: &[f64], n_fft: usize, max_lag: usize) -> Vec<f64> {
    let mut padded = x.to_vec();
    padded.resize(n_fft, 0.0);
    let sq = |(a, b): (&f64, &f64)| (a - b) * (a - b);
    (0..=max_lag)
        .map(|n| {
            let (head, tail) = padded.split_at(n_fft - n);
            let direct: f64 = head.iter().zip(&padded[n..]).map(sq).sum();
            let wrapped: f64 = tail.iter().zip(&padded[..n]).map(sq).sum();
            direct + wrapped
        })
        .collect()
}

/// Direct O(N²) DFT using a twiddle table.
pub struct NaiveDft {
    n: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl NaiveDft {
    pub fn new(n: usize) -> Self {
        let angle = |m: usize| 2.0 * PI * m as f64 / n as f64;
        Self {
            n,
            cos: (0..n).map(|m| angle(m).cos()).collect(),
            sin: (0..n).map(|m| angle(m).sin()).collect(),
        }
    }

    /// `|X[k]|` for `k = 0..=n/2` of the zero-padded input.
    pub fn magnitude_half(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                let mut idx = 0usize;
                for &v in x.iter().take(n) {
                    re += v * self.cos[idx];
                    im -= v * self.sin[idx];
                    idx += k;
                    if idx >= n {
                        idx -= n;
                    }
                }
                re.hypot(im)
            })
            .collect()
    }

    /// Inverse DFT of a real even spectrum given by its half `s[0..=n/2]`,
    /// evaluated at `0..=n/2`.
    pub fn inverse_even_half(&self, s: &[f64]) -> Vec<f64> {
        let n = self.n;
        let h = n / 2;
        (0..=h)
            .map(|t| {
                let mut acc = s[0] + if t % 2 == 0 { s[h] } else { -s[h] };
                let mut idx = t;
                for &v in &s[1..h] {
                    acc += 2.0 * v * self.cos[idx];
                    idx += t;
                    if idx >= n {
                        idx -= n;
                    }
                }
                acc / n as f64
            })
            .collect()
    }
}

/// `‖a - b‖₂ / ‖b‖₂`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

pub fn relu(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x.max(0.0)).collect()
}

pub fn uniform_frame(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Welch PSD (Hann segments, 50 % overlap) followed by a least-squares fit
/// of `log10 PSD` against `log10 f` over `[f_lo, f_hi]`.
pub fn welch_slope(x: &[f64], fs: f64, seg: usize, f_lo: f64, f_hi: f64) -> f64 {
    let hann: Vec<f64> = (0..seg)
        .map(|j| 0.5 - 0.5 * (2.0 * PI * j as f64 / seg as f64).cos())
        .collect();
    let fft = RealFftPlanner::<f64>::new().plan_fft_forward(seg);
    let mut psd = vec![0.0; seg / 2 + 1];
    let mut buf = fft.make_input_vec();
    let mut spec = fft.make_output_vec();
    let mut start = 0;
    while start + seg <= x.len() {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = x[start + j] * hann[j];
        }
        fft.process(&mut buf, &mut spec).unwrap();
        for (p, c) in psd.iter_mut().zip(&spec) {
            *p += c.norm_sqr();
        }
        start += seg / 2;
    }
    let (mut xs, mut ys) = (vec![], vec![]);
    for (k, p) in psd.iter().enumerate() {
        let f = k as f64 * fs / seg as f64;
        if f >= f_lo && f <= f_hi {
            xs.push(f.log10());
            ys.push(p.log10());
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
