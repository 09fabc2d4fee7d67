use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Blackman,
    BlackmanHarris,
}

impl WindowKind {
    /// Cosine-series coefficients `a0 - a1 cos + a2 cos2 - a3 cos3`.
    fn coefficients(self) -> [f64; 4] {
        match self {
            WindowKind::Blackman => [0.42, 0.5, 0.08, 0.0],
            WindowKind::BlackmanHarris => [0.35875, 0.48829, 0.14128, 0.01168],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::Blackman => "blackman",
            WindowKind::BlackmanHarris => "blackman_harris",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "blackman" => Ok(WindowKind::Blackman),
            "blackman_harris" | "blackmanharris" => Ok(WindowKind::BlackmanHarris),
            other => Err(Error::param(format!("unknown window kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length: usize,
}

impl WindowSpec {
    pub fn new(kind: WindowKind, length: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::param(format!(
                "window length must be at least 2, got {length}"
            )));
        }
        Ok(Self { kind, length })
    }
}

/// Symmetric (even) window of `spec.length` points.
///
/// Only the first half is evaluated; the second half is its mirror image so
/// that `w[j] == w[len - 1 - j]` holds exactly. Endpoint round-off below zero
/// is clamped.
pub fn make_window(spec: WindowSpec) -> Result<Vec<f64>> {
    let WindowSpec { kind, length } = WindowSpec::new(spec.kind, spec.length)?;
    let [a0, a1, a2, a3] = kind.coefficients();
    let denom = (length - 1) as f64;
    let mut w = vec![0.0; length];
    for j in 0..length.div_ceil(2) {
        let phase = 2.0 * PI * j as f64 / denom;
        let v = a0 - a1 * phase.cos() + a2 * (2.0 * phase).cos() - a3 * (3.0 * phase).cos();
        let v = v.max(0.0);
        w[j] = v;
        w[length - 1 - j] = v;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blackman_three_points() {
        let w = make_window(WindowSpec::new(WindowKind::Blackman, 3).unwrap()).unwrap();
        assert_eq!(w.len(), 3);
        assert!(w[0].abs() < 1e-15 && w[2].abs() < 1e-15);
        assert!((w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_nonnegative() {
        for kind in [WindowKind::Blackman, WindowKind::BlackmanHarris] {
            for len in [2, 3, 10, 101, 7938] {
                let w = make_window(WindowSpec { kind, length: len }).unwrap();
                for j in 0..len {
                    assert_eq!(w[j], w[len - 1 - j]);
                    assert!(w[j] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn blackman_harris_sum_matches_direct_formula() {
        let len = 1024;
        let w = make_window(WindowSpec::new(WindowKind::BlackmanHarris, len).unwrap()).unwrap();
        // independent evaluation, no mirroring, no clamping
        let direct: f64 = (0..len)
            .map(|n| {
                let x = 2.0 * PI * n as f64 / (len - 1) as f64;
                0.35875 - 0.48829 * x.cos() + 0.14128 * (2.0 * x).cos() - 0.01168 * (3.0 * x).cos()
            })
            .sum();
        let ours: f64 = w.iter().sum();
        assert!(((ours - direct) / direct).abs() < 1e-9);
    }

    #[test]
    fn odd_blackman_harris_peaks_at_one() {
        let w = make_window(WindowSpec::new(WindowKind::BlackmanHarris, 101).unwrap()).unwrap();
        assert!((w[50] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_and_unknown() {
        assert!(WindowSpec::new(WindowKind::Blackman, 1).is_err());
        assert!("hamming".parse::<WindowKind>().is_err());
        assert_eq!(
            "blackman-harris".parse::<WindowKind>().unwrap(),
            WindowKind::BlackmanHarris
        );
    }
}
