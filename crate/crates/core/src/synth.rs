//! Additive synthesis of harmonic notes, used to build test corpora with a
//! known ground truth.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::signal_io::{AudioClip, NoteAnnotation};

pub fn midi_to_hz(pitch: f64) -> f64 {
    440.0 * 2f64.powf((pitch - 69.0) / 12.0)
}

/// One harmonic note: partials at `h · f0` with the given amplitudes.
/// `pitch` is the ground-truth label, `P(f0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthNote {
    pub pitch: u8,
    pub f0: f64,
    pub onset: f64,
    pub offset: f64,
    pub partials: Vec<(u32, f64)>,
}

impl SynthNote {
    /// Harmonics `h` in `harmonics`, amplitude `decay^(h-1)`.
    pub fn harmonic(
        pitch: u8,
        onset: f64,
        offset: f64,
        harmonics: impl IntoIterator<Item = u32>,
        decay: f64,
    ) -> Self {
        Self::with_f0(midi_to_hz(pitch as f64), onset, offset, harmonics, decay)
    }

    /// Like [`harmonic`](Self::harmonic) at an arbitrary fundamental; the
    /// label is the nearest MIDI pitch.
    pub fn with_f0(
        f0: f64,
        onset: f64,
        offset: f64,
        harmonics: impl IntoIterator<Item = u32>,
        decay: f64,
    ) -> Self {
        Self {
            pitch: (69.0 + 12.0 * (f0 / 440.0).log2())
                .round()
                .clamp(0.0, 127.0) as u8,
            f0,
            onset,
            offset,
            partials: harmonics
                .into_iter()
                .map(|h| (h, decay.powi(h as i32 - 1)))
                .collect(),
        }
    }

    pub fn annotation(&self) -> NoteAnnotation {
        NoteAnnotation {
            onset: self.onset,
            offset: self.offset,
            pitch: self.pitch,
        }
    }
}

/// Render notes with 10 ms raised-cosine fades; partial phases are drawn
/// from `seed`. Partials at or above Nyquist are skipped.
pub fn render(
    notes: &[SynthNote],
    duration: f64,
    sample_rate: u32,
    seed: u64,
) -> Result<AudioClip> {
    let fs = sample_rate as f64;
    let len = (duration * fs).round() as usize;
    let mut out = vec![0.0; len];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fade = (0.01 * fs) as usize;
    for note in notes {
        let f0 = note.f0;
        let start = ((note.onset * fs).round() as usize).min(len);
        let end = ((note.offset * fs).round() as usize).min(len);
        let n = end.saturating_sub(start);
        for &(h, amp) in &note.partials {
            let phase = rng.random_range(0.0..2.0 * PI);
            let f = h as f64 * f0;
            if f >= fs / 2.0 {
                continue;
            }
            let w = 2.0 * PI * f / fs;
            for (j, y) in out[start..end].iter_mut().enumerate() {
                let edge = j.min(n - 1 - j);
                let env = if edge < fade {
                    0.5 - 0.5 * (PI * edge as f64 / fade as f64).cos()
                } else {
                    1.0
                };
                *y += amp * env * (w * (start + j) as f64 + phase).sin();
            }
        }
    }
    let peak = out.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        out.iter_mut().for_each(|x| *x *= 0.9 / peak);
    }
    AudioClip::new(out, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midi_conversion() {
        assert!((midi_to_hz(69.0) - 440.0).abs() < 1e-12);
        assert!((midi_to_hz(45.0) - 110.0).abs() < 1e-9);
    }

    #[test]
    fn renders_normalised_audio() {
        let note = SynthNote::harmonic(57, 0.1, 0.5, 1..=4, 0.7);
        let clip = render(&[note], 0.6, 8000, 1).unwrap();
        assert_eq!(clip.len(), 4800);
        let peak = clip.samples().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!((peak - 0.9).abs() < 1e-12);
        assert!(clip.samples()[..800].iter().all(|&x| x == 0.0));
    }
}
