use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use realfft::num_complex::Complex;
use realfft::RealFftPlanner;

use crate::error::{Error, Result};

/// Mono audio in `[-1, 1]` at an integer sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyAudio);
        }
        if sample_rate == 0 {
            return Err(Error::InvalidAudio("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidAudio(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Mean squared amplitude.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(
            self.samples.iter().map(|x| x * gain).collect(),
            self.sample_rate,
        )
    }
}

/// Read a PCM WAV file (16/24-bit integer or 32-bit float, mono or stereo).
/// Stereo is averaged to mono.
pub fn load_audio(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut reader = WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if !(1..=2).contains(&channels) {
        return Err(Error::UnsupportedEncoding(format!(
            "{channels} channels (only mono and stereo are supported)"
        )));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (16 | 24)) => {
            let scale = 1.0 / (1_i64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(wav_err)?
        }
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (format, bits) => {
            return Err(Error::UnsupportedEncoding(format!(
                "{bits}-bit {format:?} PCM"
            )));
        }
    };
    let samples: Vec<f64> = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(2)
            .map(|pair| 0.5 * (pair[0] + pair[1]))
            .collect()
    };
    AudioClip::new(samples, spec.sample_rate)
}

/// Write a mono 32-bit float WAV. Samples are not clipped.
pub fn save_wav_f32(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in &clip.samples {
        writer.write_sample(s as f32).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

/// Band-limited resampling by spectral zero-padding / truncation of the
/// whole-clip DFT. Identity when the rates already match.
pub fn resample_if_needed(clip: &AudioClip, target_rate: u32) -> Result<AudioClip> {
    if target_rate == 0 {
        return Err(Error::param("target sample rate must be positive"));
    }
    if clip.sample_rate == target_rate {
        return Ok(clip.clone());
    }
    let in_len = clip.len();
    let out_len =
        ((in_len as f64 * target_rate as f64 / clip.sample_rate as f64).round() as usize).max(1);

    let mut planner = RealFftPlanner::<f64>::new();
    let r2c = planner.plan_fft_forward(in_len);
    let c2r = planner.plan_fft_inverse(out_len);

    let mut input = clip.samples.clone();
    let mut spectrum = r2c.make_output_vec();
    r2c.process(&mut input, &mut spectrum)
        .expect("buffers sized by plan");

    let mut resampled = c2r.make_input_vec();
    let shared = spectrum.len().min(resampled.len());
    resampled[..shared].copy_from_slice(&spectrum[..shared]);

    // An even-length source's Nyquist bin stands for both +/- frequencies;
    // once it is no longer the Nyquist bin of the output it must be halved.
    if in_len.is_multiple_of(2) && out_len > in_len {
        resampled[in_len / 2] *= 0.5;
    }
    resampled[0].im = 0.0;
    if out_len.is_multiple_of(2) {
        let last = resampled.len() - 1;
        resampled[last] = Complex::new(resampled[last].re, 0.0);
    }

    let mut output = c2r.make_output_vec();
    c2r.process(&mut resampled, &mut output)
        .expect("buffers sized by plan");
    let scale = 1.0 / in_len as f64;
    output.iter_mut().for_each(|x| *x *= scale);
    AudioClip::new(output, target_rate)
}
