//! Additive noise at a prescribed signal-to-noise ratio.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_io::AudioClip;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    Pink,
    White,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Pink => "pink",
            NoiseKind::White => "white",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pink" => Ok(NoiseKind::Pink),
            "white" => Ok(NoiseKind::White),
            other => Err(Error::param(format!("unknown noise kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradeSpec {
    pub noise_kind: NoiseKind,
    /// `+inf` means no degradation.
    pub snr_db: f64,
    pub seed: u64,
}

impl DegradeSpec {
    pub fn pink(snr_db: f64, seed: u64) -> Self {
        Self {
            noise_kind: NoiseKind::Pink,
            snr_db,
            seed,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.snr_db == f64::INFINITY
    }
}

/// Zero-mean unit-variance Gaussian noise.
pub fn generate_white_noise(length: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..length)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect()
}

/// Unit-RMS noise with a `1/f` power spectrum.
///
/// White Gaussian noise is transformed, every bin is scaled by `1/√f`, the
/// DC bin is zeroed, and the result is transformed back and normalised.
pub fn generate_pink_noise(length: usize, f_s: f64, seed: u64) -> Vec<f64> {
    if length < 2 {
        return vec![0.0; length];
    }
    let mut planner = RealFftPlanner::<f64>::new();
    let r2c = planner.plan_fft_forward(length);
    let c2r = planner.plan_fft_inverse(length);

    let mut time = generate_white_noise(length, seed);
    let mut spec = r2c.make_output_vec();
    r2c.process(&mut time, &mut spec)
        .expect("buffers sized by plan");
    let bin_hz = f_s / length as f64;
    spec[0] = 0.0.into();
    for (k, c) in spec.iter_mut().enumerate().skip(1) {
        *c /= (k as f64 * bin_hz).sqrt();
    }
    if length.is_multiple_of(2) {
        let last = spec.len() - 1;
        spec[last].im = 0.0;
    }
    c2r.process(&mut spec, &mut time)
        .expect("buffers sized by plan");

    let mean = time.iter().sum::<f64>() / length as f64;
    time.iter_mut().for_each(|x| *x -= mean);
    let rms = (time.iter().map(|x| x * x).sum::<f64>() / length as f64).sqrt();
    if rms > 0.0 {
        time.iter_mut().for_each(|x| *x /= rms);
    }
    time
}

pub fn generate_noise(kind: NoiseKind, length: usize, f_s: f64, seed: u64) -> Vec<f64> {
    match kind {
        NoiseKind::Pink => generate_pink_noise(length, f_s, seed),
        NoiseKind::White => generate_white_noise(length, seed),
    }
}

/// A degraded clip together with the exact noise that was added.
#[derive(Debug, Clone, PartialEq)]
pub struct Degraded {
    pub clip: AudioClip,
    pub noise: Vec<f64>,
}

impl Degraded {
    /// `10 log10(P_signal / P_noise)` from the known addend.
    pub fn measured_snr_db(&self, original: &AudioClip) -> f64 {
        let pn = self.noise.iter().map(|x| x * x).sum::<f64>() / self.noise.len() as f64;
        10.0 * (original.power() / pn).log10()
    }
}

/// `clip + α·noise` with `α` chosen so the full-clip SNR equals `snr_db`.
pub fn degrade(clip: &AudioClip, spec: &DegradeSpec) -> Result<Degraded> {
    if spec.is_clean() {
        return Ok(Degraded {
            clip: clip.clone(),
            noise: vec![0.0; clip.len()],
        });
    }
    if !spec.snr_db.is_finite() {
        return Err(Error::param(format!(
            "SNR must be finite, got {}",
            spec.snr_db
        )));
    }
    let ps = clip.power();
    if ps <= 0.0 {
        return Err(Error::SilentSignal);
    }
    let mut noise = generate_noise(
        spec.noise_kind,
        clip.len(),
        clip.sample_rate() as f64,
        spec.seed,
    );
    let pn = noise.iter().map(|x| x * x).sum::<f64>() / noise.len() as f64;
    if pn <= 0.0 {
        return Err(Error::param("clip too short to carry noise"));
    }
    let alpha = (ps / (pn * 10f64.powf(spec.snr_db / 10.0))).sqrt();
    noise.iter_mut().for_each(|x| *x *= alpha);
    let mixed = clip
        .samples()
        .iter()
        .zip(&noise)
        .map(|(s, n)| s + n)
        .collect();
    Ok(Degraded {
        clip: AudioClip::new(mixed, clip.sample_rate())?,
        noise,
    })
}

pub fn mix_at_snr(clip: &AudioClip, spec: &DegradeSpec) -> Result<AudioClip> {
    degrade(clip, spec).map(|d| d.clip)
}
