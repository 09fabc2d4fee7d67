//! Semitone pitch profiles, pitch selection and the frame-level transcriber.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roll::{PianoRoll, PITCH_COUNT};
use crate::salience::{
    AnalysisConfig, LayerConfig, QuefrencyFeature, SalienceExtractor, SpectralFeature,
};
use crate::signal_io::{frame_stream, resample_if_needed, AudioClip};

/// Values at or below this fraction of a profile's maximum count as zero.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// `69 + round(12 log2(f / 440))`, rounding half away from zero.
pub fn pitch_number(f: f64) -> Result<i32> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::param(format!("frequency must be positive, got {f}")));
    }
    Ok(pitch_of(f))
}

#[inline]
fn pitch_of(f: f64) -> i32 {
    69 + (12.0 * (f / 440.0).log2()).round() as i32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    FrequencyDomain,
    QuefrencyDomain,
}

/// Max-pooled salience per MIDI pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchProfile {
    pub values: Vec<f64>,
    pub source: ProfileSource,
}

impl PitchProfile {
    pub fn zeros(source: ProfileSource) -> Self {
        Self {
            values: vec![0.0; PITCH_COUNT],
            source,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Per-pitch positivity with the relative floor applied.
    pub fn support(&self) -> [bool; PITCH_COUNT] {
        let floor = POSITIVITY_FLOOR * self.max();
        let mut out = [false; PITCH_COUNT];
        for (o, &v) in out.iter_mut().zip(&self.values) {
            *o = v > floor && v > 0.0;
        }
        out
    }
}

/// Bin → pitch and lag → pitch tables for one `(f_s, n_fft)` pair.
#[derive(Debug, Clone)]
pub struct PitchPooler {
    bin_pitch: Vec<Option<u8>>,
    lag_pitch: Vec<Option<u8>>,
}

fn midi(p: i32) -> Option<u8> {
    (0..PITCH_COUNT as i32).contains(&p).then_some(p as u8)
}

impl PitchPooler {
    /// `half_len` is the number of stored bins/lags, `n_fft/2 + 1`.
    pub fn new(sample_rate: f64, n_fft: usize, half_len: usize) -> Self {
        let bin_hz = sample_rate / n_fft as f64;
        let bin_pitch = (0..half_len)
            .map(|k| {
                if k == 0 {
                    None
                } else {
                    midi(pitch_of(k as f64 * bin_hz))
                }
            })
            .collect();
        let lag_pitch = (0..half_len)
            .map(|n| {
                if n == 0 {
                    None
                } else {
                    midi(pitch_of(sample_rate / n as f64))
                }
            })
            .collect();
        Self {
            bin_pitch,
            lag_pitch,
        }
    }

    pub fn for_extractor(ex: &SalienceExtractor) -> Self {
        Self::new(ex.sample_rate(), ex.n_fft(), ex.half_len())
    }

    pub fn bin_pitch(&self, k: usize) -> Option<u8> {
        self.bin_pitch.get(k).copied().flatten()
    }

    pub fn lag_pitch(&self, n: usize) -> Option<u8> {
        self.lag_pitch.get(n).copied().flatten()
    }

    fn pool(map: &[Option<u8>], values: &[f64], source: ProfileSource) -> PitchProfile {
        let mut profile = PitchProfile::zeros(source);
        for (&p, &v) in map.iter().zip(values) {
            if let Some(p) = p {
                let slot = &mut profile.values[p as usize];
                if v > *slot {
                    *slot = v;
                }
            }
        }
        profile
    }

    pub fn frequency_profile(&self, values: &[f64]) -> PitchProfile {
        Self::pool(&self.bin_pitch, values, ProfileSource::FrequencyDomain)
    }

    pub fn quefrency_profile(&self, values: &[f64]) -> PitchProfile {
        Self::pool(&self.lag_pitch, values, ProfileSource::QuefrencyDomain)
    }
}

/// `profile[p] = max z[k]` over bins `k ≥ 1` with `P(k · bin_hz) = p`.
pub fn pool_frequency_profile(z: &SpectralFeature) -> PitchProfile {
    let fs = z.bin_hz * z.n_fft as f64;
    PitchPooler::new(fs, z.n_fft, z.values.len()).frequency_profile(&z.values)
}

/// `profile[p] = max z[n]` over lags `n ≥ 1` with `P(f_s / n) = p`.
pub fn pool_quefrency_profile(z: &QuefrencyFeature) -> PitchProfile {
    let fs = 1.0 / z.lag_seconds;
    PitchPooler::new(fs, z.n_fft, z.values.len()).quefrency_profile(&z.values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionParams {
    /// Semitone offsets of the harmonic series (subharmonics mirror them).
    pub harmonic_offsets: Vec<u8>,
    /// Sparsity parameter δ.
    pub delta: f64,
    pub median_frames: usize,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            harmonic_offsets: vec![0, 12, 19, 24],
            delta: 0.8,
            median_frames: 25,
        }
    }
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::param(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if self.median_frames.is_multiple_of(2) {
            return Err(Error::param(format!(
                "median filter length must be odd, got {}",
                self.median_frames
            )));
        }
        if self.harmonic_offsets.is_empty() {
            return Err(Error::param("harmonic offsets must not be empty"));
        }
        Ok(())
    }

    /// Width of the sparsity window, `max offset` semitones above/below.
    fn span(&self) -> usize {
        self.harmonic_offsets.iter().copied().max().unwrap_or(0) as usize
    }
}

/// Pitch selection for one frame.
///
/// `p` is active iff every harmonic `p + o` has positive frequency-profile
/// salience, every subharmonic `p - o` has positive quefrency-profile
/// salience, and at least one of the two profiles is sparse (ℓ0 count below
/// `(span + 1)·δ`) over the window on its side of `p`. Offsets leaving
/// `0..=127` fail; sparsity windows are truncated at the axis ends.
pub fn select_pitches(
    freq: &PitchProfile,
    quef: &PitchProfile,
    params: &SelectionParams,
    pitch_range: (u8, u8),
) -> Vec<bool> {
    let f_on = freq.support();
    let q_on = quef.support();
    let span = params.span();
    let limit = (span + 1) as f64 * params.delta;

    let mut out = vec![false; PITCH_COUNT];
    let (low, high) = (
        pitch_range.0 as usize,
        (pitch_range.1 as usize).min(PITCH_COUNT - 1),
    );
    for (p, slot) in out.iter_mut().enumerate().take(high + 1).skip(low) {
        let harmonics = params
            .harmonic_offsets
            .iter()
            .all(|&o| f_on.get(p + o as usize).copied().unwrap_or(false));
        if !harmonics {
            continue;
        }
        let subharmonics = params
            .harmonic_offsets
            .iter()
            .all(|&o| p.checked_sub(o as usize).is_some_and(|q| q_on[q]));
        if !subharmonics {
            continue;
        }
        let up = f_on[p..=(p + span).min(PITCH_COUNT - 1)]
            .iter()
            .filter(|&&b| b)
            .count();
        let down = q_on[p.saturating_sub(span)..=p]
            .iter()
            .filter(|&&b| b)
            .count();
        *slot = (up as f64) < limit || (down as f64) < limit;
    }
    out
}

/// Binary median (majority vote) along time with inactive edge padding.
pub fn median_smooth(roll: &PianoRoll, median_frames: usize) -> Result<PianoRoll> {
    if median_frames.is_multiple_of(2) {
        return Err(Error::param(format!(
            "median filter length must be odd, got {median_frames}"
        )));
    }
    let half = median_frames / 2;
    let n = roll.n_frames();
    let mut out = PianoRoll::new(roll.frame_times().to_vec());
    for p in 0..PITCH_COUNT {
        let row = roll.row(p);
        if !row.contains(&true) {
            continue;
        }
        // running count over [i - half, i + half]
        let mut count = row[..half.min(n)].iter().filter(|&&b| b).count();
        let dst = out.row_mut(p);
        for i in 0..n {
            if i + half < n && row[i + half] {
                count += 1;
            }
            if i > half && row[i - half - 1] {
                count -= 1;
            }
            dst[i] = count > half;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// Frequency profile from the GCoS layer.
    #[default]
    Gcos,
    /// Frequency profile from the magnitude spectrum.
    SpectrumBaseline,
}

impl FeatureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Gcos => "gcos",
            FeatureMode::SpectrumBaseline => "spectrum_baseline",
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcos" => Ok(FeatureMode::Gcos),
            "spectrum_baseline" | "spectrum" | "baseline" => Ok(FeatureMode::SpectrumBaseline),
            other => Err(Error::param(format!("unknown feature mode `{other}`"))),
        }
    }
}

/// Everything `transcribe` needs besides the audio.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranscribeConfig {
    pub analysis: AnalysisConfig,
    pub layers: LayerConfig,
    pub selection: SelectionParams,
    pub pitch_range: (u8, u8),
    pub mode: FeatureMode,
}

impl TranscribeConfig {
    pub fn new(mode: FeatureMode) -> Self {
        Self {
            pitch_range: crate::eval::ALL_RANGE,
            mode,
            ..Default::default()
        }
    }
}

/// Frame-parallel transcriber for a fixed configuration.
#[derive(Debug, Clone)]
pub struct Transcriber {
    config: TranscribeConfig,
    extractor: SalienceExtractor,
    pooler: PitchPooler,
}

impl Transcriber {
    pub fn new(config: TranscribeConfig) -> Result<Self> {
        config.selection.validate()?;
        let (low, high) = config.pitch_range;
        if low > high || high as usize >= PITCH_COUNT {
            return Err(Error::param(format!("invalid pitch range [{low}, {high}]")));
        }
        let rate = config.analysis.sample_rate;
        let extractor = SalienceExtractor::new(rate, &config.analysis, &config.layers)?;
        let pooler = PitchPooler::for_extractor(&extractor);
        Ok(Self {
            config,
            extractor,
            pooler,
        })
    }

    pub fn config(&self) -> &TranscribeConfig {
        &self.config
    }

    pub fn extractor(&self) -> &SalienceExtractor {
        &self.extractor
    }

    /// The two pitch profiles the selection rules see for one frame.
    pub fn frame_profiles(
        &self,
        frame: &[f64],
        scratch: &mut crate::dsp::FourierScratch,
    ) -> Result<(PitchProfile, PitchProfile)> {
        let f = self.extractor.extract_with(frame, scratch)?;
        let spectral = match self.config.mode {
            FeatureMode::Gcos => &f.z3.values,
            FeatureMode::SpectrumBaseline => &f.z1.values,
        };
        Ok((
            self.pooler.frequency_profile(spectral),
            self.pooler.quefrency_profile(&f.z2.values),
        ))
    }

    /// Unsmoothed per-frame detections.
    pub fn raw_roll(&self, clip: &AudioClip) -> Result<PianoRoll> {
        let clip = resample_if_needed(clip, self.config.analysis.sample_rate)?;
        let frames = frame_stream(
            &clip,
            self.config.analysis.window_seconds,
            self.config.analysis.hop_seconds,
        )?;
        let columns = (0..frames.len())
            .into_par_iter()
            .map_init(
                || {
                    (
                        self.extractor.make_scratch(),
                        vec![0.0; frames.window_len()],
                    )
                },
                |(scratch, buf), i| {
                    frames.fill(i, buf);
                    let (freq, quef) = self.frame_profiles(buf, scratch)?;
                    Ok(select_pitches(
                        &freq,
                        &quef,
                        &self.config.selection,
                        self.config.pitch_range,
                    ))
                },
            )
            .collect::<Result<Vec<_>>>()?;
        PianoRoll::from_columns(frames.frame_times(), &columns)
    }

    pub fn transcribe(&self, clip: &AudioClip) -> Result<PianoRoll> {
        let raw = self.raw_roll(clip)?;
        median_smooth(&raw, self.config.selection.median_frames)
    }
}

/// Full pipeline: features, profiles, selection, median smoothing.
pub fn transcribe(
    clip: &AudioClip,
    layers: &LayerConfig,
    params: &SelectionParams,
    mode: FeatureMode,
) -> Result<PianoRoll> {
    let config = TranscribeConfig {
        layers: layers.clone(),
        selection: params.clone(),
        ..TranscribeConfig::new(mode)
    };
    Transcriber::new(config)?.transcribe(clip)
}
