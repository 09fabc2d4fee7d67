//! Layered pitch-salience features.
//!
//! ```text
//! z1 = σ1(|F x|)            magnitude spectrum        (frequency bins)
//! z2 = σ2(W2 F⁻¹ z1)        generalized cepstrum      (lag bins)
//! z3 = σ3(W3 F z2)          GC of spectrum (GCoS)     (frequency bins)
//! ```
//!
//! Every vector involved is real and even, so features are stored as their
//! non-redundant half `0..=n_fft/2`.

use serde::{Deserialize, Serialize};

use crate::dsp::{
    activate_in_place, cutoff_to_frequency_index, cutoff_to_quefrency_index, make_window,
    Activation, ActivationVariant, Bias, FourierPlan, FourierScratch, HighPassMask, MaskDomain,
    WindowKind, WindowSpec,
};
use crate::error::{Error, Result};

/// Framing and transform parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub sample_rate: u32,
    pub window: WindowKind,
    pub window_seconds: f64,
    pub hop_seconds: f64,
    /// Transform size; `None` means the next power of two above the window.
    pub n_fft: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            sample_rate: 44100,
            window: WindowKind::BlackmanHarris,
            window_seconds: 0.18,
            hop_seconds: 0.01,
            n_fft: None,
        }
    }
}

impl AnalysisConfig {
    pub fn window_len(&self, sample_rate: u32) -> usize {
        ((self.window_seconds * sample_rate as f64).round() as usize).max(1)
    }

    pub fn fft_len(&self, sample_rate: u32) -> usize {
        self.n_fft
            .unwrap_or_else(|| self.window_len(sample_rate).next_power_of_two())
    }
}

/// Exponents and cutoffs of the three layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayerConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub variant1: ActivationVariant,
    pub variant2: ActivationVariant,
    pub variant3: ActivationVariant,
    /// High-pass cutoff of the GCoS layer, Hz; 0 disables the mask.
    pub fc_hz: f64,
    /// Long-pass lifter cutoff of the cepstral layer, milliseconds; 0
    /// disables the mask.
    pub qc_ms: f64,
    /// Optional high-pass on the magnitude spectrum; identity when `None`.
    pub spectrum_cutoff_hz: Option<f64>,
}

impl Default for LayerConfig {
    fn default() -> Self {
        Self {
            gamma1: 0.24,
            gamma2: 0.6,
            gamma3: 1.0,
            variant1: ActivationVariant::Power,
            variant2: ActivationVariant::Power,
            variant3: ActivationVariant::Power,
            fc_hz: 27.5,
            qc_ms: 0.24,
            spectrum_cutoff_hz: None,
        }
    }
}

impl LayerConfig {
    /// Same cutoffs, different exponents (power variant).
    pub fn with_gammas(&self, gamma1: f64, gamma2: f64, gamma3: f64) -> Self {
        Self {
            gamma1,
            gamma2,
            gamma3,
            variant1: ActivationVariant::Power,
            variant2: ActivationVariant::Power,
            variant3: ActivationVariant::Power,
            ..self.clone()
        }
    }

    pub fn qc_seconds(&self) -> f64 {
        self.qc_ms * 1e-3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralLayer {
    Z1,
    Z3,
}

/// Frequency-indexed feature; `values[k]` sits at `k · bin_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFeature {
    pub values: Vec<f64>,
    pub bin_hz: f64,
    pub n_fft: usize,
    pub layer: SpectralLayer,
}

/// Lag-indexed feature; `values[n]` sits at `n · lag_seconds`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuefrencyFeature {
    pub values: Vec<f64>,
    pub lag_seconds: f64,
    pub n_fft: usize,
    pub gamma_signature: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    pub z1: SpectralFeature,
    pub z2: QuefrencyFeature,
    pub z3: SpectralFeature,
}

impl SpectralFeature {
    pub fn full(&self) -> Vec<f64> {
        crate::dsp::mirror_half(&self.values, self.n_fft)
    }
}

impl QuefrencyFeature {
    pub fn full(&self) -> Vec<f64> {
        crate::dsp::mirror_half(&self.values, self.n_fft)
    }
}

/// Precomputed window, transform plan, activations and masks for one
/// sample rate.
#[derive(Debug, Clone)]
pub struct SalienceExtractor {
    sample_rate: f64,
    window: Vec<f64>,
    plan: FourierPlan,
    activations: [Activation; 3],
    spectrum_mask: Option<HighPassMask>,
    quefrency_mask: Option<HighPassMask>,
    frequency_mask: Option<HighPassMask>,
}

impl SalienceExtractor {
    pub fn new(sample_rate: u32, analysis: &AnalysisConfig, layers: &LayerConfig) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::param("sample rate must be positive"));
        }
        let fs = sample_rate as f64;
        let window_len = analysis.window_len(sample_rate);
        let n_fft = analysis.fft_len(sample_rate);
        if n_fft < window_len {
            return Err(Error::param(format!(
                "n_fft {n_fft} is shorter than the {window_len}-sample window"
            )));
        }
        let window = make_window(WindowSpec::new(analysis.window, window_len)?)?;
        let plan = FourierPlan::new(n_fft)?;
        let half = plan.half_len();
        let activations = [
            Activation::new(layers.gamma1, layers.variant1)?,
            Activation::new(layers.gamma2, layers.variant2)?,
            Activation::new(layers.gamma3, layers.variant3)?,
        ];
        let spectrum_mask = layers
            .spectrum_cutoff_hz
            .map(|f| cutoff_to_frequency_index(f, n_fft, fs))
            .transpose()?
            .map(|k| HighPassMask::new(k, half, MaskDomain::Frequency));
        let quefrency_mask = (layers.qc_ms != 0.0)
            .then(|| cutoff_to_quefrency_index(layers.qc_seconds(), fs))
            .transpose()?
            .map(|n| HighPassMask::new(n, half, MaskDomain::Quefrency));
        let frequency_mask = (layers.fc_hz != 0.0)
            .then(|| cutoff_to_frequency_index(layers.fc_hz, n_fft, fs))
            .transpose()?
            .map(|k| HighPassMask::new(k, half, MaskDomain::Frequency));
        Ok(Self {
            sample_rate: fs,
            window,
            plan,
            activations,
            spectrum_mask,
            quefrency_mask,
            frequency_mask,
        })
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn n_fft(&self) -> usize {
        self.plan.len()
    }

    pub fn half_len(&self) -> usize {
        self.plan.half_len()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn bin_hz(&self) -> f64 {
        self.sample_rate / self.n_fft() as f64
    }

    pub fn quefrency_cutoff(&self) -> Option<usize> {
        self.quefrency_mask.map(|m| m.cutoff_index)
    }

    pub fn frequency_cutoff(&self) -> Option<usize> {
        self.frequency_mask.map(|m| m.cutoff_index)
    }

    pub fn make_scratch(&self) -> FourierScratch {
        self.plan.make_scratch()
    }

    fn spectral(&self, values: Vec<f64>, layer: SpectralLayer) -> SpectralFeature {
        SpectralFeature {
            values,
            bin_hz: self.bin_hz(),
            n_fft: self.n_fft(),
            layer,
        }
    }

    fn quefrency(&self, values: Vec<f64>, gamma_signature: (f64, f64)) -> QuefrencyFeature {
        QuefrencyFeature {
            values,
            lag_seconds: 1.0 / self.sample_rate,
            n_fft: self.n_fft(),
            gamma_signature,
        }
    }

    fn check_n_fft(&self, n_fft: usize) -> Result<()> {
        if n_fft != self.n_fft() {
            return Err(Error::SizeMismatch {
                expected: self.n_fft(),
                actual: n_fft,
            });
        }
        Ok(())
    }

    fn layer1_into(&self, frame: &[f64], out: &mut [f64], s: &mut FourierScratch) -> Result<()> {
        self.plan.windowed_magnitude(frame, &self.window, out, s)?;
        activate_in_place(out, self.activations[0]);
        if let Some(mask) = &self.spectrum_mask {
            mask.apply_in_place(out)?;
        }
        Ok(())
    }

    /// `W2 F⁻¹ z1`, before the activation.
    fn layer2_linear(&self, z1: &[f64], out: &mut [f64], s: &mut FourierScratch) -> Result<()> {
        self.plan.even_dft(z1, out, s)?;
        let scale = 1.0 / self.n_fft() as f64;
        out.iter_mut().for_each(|v| *v *= scale);
        if let Some(mask) = &self.quefrency_mask {
            mask.apply_in_place(out)?;
        }
        Ok(())
    }

    fn layer2_into(&self, z1: &[f64], out: &mut [f64], s: &mut FourierScratch) -> Result<()> {
        self.layer2_linear(z1, out, s)?;
        activate_in_place(out, self.activations[1]);
        Ok(())
    }

    fn layer3_into(&self, z2: &[f64], out: &mut [f64], s: &mut FourierScratch) -> Result<()> {
        self.plan.even_dft(z2, out, s)?;
        if let Some(mask) = &self.frequency_mask {
            mask.apply_in_place(out)?;
        }
        activate_in_place(out, self.activations[2]);
        Ok(())
    }

    /// `z1 = σ1(|F(w·x)|)`; `frame` must have the window's length.
    pub fn layer1_spectrum(&self, frame: &[f64]) -> Result<SpectralFeature> {
        let mut s = self.make_scratch();
        let mut out = vec![0.0; self.half_len()];
        self.layer1_into(frame, &mut out, &mut s)?;
        Ok(self.spectral(out, SpectralLayer::Z1))
    }

    /// `z2 = σ2(W2 F⁻¹ z1)`.
    pub fn layer2_generalized_cepstrum(&self, z1: &SpectralFeature) -> Result<QuefrencyFeature> {
        self.check_n_fft(z1.n_fft)?;
        let mut s = self.make_scratch();
        let mut out = vec![0.0; self.half_len()];
        self.layer2_into(&z1.values, &mut out, &mut s)?;
        Ok(self.quefrency(out, self.gamma_signature()))
    }

    /// The liftered cepstrum `W2 F⁻¹ z1` before `σ2` is applied. With
    /// `γ1 = 2` this is the (signed) circular autocorrelation; with a
    /// Box-Cox `γ1 → 0` it approaches the real cepstrum.
    pub fn cepstrum_pre_activation(&self, z1: &SpectralFeature) -> Result<Vec<f64>> {
        self.check_n_fft(z1.n_fft)?;
        let mut s = self.make_scratch();
        let mut out = vec![0.0; self.half_len()];
        self.layer2_linear(&z1.values, &mut out, &mut s)?;
        Ok(out)
    }

    /// `z3 = σ3(W3 F z2)`.
    pub fn layer3_gcos(&self, z2: &QuefrencyFeature) -> Result<SpectralFeature> {
        self.check_n_fft(z2.n_fft)?;
        let mut s = self.make_scratch();
        let mut out = vec![0.0; self.half_len()];
        self.layer3_into(&z2.values, &mut out, &mut s)?;
        Ok(self.spectral(out, SpectralLayer::Z3))
    }

    fn gamma_signature(&self) -> (f64, f64) {
        (self.activations[0].gamma, self.activations[1].gamma)
    }

    /// All three layers from one pass; `z3` is built from the returned `z2`.
    pub fn extract_all(&self, frame: &[f64]) -> Result<Features> {
        let mut s = self.make_scratch();
        self.extract_with(frame, &mut s)
    }

    /// [`extract_all`](Self::extract_all) reusing a caller-owned scratch.
    pub fn extract_with(&self, frame: &[f64], s: &mut FourierScratch) -> Result<Features> {
        let half = self.half_len();
        let mut z1 = vec![0.0; half];
        let mut z2 = vec![0.0; half];
        let mut z3 = vec![0.0; half];
        self.layer1_into(frame, &mut z1, s)?;
        self.layer2_into(&z1, &mut z2, s)?;
        self.layer3_into(&z2, &mut z3, s)?;
        Ok(Features {
            z1: self.spectral(z1, SpectralLayer::Z1),
            z2: self.quefrency(z2, self.gamma_signature()),
            z3: self.spectral(z3, SpectralLayer::Z3),
        })
    }

    /// YIN difference function in layered form: power spectrum (γ1 = 2),
    /// inverse DFT, weight `-2`, bias `2·acf[0]`, then ReLU (γ2 = 1).
    ///
    /// Equals `Σ_q (x[q] - x[(q+n) mod n_fft])²` over the windowed, zero-padded
    /// frame.
    pub fn yin_salience(&self, frame: &[f64]) -> Result<QuefrencyFeature> {
        let mut s = self.make_scratch();
        let half = self.half_len();
        let mut power = vec![0.0; half];
        self.plan
            .windowed_magnitude(frame, &self.window, &mut power, &mut s)?;
        activate_in_place(&mut power, Activation::power(2.0)?);
        let mut acf = vec![0.0; half];
        self.plan.even_dft(&power, &mut acf, &mut s)?;
        let scale = 1.0 / self.n_fft() as f64;
        let acf0 = acf[0] * scale;
        // W = -2I
        let mut out: Vec<f64> = acf.iter().map(|v| -2.0 * v * scale).collect();
        Bias::constant(2.0 * acf0, half).add_to(&mut out)?;
        activate_in_place(&mut out, Activation::power(1.0)?);
        out[0] = 0.0;
        Ok(self.quefrency(out, (2.0, 1.0)))
    }
}

/// `L[k] = freq[k] · quef[round(n_fft / k)]` for `k ≥ 1`; zero at `k = 0` and
/// wherever the rounded lag falls outside the lag vector.
pub fn fuse_salience(freq: &SpectralFeature, quef: &QuefrencyFeature) -> Result<SpectralFeature> {
    if freq.n_fft != quef.n_fft {
        return Err(Error::SizeMismatch {
            expected: freq.n_fft,
            actual: quef.n_fft,
        });
    }
    let n = freq.n_fft as f64;
    let values = freq
        .values
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            if k == 0 {
                return 0.0;
            }
            let lag = (n / k as f64).round() as usize;
            quef.values.get(lag).map_or(0.0, |&q| f * q)
        })
        .collect();
    Ok(SpectralFeature {
        values,
        ..freq.clone()
    })
}

/// Rescale to unit ℓ2 norm (plotting only; detection never normalises).
pub fn normalized(values: &[f64]) -> Vec<f64> {
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        values.iter().map(|v| v / norm).collect()
    } else {
        values.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn small(layers: &LayerConfig, window: WindowKind) -> SalienceExtractor {
        let analysis = AnalysisConfig {
            sample_rate: 8000,
            window,
            window_seconds: 0.032,
            hop_seconds: 0.01,
            n_fft: Some(512),
        };
        SalienceExtractor::new(8000, &analysis, layers).unwrap()
    }

    fn no_masks(g1: f64, g2: f64, g3: f64) -> LayerConfig {
        LayerConfig {
            fc_hz: 0.0,
            qc_ms: 0.0,
            ..LayerConfig::default().with_gammas(g1, g2, g3)
        }
    }

    #[test]
    fn zero_frame_gives_zero_features() {
        let ex = small(&LayerConfig::default(), WindowKind::BlackmanHarris);
        let f = ex.extract_all(&vec![0.0; ex.window_len()]).unwrap();
        for v in [&f.z1.values, &f.z2.values, &f.z3.values] {
            assert!(v.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn cosine_peaks_at_its_bin() {
        let ex = small(&no_masks(1.0, 1.0, 1.0), WindowKind::Blackman);
        let k0 = 40.0;
        let frame: Vec<f64> = (0..ex.window_len())
            .map(|t| (2.0 * PI * k0 * t as f64 / ex.n_fft() as f64).cos())
            .collect();
        let z1 = ex.layer1_spectrum(&frame).unwrap();
        let argmax = (1..z1.values.len())
            .max_by(|&a, &b| z1.values[a].total_cmp(&z1.values[b]))
            .unwrap();
        assert_eq!(argmax, 40);
    }

    #[test]
    fn gamma_two_is_square_of_gamma_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let frame: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = small(&no_masks(1.0, 1.0, 1.0), WindowKind::BlackmanHarris)
            .layer1_spectrum(&frame)
            .unwrap();
        let b = small(&no_masks(2.0, 1.0, 1.0), WindowKind::BlackmanHarris)
            .layer1_spectrum(&frame)
            .unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x * x - y).abs() <= 1e-12 * y.max(1.0));
        }
    }

    #[test]
    fn masked_indices_are_zero_and_values_nonnegative() {
        let ex = small(&LayerConfig::default(), WindowKind::BlackmanHarris);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let frame: Vec<f64> = (0..ex.window_len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let f = ex.extract_all(&frame).unwrap();
        assert_eq!(ex.quefrency_cutoff(), Some(1)); // floor(0.24e-3 * 8000)
        assert_eq!(ex.frequency_cutoff(), Some(1)); // floor(27.5 * 512 / 8000)
        assert!(f.z2.values[..=1].iter().all(|&v| v == 0.0));
        assert!(f.z3.values[..=1].iter().all(|&v| v == 0.0));
        for v in [&f.z1.values, &f.z2.values, &f.z3.values] {
            assert!(v.iter().all(|&x| x >= 0.0 && x.is_finite()));
        }
    }

    #[test]
    fn constant_spectrum_is_killed_by_lifter() {
        let ex = small(&LayerConfig::default(), WindowKind::BlackmanHarris);
        let z1 = SpectralFeature {
            values: vec![3.0; ex.half_len()],
            bin_hz: ex.bin_hz(),
            n_fft: ex.n_fft(),
            layer: SpectralLayer::Z1,
        };
        let z2 = ex.layer2_generalized_cepstrum(&z1).unwrap();
        assert!(z2.values.iter().all(|&v| v.abs() < 1e-12));
        let z3 = ex.layer3_gcos(&z2).unwrap();
        assert!(z3.values.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn yin_is_zero_at_lag_zero_and_nonnegative() {
        let ex = small(&LayerConfig::default(), WindowKind::BlackmanHarris);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let frame: Vec<f64> = (0..ex.window_len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let d = ex.yin_salience(&frame).unwrap();
        assert_eq!(d.values[0], 0.0);
        assert!(d.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn fuse_indicator_lands_where_rounded_lag_matches() {
        let n_fft = 8192;
        let half = n_fft / 2 + 1;
        let freq = SpectralFeature {
            values: vec![1.0; half],
            bin_hz: 44100.0 / n_fft as f64,
            n_fft,
            layer: SpectralLayer::Z3,
        };
        let mut q = vec![0.0; half];
        q[100] = 1.0;
        let quef = QuefrencyFeature {
            values: q,
            lag_seconds: 1.0 / 44100.0,
            n_fft,
            gamma_signature: (0.24, 0.6),
        };
        let fused = fuse_salience(&freq, &quef).unwrap();
        // oracle: enumerate k and round the division directly
        let expect: Vec<usize> = (1..half)
            .filter(|&k| ((n_fft as f64) / k as f64).round() as usize == 100)
            .collect();
        let got: Vec<usize> = (0..half).filter(|&k| fused.values[k] != 0.0).collect();
        assert_eq!(got, expect);
        assert_eq!(got, vec![82]);
    }

    #[test]
    fn fuse_zero_and_positive_cases() {
        let n_fft = 64;
        let half = 33;
        let mk = |v: f64| SpectralFeature {
            values: vec![v; half],
            bin_hz: 1.0,
            n_fft,
            layer: SpectralLayer::Z1,
        };
        let q = |v: f64| QuefrencyFeature {
            values: vec![v; half],
            lag_seconds: 1.0,
            n_fft,
            gamma_signature: (1.0, 1.0),
        };
        assert!(fuse_salience(&mk(0.0), &q(2.0))
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
        assert!(fuse_salience(&mk(2.0), &q(0.0))
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
        let both = fuse_salience(&mk(2.0), &q(3.0)).unwrap();
        assert_eq!(both.values[0], 0.0);
        assert_eq!(both.values[1], 0.0); // round(64/1) = 64 is out of range
        assert!(both.values[2..].iter().all(|&v| v == 6.0));
        let other = QuefrencyFeature {
            n_fft: 128,
            ..q(1.0)
        };
        assert!(fuse_salience(&mk(1.0), &other).is_err());
    }

    #[test]
    fn rejects_short_transform() {
        let analysis = AnalysisConfig {
            n_fft: Some(4096),
            ..AnalysisConfig::default()
        };
        assert!(SalienceExtractor::new(44100, &analysis, &LayerConfig::default()).is_err());
    }
}
