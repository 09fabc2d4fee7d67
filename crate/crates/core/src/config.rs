//! Single-file run configuration (TOML). Every field defaults to the
//! reference parameterisation, so an empty file is a valid config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degrade::NoiseKind;
use crate::error::{Error, Result};
use crate::eval::ALL_RANGE;
use crate::profile::{FeatureMode, SelectionParams, TranscribeConfig};
use crate::salience::{AnalysisConfig, LayerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: FeatureMode,
    pub pitch_low: u8,
    pub pitch_high: u8,
    pub seed: u64,
    pub noise: NoiseKind,
    pub snr_db: Option<f64>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub analysis: AnalysisConfig,
    pub layers: LayerConfig,
    pub selection: SelectionParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: FeatureMode::Gcos,
            pitch_low: ALL_RANGE.0,
            pitch_high: ALL_RANGE.1,
            seed: 0,
            noise: NoiseKind::Pink,
            snr_db: None,
            input: None,
            out: None,
            analysis: AnalysisConfig::default(),
            layers: LayerConfig::default(),
            selection: SelectionParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn transcribe_config(&self) -> TranscribeConfig {
        TranscribeConfig {
            analysis: self.analysis.clone(),
            layers: self.layers.clone(),
            selection: self.selection.clone(),
            pitch_range: (self.pitch_low, self.pitch_high),
            mode: self.mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::WindowKind;

    #[test]
    fn empty_file_is_reference_parameterisation() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(
            (c.layers.gamma1, c.layers.gamma2, c.layers.gamma3),
            (0.24, 0.6, 1.0)
        );
        assert_eq!(c.layers.fc_hz, 27.5);
        assert_eq!(c.layers.qc_ms, 0.24);
        assert_eq!(c.analysis.window, WindowKind::BlackmanHarris);
        assert_eq!(c.analysis.window_seconds, 0.18);
        assert_eq!(c.analysis.hop_seconds, 0.01);
        assert_eq!(c.analysis.fft_len(44100), 8192);
        assert_eq!(c.selection.delta, 0.8);
        assert_eq!(c.selection.median_frames, 25);
        assert_eq!((c.pitch_low, c.pitch_high), (33, 96));
    }

    #[test]
    fn round_trip_is_idempotent() {
        let text = "mode = \"spectrum_baseline\"\nsnr_db = 10.0\n[layers]\ngamma1 = 0.5\n[analysis]\nwindow = \"blackman\"\nn_fft = 16384\n";
        let c = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(c.mode, FeatureMode::SpectrumBaseline);
        assert_eq!(c.layers.gamma1, 0.5);
        assert_eq!(c.layers.gamma2, 0.6);
        let once = c.to_toml_string();
        let twice = RunConfig::from_toml_str(&once).unwrap().to_toml_string();
        assert_eq!(once, twice);
        assert_eq!(RunConfig::from_toml_str(&once).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml_str("gama1 = 3").is_err());
        assert!(RunConfig::from_toml_str("[layers]\nbogus = 1").is_err());
    }
}
