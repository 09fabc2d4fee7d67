use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gcos::{FeatureMode, NoiseKind, RunConfig, WindowKind};

use crate::failure::Failure;

pub const THREADS_ENV: &str = "GCOS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "gcos",
    version,
    about = "Multi-pitch estimation with generalized-cepstrum features"
)]
pub struct Cli {
    /// Worker threads for frame and file parallelism (0 uses every core)
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transcribe an audio file into a piano roll (CSV, or JSON for a .json output)
    Transcribe {
        /// Input audio (WAV); falls back to `input` in the config file
        audio: Option<PathBuf>,
        #[command(flatten)]
        params: Params,
    },
    /// Score a predicted roll against annotations (.txt) or a reference roll
    Evaluate {
        /// Predicted piano roll (CSV or JSON)
        pred: PathBuf,
        /// Ground truth: `OnsetTime OffsetTime MidiPitch` text file, or a roll
        truth: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Add noise at a given SNR and write a 32-bit float WAV plus a JSON sidecar
    Degrade {
        /// Input audio (WAV); falls back to `input` in the config file
        audio: Option<PathBuf>,
        /// Noise colour [default: pink]
        #[arg(long, value_name = "pink|white")]
        noise: Option<NoiseKind>,
        #[command(flatten)]
        params: Params,
    },
    /// Transcribe and score every (wav, txt) pair of a directory across SNR levels
    Sweep {
        /// Directory of `<name>.wav` files with `<name>.txt` annotations
        corpus: PathBuf,
        /// SNR levels in dB, comma separated
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "30,20,10,5,0",
            allow_hyphen_values = true
        )]
        levels: Vec<f64>,
        /// Noise colour [default: pink]
        #[arg(long, value_name = "pink|white")]
        noise: Option<NoiseKind>,
        #[command(flatten)]
        params: Params,
    },
    /// Dump the unit-norm layer outputs of the frame nearest a time as JSON
    Features {
        /// Input audio (WAV); falls back to `input` in the config file
        audio: Option<PathBuf>,
        /// Time of the frame to dump, seconds
        #[arg(long)]
        time: f64,
        #[command(flatten)]
        params: Params,
    },
}

/// Parameters shared by every command. Unset flags keep the config-file value,
/// which in turn defaults to the reference parameterisation.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// TOML run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Salience used by the pitch selection [default: gcos]
    #[arg(long, value_name = "gcos|spectrum_baseline")]
    pub mode: Option<FeatureMode>,
    /// Exponent of the spectral activation [default: 0.24]
    #[arg(long)]
    pub gamma1: Option<f64>,
    /// Exponent of the cepstral activation [default: 0.6]
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Exponent of the GCoS activation [default: 1.0]
    #[arg(long)]
    pub gamma3: Option<f64>,
    /// High-pass cutoff of the GCoS layer in Hz, 0 disables [default: 27.5]
    #[arg(long)]
    pub fc_hz: Option<f64>,
    /// Lifter cutoff of the cepstral layer in ms, 0 disables [default: 0.24]
    #[arg(long)]
    pub qc_ms: Option<f64>,
    /// Analysis window [default: blackman_harris]
    #[arg(long, value_name = "blackman|blackman_harris")]
    pub window: Option<WindowKind>,
    /// Window length, seconds [default: 0.18]
    #[arg(long)]
    pub window_sec: Option<f64>,
    /// Hop between frame centres, seconds [default: 0.01]
    #[arg(long)]
    pub hop_sec: Option<f64>,
    /// Signal-to-noise ratio in dB; omit for a clean run [default: none]
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Noise seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Lowest evaluated/transcribed MIDI pitch [default: 33]
    #[arg(long)]
    pub pitch_low: Option<u8>,
    /// Highest evaluated/transcribed MIDI pitch [default: 96]
    #[arg(long)]
    pub pitch_high: Option<u8>,
    /// Output file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Params {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        fn set<T: Clone>(slot: &mut T, flag: &Option<T>) {
            if let Some(v) = flag {
                *slot = v.clone();
            }
        }
        set(&mut cfg.mode, &self.mode);
        set(&mut cfg.layers.gamma1, &self.gamma1);
        set(&mut cfg.layers.gamma2, &self.gamma2);
        set(&mut cfg.layers.gamma3, &self.gamma3);
        set(&mut cfg.layers.fc_hz, &self.fc_hz);
        set(&mut cfg.layers.qc_ms, &self.qc_ms);
        set(&mut cfg.analysis.window, &self.window);
        set(&mut cfg.analysis.window_seconds, &self.window_sec);
        set(&mut cfg.analysis.hop_seconds, &self.hop_sec);
        set(&mut cfg.seed, &self.seed);
        set(&mut cfg.pitch_low, &self.pitch_low);
        set(&mut cfg.pitch_high, &self.pitch_high);
        if self.snr_db.is_some() {
            cfg.snr_db = self.snr_db;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if cfg.pitch_low > cfg.pitch_high || cfg.pitch_high > 127 {
            return Err(Failure::Usage(format!(
                "invalid pitch range {}..={}",
                cfg.pitch_low, cfg.pitch_high
            )));
        }
        Ok(cfg)
    }
}

pub fn required_path(
    flag: Option<PathBuf>,
    fallback: Option<PathBuf>,
    what: &str,
) -> Result<PathBuf, Failure> {
    flag.or(fallback)
        .ok_or_else(|| Failure::Usage(format!("missing {what}")))
}
