//! Layered homomorphic pitch-salience features and frame-level multi-pitch
//! estimation.
//!
//! A frame `x` is turned into three features by alternating Fourier
//! transforms with a rectifying power law `σ(x) = max(x, 0)^γ`:
//!
//! * `z1`: magnitude spectrum,
//! * `z2`: generalized cepstrum (lag domain, long-pass liftered),
//! * `z3`: generalized cepstrum of spectrum, or GCoS (frequency domain,
//!   high-pass filtered).
//!
//! The frequency feature (`z3`, or `z1` for the baseline) and `z2` are
//! max-pooled onto MIDI pitches, passed through harmonic/subharmonic and
//! sparsity rules, and median-smoothed into a piano roll.
//!
//! ```no_run
//! use gcos::{load_audio, FeatureMode, TranscribeConfig, Transcriber};
//!
//! let clip = load_audio("piece.wav")?;
//! let roll = Transcriber::new(TranscribeConfig::new(FeatureMode::Gcos))?.transcribe(&clip)?;
//! println!("{} active cells", roll.active_count());
//! # Ok::<(), gcos::Error>(())
//! ```

pub mod config;
pub mod degrade;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod profile;
pub mod roll;
pub mod salience;
pub mod signal_io;
pub mod synth;

pub use config::RunConfig;
pub use degrade::{degrade, generate_pink_noise, mix_at_snr, DegradeSpec, NoiseKind};
pub use dsp::{ActivationVariant, WindowKind};
pub use error::{Error, Result};
pub use eval::{
    score, score_splits, snr_sweep, EvalReport, SplitReports, SweepRow, ALL_RANGE, BASS_RANGE,
    TREBLE_RANGE,
};
pub use profile::{
    median_smooth, pitch_number, select_pitches, transcribe, FeatureMode, PitchProfile,
    SelectionParams, TranscribeConfig, Transcriber,
};
pub use roll::{PianoRoll, PITCH_COUNT};
pub use salience::{
    fuse_salience, normalized, AnalysisConfig, Features, LayerConfig, QuefrencyFeature,
    SalienceExtractor, SpectralFeature,
};
pub use signal_io::{
    annotations_to_roll, frame_stream, load_annotations, load_audio, resample_if_needed,
    save_annotations, save_wav_f32, AudioClip, Frame, NoteAnnotation,
};
