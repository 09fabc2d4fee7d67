//! Micro-averaged frame-level precision / recall / F-score.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degrade::{degrade, DegradeSpec, NoiseKind};
use crate::error::{Error, Result};
use crate::profile::{FeatureMode, TranscribeConfig, Transcriber};
use crate::roll::{PianoRoll, PITCH_COUNT};
use crate::signal_io::{annotations_to_roll, AudioClip, NoteAnnotation};

/// A1 ..= C7.
pub const ALL_RANGE: (u8, u8) = (33, 96);
/// Below C3.
pub const BASS_RANGE: (u8, u8) = (33, 47);
/// C3 and above.
pub const TREBLE_RANGE: (u8, u8) = (48, 96);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    All,
    Bass,
    Treble,
    Custom,
}

impl Split {
    pub fn of_range(range: (u8, u8)) -> Self {
        match range {
            ALL_RANGE => Split::All,
            BASS_RANGE => Split::Bass,
            TREBLE_RANGE => Split::Treble,
            _ => Split::Custom,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Split::All => "All",
            Split::Bass => "Bass",
            Split::Treble => "Treble",
            Split::Custom => "Custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub n_tp: u64,
    pub n_fp: u64,
    pub n_fn: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            n_tp: self.n_tp + o.n_tp,
            n_fp: self.n_fp + o.n_fp,
            n_fn: self.n_fn + o.n_fn,
        }
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: Split,
    pub pitch_range: (u8, u8),
    pub n_tp: u64,
    pub n_fp: u64,
    pub n_fn: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

impl EvalReport {
    /// Zero denominators yield 0 rather than NaN.
    pub fn from_counts(counts: Counts, pitch_range: (u8, u8)) -> Self {
        let Counts { n_tp, n_fp, n_fn } = counts;
        let precision = ratio(n_tp, n_tp + n_fp);
        let recall = ratio(n_tp, n_tp + n_fn);
        // 2PR/(P+R) written over the counts, so it is exact for small integers
        let f_score = ratio(2 * n_tp, 2 * n_tp + n_fp + n_fn);
        Self {
            split: Split::of_range(pitch_range),
            pitch_range,
            n_tp,
            n_fp,
            n_fn,
            precision,
            recall,
            f_score,
        }
    }

    pub fn counts(&self) -> Counts {
        Counts {
            n_tp: self.n_tp,
            n_fp: self.n_fp,
            n_fn: self.n_fn,
        }
    }
}

fn check_frames(pred: &PianoRoll, truth: &PianoRoll) -> Result<()> {
    if pred.n_frames() != truth.n_frames() {
        return Err(Error::FrameMismatch {
            pred: pred.n_frames(),
            truth: truth.n_frames(),
        });
    }
    Ok(())
}

/// Cell-wise counts over all frames for pitches in `pitch_range`.
pub fn count(pred: &PianoRoll, truth: &PianoRoll, pitch_range: (u8, u8)) -> Result<Counts> {
    check_frames(pred, truth)?;
    let (low, high) = (
        pitch_range.0 as usize,
        (pitch_range.1 as usize).min(PITCH_COUNT - 1),
    );
    let mut c = Counts::default();
    for p in low..=high {
        for (&a, &b) in pred.row(p).iter().zip(truth.row(p)) {
            match (a, b) {
                (true, true) => c.n_tp += 1,
                (true, false) => c.n_fp += 1,
                (false, true) => c.n_fn += 1,
                (false, false) => {}
            }
        }
    }
    Ok(c)
}

pub fn score(pred: &PianoRoll, truth: &PianoRoll, pitch_range: (u8, u8)) -> Result<EvalReport> {
    Ok(EvalReport::from_counts(
        count(pred, truth, pitch_range)?,
        pitch_range,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitReports {
    pub all: EvalReport,
    pub bass: EvalReport,
    pub treble: EvalReport,
}

impl SplitReports {
    pub fn iter(&self) -> impl Iterator<Item = &EvalReport> {
        [&self.all, &self.bass, &self.treble].into_iter()
    }

    /// Micro-average: sum counts across reports, then divide once.
    pub fn pooled<'a>(items: impl IntoIterator<Item = &'a SplitReports>) -> SplitReports {
        let items: Vec<&SplitReports> = items.into_iter().collect();
        let sum = |f: fn(&SplitReports) -> &EvalReport| {
            items.iter().map(|r| f(r).counts()).sum::<Counts>()
        };
        SplitReports {
            all: EvalReport::from_counts(sum(|r| &r.all), ALL_RANGE),
            bass: EvalReport::from_counts(sum(|r| &r.bass), BASS_RANGE),
            treble: EvalReport::from_counts(sum(|r| &r.treble), TREBLE_RANGE),
        }
    }
}

pub fn score_splits(pred: &PianoRoll, truth: &PianoRoll) -> Result<SplitReports> {
    Ok(SplitReports {
        all: score(pred, truth, ALL_RANGE)?,
        bass: score(pred, truth, BASS_RANGE)?,
        treble: score(pred, truth, TREBLE_RANGE)?,
    })
}

/// Plain-text table: one line per (dataset, split), metrics in percent.
pub fn format_table(rows: &[(String, SplitReports)]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:<7} {:>7} {:>7} {:>7} {:>9} {:>9} {:>9}",
        "Dataset", "Pitch", "P", "R", "F", "TP", "FP", "FN"
    );
    for (name, reports) in rows {
        for (i, r) in reports.iter().enumerate() {
            let label = if i == 0 { name.as_str() } else { "" };
            let _ = writeln!(
                s,
                "{:<12} {:<7} {:>7.2} {:>7.2} {:>7.2} {:>9} {:>9} {:>9}",
                label,
                r.split.label(),
                100.0 * r.precision,
                100.0 * r.recall,
                100.0 * r.f_score,
                r.n_tp,
                r.n_fp,
                r.n_fn
            );
        }
    }
    let _ = writeln!(
        s,
        "Bass = MIDI 33-47 (A1..B2); Treble = MIDI 48-96 (C3..C7); C3 counts as treble."
    );
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mode: FeatureMode,
    /// `None` for the undegraded run.
    pub snr_db: Option<f64>,
    pub reports: SplitReports,
}

/// Degrade → transcribe → score, for every `(mode, level)` plus one clean
/// row per mode. Rows are ordered by mode, then clean, then `levels` order.
pub fn snr_sweep(
    clip: &AudioClip,
    truth: &[NoteAnnotation],
    levels: &[f64],
    modes: &[FeatureMode],
    base: &TranscribeConfig,
    noise_kind: NoiseKind,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if let Some(bad) = levels.iter().find(|l| !l.is_finite()) {
        return Err(Error::param(format!("invalid SNR level {bad}")));
    }
    let conditions: Vec<Option<f64>> = std::iter::once(None)
        .chain(levels.iter().copied().map(Some))
        .collect();
    let clips = conditions
        .par_iter()
        .map(|&snr| match snr {
            None => Ok(clip.clone()),
            Some(snr_db) => degrade(
                clip,
                &DegradeSpec {
                    noise_kind,
                    snr_db,
                    seed,
                },
            )
            .map(|d| d.clip),
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(FeatureMode, usize)> = modes
        .iter()
        .flat_map(|&m| (0..conditions.len()).map(move |c| (m, c)))
        .collect();
    let transcribers = modes
        .iter()
        .map(|&mode| {
            Transcriber::new(TranscribeConfig {
                mode,
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;

    jobs.par_iter()
        .map(|&(mode, c)| {
            let t = &transcribers[modes.iter().position(|&m| m == mode).unwrap_or(0)];
            let pred = t.transcribe(&clips[c])?;
            let truth_roll = annotations_to_roll(truth, pred.frame_times(), ALL_RANGE);
            Ok(SweepRow {
                mode,
                snr_db: conditions[c],
                reports: score_splits(&pred, &truth_roll)?,
            })
        })
        .collect()
}
