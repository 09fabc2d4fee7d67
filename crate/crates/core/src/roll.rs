//! Binary pitch × frame activation matrix and its CSV / JSON forms.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of MIDI pitches, `0..=127`.
pub const PITCH_COUNT: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct PianoRoll {
    frame_times: Vec<f64>,
    // pitch-major: cells[p * n_frames + i]
    cells: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RollJson {
    frame_times: Vec<f64>,
    /// One row per MIDI pitch 0..=127, one 0/1 entry per frame.
    activations: Vec<Vec<u8>>,
}

impl PianoRoll {
    /// All-inactive roll with one column per frame time.
    pub fn new(frame_times: Vec<f64>) -> Self {
        let cells = vec![false; PITCH_COUNT * frame_times.len()];
        Self { frame_times, cells }
    }

    /// Assemble from per-frame pitch vectors (each of length 128).
    pub fn from_columns(frame_times: Vec<f64>, columns: &[Vec<bool>]) -> Result<Self> {
        if columns.len() != frame_times.len() {
            return Err(Error::SizeMismatch {
                expected: frame_times.len(),
                actual: columns.len(),
            });
        }
        let mut roll = Self::new(frame_times);
        for (i, col) in columns.iter().enumerate() {
            if col.len() != PITCH_COUNT {
                return Err(Error::SizeMismatch {
                    expected: PITCH_COUNT,
                    actual: col.len(),
                });
            }
            for (p, &on) in col.iter().enumerate() {
                roll.set(p, i, on);
            }
        }
        Ok(roll)
    }

    pub fn n_frames(&self) -> usize {
        self.frame_times.len()
    }

    pub fn frame_times(&self) -> &[f64] {
        &self.frame_times
    }

    #[inline]
    pub fn is_active(&self, pitch: usize, frame: usize) -> bool {
        self.cells[pitch * self.n_frames() + frame]
    }

    #[inline]
    pub fn set(&mut self, pitch: usize, frame: usize, active: bool) {
        let n = self.n_frames();
        self.cells[pitch * n + frame] = active;
    }

    pub fn row(&self, pitch: usize) -> &[bool] {
        let n = self.n_frames();
        &self.cells[pitch * n..(pitch + 1) * n]
    }

    pub fn row_mut(&mut self, pitch: usize) -> &mut [bool] {
        let n = self.n_frames();
        &mut self.cells[pitch * n..(pitch + 1) * n]
    }

    pub fn active_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Resample onto other frame centres: each target time takes the column
    /// of the nearest source frame centre.
    pub fn resampled_to(&self, times: &[f64]) -> PianoRoll {
        let mut out = PianoRoll::new(times.to_vec());
        if self.n_frames() == 0 {
            return out;
        }
        for (i, &t) in times.iter().enumerate() {
            let j = self.frame_times.partition_point(|&s| s < t);
            let src = if j == 0 {
                0
            } else if j == self.n_frames() {
                j - 1
            } else if (self.frame_times[j] - t) < (t - self.frame_times[j - 1]) {
                j
            } else {
                j - 1
            };
            for p in 0..PITCH_COUNT {
                if self.is_active(p, src) {
                    out.set(p, i, true);
                }
            }
        }
        out
    }

    /// CSV: header `pitch,<t0>,<t1>,...`, then one row per MIDI pitch with
    /// 0/1 cells.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("pitch");
        for t in &self.frame_times {
            let _ = write!(s, ",{t}");
        }
        s.push('\n');
        for p in 0..PITCH_COUNT {
            let _ = write!(s, "{p}");
            for &c in self.row(p) {
                s.push_str(if c { ",1" } else { ",0" });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Roll("empty CSV".into()))?;
        let mut fields = header.split(',');
        if fields.next().map(str::trim) != Some("pitch") {
            return Err(Error::Roll("CSV header must start with `pitch`".into()));
        }
        let times = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Roll(format!("bad frame time `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut roll = PianoRoll::new(times);
        let mut seen = 0;
        for line in lines {
            let mut cells = line.split(',');
            let pitch: usize = cells
                .next()
                .and_then(|p| p.trim().parse().ok())
                .filter(|&p| p < PITCH_COUNT)
                .ok_or_else(|| Error::Roll(format!("bad pitch in row `{line}`")))?;
            let values: Vec<&str> = cells.collect();
            if values.len() != roll.n_frames() {
                return Err(Error::Roll(format!(
                    "pitch {pitch}: {} cells for {} frames",
                    values.len(),
                    roll.n_frames()
                )));
            }
            for (i, v) in values.iter().enumerate() {
                match v.trim() {
                    "0" => {}
                    "1" => roll.set(pitch, i, true),
                    other => return Err(Error::Roll(format!("non-binary cell `{other}`"))),
                }
            }
            seen += 1;
        }
        if seen != PITCH_COUNT {
            return Err(Error::Roll(format!(
                "expected {PITCH_COUNT} pitch rows, found {seen}"
            )));
        }
        Ok(roll)
    }

    pub fn to_json(&self) -> String {
        let doc = RollJson {
            frame_times: self.frame_times.clone(),
            activations: (0..PITCH_COUNT)
                .map(|p| self.row(p).iter().map(|&c| c as u8).collect())
                .collect(),
        };
        serde_json::to_string(&doc).expect("roll serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RollJson = serde_json::from_str(text).map_err(|e| Error::Roll(e.to_string()))?;
        if doc.activations.len() != PITCH_COUNT {
            return Err(Error::Roll(format!(
                "expected {PITCH_COUNT} pitch rows, found {}",
                doc.activations.len()
            )));
        }
        let mut roll = PianoRoll::new(doc.frame_times);
        for (p, row) in doc.activations.iter().enumerate() {
            if row.len() != roll.n_frames() {
                return Err(Error::Roll(format!(
                    "pitch {p}: wrong row length {}",
                    row.len()
                )));
            }
            for (i, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => roll.set(p, i, true),
                    other => return Err(Error::Roll(format!("non-binary cell {other}"))),
                }
            }
        }
        Ok(roll)
    }

    /// Write as JSON when the extension is `.json`, CSV otherwise.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = if is_json(path) {
            self.to_json()
        } else {
            self.to_csv()
        };
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if is_json(path) {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}
