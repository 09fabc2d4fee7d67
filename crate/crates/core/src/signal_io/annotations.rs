use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roll::{PianoRoll, PITCH_COUNT};

pub const ANNOTATION_HEADER: [&str; 3] = ["OnsetTime", "OffsetTime", "MidiPitch"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoteAnnotation {
    pub onset: f64,
    pub offset: f64,
    pub pitch: u8,
}

impl NoteAnnotation {
    pub fn new(onset: f64, offset: f64, pitch: u8) -> Result<Self> {
        if !(onset >= 0.0 && onset.is_finite() && offset.is_finite()) {
            return Err(Error::param(format!("invalid onset {onset}")));
        }
        if offset <= onset {
            return Err(Error::param(format!(
                "offset {offset} must be after onset {onset}"
            )));
        }
        if pitch as usize >= PITCH_COUNT {
            return Err(Error::param(format!("pitch {pitch} outside 0..=127")));
        }
        Ok(Self {
            onset,
            offset,
            pitch,
        })
    }

    pub fn contains(&self, time: f64) -> bool {
        self.onset <= time && time < self.offset
    }
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<NoteAnnotation>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text)
}

/// Parse the MAPS text convention: a header line `OnsetTime OffsetTime
/// MidiPitch`, then one whitespace-separated note per line.
pub fn parse_annotations(text: &str) -> Result<Vec<NoteAnnotation>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, header))
            if header
                .split_whitespace()
                .eq(ANNOTATION_HEADER.iter().copied()) => {}
        Some((line, _)) => {
            return Err(Error::Annotation {
                line,
                message: format!("expected header `{}`", ANNOTATION_HEADER.join(" ")),
            })
        }
        None => {
            return Err(Error::Annotation {
                line: 1,
                message: "missing header".into(),
            })
        }
    }

    lines
        .map(|(line, l)| {
            let err = |message: String| Error::Annotation { line, message };
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            }
            let onset: f64 = fields[0]
                .parse()
                .map_err(|_| err(format!("onset `{}` is not a number", fields[0])))?;
            let offset: f64 = fields[1]
                .parse()
                .map_err(|_| err(format!("offset `{}` is not a number", fields[1])))?;
            let pitch: u8 = fields[2].parse().map_err(|_| {
                err(format!(
                    "pitch `{}` is not an integer in 0..=127",
                    fields[2]
                ))
            })?;
            NoteAnnotation::new(onset, offset, pitch).map_err(|e| err(e.to_string()))
        })
        .collect()
}

pub fn write_annotations(notes: &[NoteAnnotation], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{}", ANNOTATION_HEADER.join("\t"))?;
    for n in notes {
        writeln!(out, "{}\t{}\t{}", n.onset, n.offset, n.pitch)?;
    }
    Ok(())
}

pub fn save_annotations(notes: &[NoteAnnotation], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_annotations(notes, &mut buf).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Rasterise notes at the given frame centres: cell `(p, i)` is active iff a
/// note of pitch `p` satisfies `onset <= t_i < offset`. Pitches outside
/// `pitch_range` (inclusive) are dropped.
pub fn annotations_to_roll(
    notes: &[NoteAnnotation],
    frame_times: &[f64],
    pitch_range: (u8, u8),
) -> PianoRoll {
    let (low, high) = pitch_range;
    let mut roll = PianoRoll::new(frame_times.to_vec());
    for note in notes.iter().filter(|n| (low..=high).contains(&n.pitch)) {
        // frame times are sorted, so the active frames form one contiguous run
        let first = frame_times.partition_point(|&t| t < note.onset);
        let end = frame_times.partition_point(|&t| t < note.offset);
        for i in first..end {
            roll.set(note.pitch as usize, i, true);
        }
    }
    roll
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "OnsetTime\tOffsetTime\tMidiPitch\n";

    #[test]
    fn parses_a_line() {
        let notes = parse_annotations(&format!("{HEADER}0.50 1.25 60\n")).unwrap();
        assert_eq!(
            notes,
            vec![NoteAnnotation {
                onset: 0.5,
                offset: 1.25,
                pitch: 60
            }]
        );
    }

    #[test]
    fn empty_data_section() {
        assert!(parse_annotations(HEADER).unwrap().is_empty());
    }

    #[test]
    fn reversed_interval_names_line() {
        let err = parse_annotations(&format!("{HEADER}0.1 0.2 61\n1.0 0.5 60\n")).unwrap_err();
        match err {
            Error::Annotation { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_and_field_errors() {
        assert!(matches!(
            parse_annotations(""),
            Err(Error::Annotation { line: 1, .. })
        ));
        assert!(parse_annotations("0.1 0.2 60\n").is_err());
        assert!(parse_annotations(&format!("{HEADER}a 0.2 60\n")).is_err());
        assert!(parse_annotations(&format!("{HEADER}0.1 0.2 128\n")).is_err());
        assert!(parse_annotations(&format!("{HEADER}0.1 0.2\n")).is_err());
        assert!(parse_annotations(&format!("{HEADER}-0.1 0.2 60\n")).is_err());
    }

    #[test]
    fn short_note_rasterises_five_frames() {
        let times: Vec<f64> = (0..10).map(|i| i as f64 * 0.01).collect();
        let note = NoteAnnotation::new(0.0, 0.05, 60).unwrap();
        let roll = annotations_to_roll(&[note], &times, (33, 96));
        for (i, &t) in times.iter().enumerate() {
            // oracle: direct interval membership
            assert_eq!(roll.is_active(60, i), note.contains(t), "frame {i}");
        }
        assert!(roll.is_active(60, 4));
        assert!(!roll.is_active(60, 5));
    }

    #[test]
    fn out_of_range_pitch_dropped() {
        let times = vec![0.0, 0.01];
        let roll = annotations_to_roll(
            &[NoteAnnotation::new(0.0, 1.0, 20).unwrap()],
            &times,
            (33, 96),
        );
        assert_eq!(roll.active_count(), 0);
    }

    #[test]
    fn duplicate_notes_are_idempotent() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        let a = NoteAnnotation::new(0.1, 0.3, 50).unwrap();
        let b = NoteAnnotation::new(0.15, 0.25, 50).unwrap();
        assert_eq!(
            annotations_to_roll(&[a, b, a], &times, (0, 127)),
            annotations_to_roll(&[a], &times, (0, 127))
        );
    }

    fn note_strategy() -> impl Strategy<Value = NoteAnnotation> {
        (0.0f64..2.0, 0.001f64..1.0, 0u8..128)
            .prop_map(|(on, dur, p)| NoteAnnotation::new(on, on + dur, p).unwrap())
    }

    proptest! {
        #[test]
        fn adding_a_note_never_deactivates(notes in proptest::collection::vec(note_strategy(), 0..8), extra in note_strategy()) {
            let times: Vec<f64> = (0..300).map(|i| i as f64 * 0.01).collect();
            let before = annotations_to_roll(&notes, &times, (21, 108));
            let mut more = notes.clone();
            more.push(extra);
            let after = annotations_to_roll(&more, &times, (21, 108));
            for p in 0..PITCH_COUNT {
                for i in 0..times.len() {
                    prop_assert!(!before.is_active(p, i) || after.is_active(p, i));
                }
            }
        }

        #[test]
        fn save_then_load_is_identity(notes in proptest::collection::vec(note_strategy(), 0..20)) {
            let mut buf = Vec::new();
            write_annotations(&notes, &mut buf).unwrap();
            let back = parse_annotations(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back, notes);
        }
    }
}
