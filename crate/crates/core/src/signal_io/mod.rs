//! Audio and ground-truth ingestion, and the frame stream fed to the
//! salience layers.

mod annotations;
mod audio;
mod framing;

pub use annotations::{
    annotations_to_roll, load_annotations, parse_annotations, save_annotations, write_annotations,
    NoteAnnotation, ANNOTATION_HEADER,
};
pub use audio::{load_audio, resample_if_needed, save_wav_f32, AudioClip};
pub use framing::{frame_stream, Frame, FrameStream};
