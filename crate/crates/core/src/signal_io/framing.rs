use super::AudioClip;
use crate::error::{Error, Result};

/// One analysis segment. `samples.len()` always equals the window length.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub center_time: f64,
    pub samples: Vec<f64>,
}

/// Lazily produced, randomly addressable sequence of centred frames.
///
/// Frame `i` is centred on sample `round(i · hop · f_s)`; samples outside the
/// clip read as zero.
#[derive(Debug, Clone, Copy)]
pub struct FrameStream<'a> {
    clip: &'a AudioClip,
    window_len: usize,
    hop_seconds: f64,
    count: usize,
}

pub fn frame_stream(
    clip: &AudioClip,
    window_seconds: f64,
    hop_seconds: f64,
) -> Result<FrameStream<'_>> {
    if !(window_seconds > 0.0 && window_seconds.is_finite()) {
        return Err(Error::param(format!(
            "window length must be positive, got {window_seconds} s"
        )));
    }
    if !(hop_seconds > 0.0 && hop_seconds.is_finite()) {
        return Err(Error::param(format!(
            "hop size must be positive, got {hop_seconds} s"
        )));
    }
    let rate = clip.sample_rate() as f64;
    let window_len = ((window_seconds * rate).round() as usize).max(1);
    let count = (clip.duration() / hop_seconds + 1e-9).floor() as usize + 1;
    Ok(FrameStream {
        clip,
        window_len,
        hop_seconds,
        count,
    })
}

impl<'a> FrameStream<'a> {
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn center_sample(&self, index: usize) -> i64 {
        (index as f64 * self.hop_seconds * self.clip.sample_rate() as f64).round() as i64
    }

    pub fn center_time(&self, index: usize) -> f64 {
        self.center_sample(index) as f64 / self.clip.sample_rate() as f64
    }

    pub fn frame_times(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.center_time(i)).collect()
    }

    /// Copy frame `index` into `out` (length = window length).
    pub fn fill(&self, index: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.window_len);
        let src = self.clip.samples();
        let start = self.center_sample(index) - (self.window_len / 2) as i64;
        for (j, o) in out.iter_mut().enumerate() {
            let t = start + j as i64;
            *o = if t >= 0 && (t as usize) < src.len() {
                src[t as usize]
            } else {
                0.0
            };
        }
    }

    pub fn frame(&self, index: usize) -> Frame {
        let mut samples = vec![0.0; self.window_len];
        self.fill(index, &mut samples);
        Frame {
            index,
            center_time: self.center_time(index),
            samples,
        }
    }

    /// Index of the frame whose centre is closest to `time`.
    pub fn nearest(&self, time: f64) -> Option<usize> {
        if !(0.0..=self.clip.duration()).contains(&time) {
            return None;
        }
        let i = (time / self.hop_seconds).round() as usize;
        Some(i.min(self.count - 1))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Frame> + '_ {
        (0..self.count).map(move |i| self.frame(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_second_gives_101_frames() {
        let clip = AudioClip::new(vec![0.0; 44100], 44100).unwrap();
        let s = frame_stream(&clip, 0.18, 0.01).unwrap();
        assert_eq!(s.len(), 101);
        assert_eq!(s.window_len(), 7938);
        assert_eq!(s.frame(0).samples.len(), 7938);
    }

    #[test]
    fn first_frame_left_half_is_padding() {
        let clip = AudioClip::new(vec![1.0; 44100], 44100).unwrap();
        let s = frame_stream(&clip, 0.18, 0.01).unwrap();
        let f = s.frame(0);
        let half = s.window_len() / 2;
        assert!(f.samples[..half].iter().all(|&v| v == 0.0));
        assert!(f.samples[half..].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn interior_frame_of_constant_clip() {
        let clip = AudioClip::new(vec![0.7; 44100], 44100).unwrap();
        let s = frame_stream(&clip, 0.18, 0.01).unwrap();
        assert!(s.frame(50).samples.iter().all(|&v| v == 0.7));
    }

    #[test]
    fn centre_times_follow_hop() {
        let clip = AudioClip::new(vec![0.0; 22050], 22050).unwrap();
        let s = frame_stream(&clip, 0.05, 0.01).unwrap();
        for i in 0..s.len() {
            assert!((s.center_time(i) - i as f64 * 0.01).abs() <= 1.0 / 22050.0);
        }
        assert_eq!(s.nearest(0.304), Some(30));
        assert_eq!(s.nearest(5.0), None);
    }

    #[test]
    fn rejects_nonpositive_sizes() {
        let clip = AudioClip::new(vec![0.0; 100], 100).unwrap();
        assert!(frame_stream(&clip, 0.0, 0.01).is_err());
        assert!(frame_stream(&clip, 0.1, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn framing_is_exact(len in 1usize..3000, win in 3usize..200, hop in 1usize..100, seed in 0u64..1000) {
            let rate = 1000u32;
            let samples: Vec<f64> = (0..len).map(|t| ((t as u64 * 2654435761 + seed) % 1000) as f64 / 1000.0).collect();
            let clip = AudioClip::new(samples.clone(), rate).unwrap();
            let s = frame_stream(&clip, win as f64 / rate as f64, hop as f64 / rate as f64).unwrap();
            prop_assert_eq!(s.len(), len / hop + 1);
            for i in (0..s.len()).step_by(7) {
                let f = s.frame(i);
                let start = (i * hop) as i64 - (win / 2) as i64;
                for (j, &v) in f.samples.iter().enumerate() {
                    let t = start + j as i64;
                    let expect = if t >= 0 && (t as usize) < len { samples[t as usize] } else { 0.0 };
                    prop_assert_eq!(v, expect);
                }
            }
        }
    }
}
