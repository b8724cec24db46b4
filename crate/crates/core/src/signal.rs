//! Normalized audio clips and the operations that prepare them for
//! envelope analysis: endpoint trimming, length equalization, energy
//! measurement, and reference-speaker selection.

use crate::error::{Error, Result};

/// A speech recording as normalized samples.
///
/// Samples are dimensionless amplitudes in `[-1.0, +1.0]`. The clip is
/// immutable after construction; every operation returns a new clip.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
    source_path: String,
}

impl AudioClip {
    /// Builds a clip, validating the type invariants: non-empty samples,
    /// every sample in `[-1, 1]`, positive sample rate.
    pub fn new(
        samples: Vec<f64>,
        sample_rate: u32,
        source_path: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyClip);
        }
        if sample_rate == 0 {
            return Err(Error::InvalidParam {
                name: "sample_rate",
                reason: "must be positive".into(),
            });
        }
        for (index, &value) in samples.iter().enumerate() {
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::SampleOutOfRange { index, value });
            }
        }
        Ok(Self {
            samples,
            sample_rate,
            source_path: source_path.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    /// Copies a subrange into a new clip. `start..end` must be non-empty and
    /// within bounds.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.samples.len() {
            return Err(Error::InvalidParam {
                name: "sample range",
                reason: format!(
                    "{start}..{end} is not a valid non-empty range within {} samples",
                    self.samples.len()
                ),
            });
        }
        Ok(Self {
            samples: self.samples[start..end].to_vec(),
            sample_rate: self.sample_rate,
            source_path: self.source_path.clone(),
        })
    }

    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self {
            samples,
            sample_rate: self.sample_rate,
            source_path: self.source_path.clone(),
        }
    }
}

/// Sum of squared sample values.
pub fn signal_energy(clip: &AudioClip) -> f64 {
    clip.samples().iter().map(|s| s * s).sum()
}

/// Removes leading and trailing low-energy frames.
///
/// The clip is cut into consecutive frames of `frame_len` samples (the last
/// frame may be shorter). A frame is active when its mean squared amplitude
/// reaches `rel_threshold` times the maximum frame energy. The result spans
/// the first through the last active frame, snapped to frame boundaries.
pub fn trim_endpoints(clip: &AudioClip, rel_threshold: f64, frame_len: usize) -> Result<AudioClip> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidParam {
            name: "rel_threshold",
            reason: format!("must be in (0, 1), got {rel_threshold}"),
        });
    }
    if frame_len == 0 || frame_len > clip.len() {
        return Err(Error::InvalidParam {
            name: "frame_len",
            reason: format!(
                "must be in 1..={} for this clip, got {frame_len}",
                clip.len()
            ),
        });
    }

    let energies: Vec<f64> = clip
        .samples()
        .chunks(frame_len)
        .map(|frame| frame.iter().map(|s| s * s).sum::<f64>() / frame.len() as f64)
        .collect();
    let max_energy = energies.iter().cloned().fold(0.0_f64, f64::max);
    let gate = rel_threshold * max_energy;

    let first = energies.iter().position(|&e| e >= gate && max_energy > 0.0);
    let last = energies
        .iter()
        .rposition(|&e| e >= gate && max_energy > 0.0);
    match (first, last) {
        (Some(first), Some(last)) => {
            let start = first * frame_len;
            let end = ((last + 1) * frame_len).min(clip.len());
            clip.slice(start, end)
        }
        _ => Err(Error::NoSpeechDetected {
            source_path: clip.source_path().to_string(),
        }),
    }
}

/// Forces a clip to exactly `reference_len` samples: longer clips are
/// truncated at the tail, shorter clips are zero-padded at the tail.
pub fn equalize_length(subject: &AudioClip, reference_len: usize) -> Result<AudioClip> {
    if reference_len == 0 {
        return Err(Error::InvalidParam {
            name: "reference_len",
            reason: "must be positive".into(),
        });
    }
    let mut samples = subject.samples().to_vec();
    samples.resize(reference_len, 0.0);
    Ok(subject.with_samples(samples))
}

/// Picks the speaker whose signal energy is closest to the group mean.
/// Ties resolve to the earliest list position.
pub fn select_reference(clips: &[(String, AudioClip)]) -> Result<&str> {
    if clips.is_empty() {
        return Err(Error::InvalidParam {
            name: "clips",
            reason: "reference selection needs at least one clip".into(),
        });
    }
    let energies: Vec<f64> = clips.iter().map(|(_, c)| signal_energy(c)).collect();
    let mean = energies.iter().sum::<f64>() / energies.len() as f64;
    let best = energies
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - mean)
                .abs()
                .partial_cmp(&(*b - mean).abs())
                .expect("energies are finite")
        })
        .map(|(i, _)| i)
        .expect("non-empty list");
    Ok(&clips[best].0)
}
