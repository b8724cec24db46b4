//! WAV decoding into normalized clips, plus a small writer for fixtures.
//!
//! Reads RIFF/WAVE PCM: 8/16/24/32-bit integer and 32-bit float, mono or
//! multi-channel. Integer samples are scaled by the format's full-scale
//! value (e.g. 32768 for 16-bit); multi-channel frames are mean-downmixed
//! to mono. Float samples are clamped to [-1, 1] so the clip invariant
//! holds for any input file.

use std::path::Path;

use hound::SampleFormat;

use crate::error::{Error, Result};
use crate::signal::AudioClip;

/// Decodes a PCM WAV file into a normalized mono [`AudioClip`].
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| map_hound_error(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::MalformedWav {
            path: path.to_path_buf(),
            reason: "zero channels".into(),
        });
    }
    if reader.duration() == 0 {
        return Err(Error::EmptyWavData {
            path: path.to_path_buf(),
        });
    }

    let interleaved: Vec<f64> = match spec.sample_format {
        SampleFormat::Int => {
            let full_scale = (1i64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / full_scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| map_hound_error(path, e))?
        }
        SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(|v| (v as f64).clamp(-1.0, 1.0)))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound_error(path, e))?,
    };

    let frames = interleaved.len() / channels;
    let mono: Vec<f64> = (0..frames)
        .map(|frame| {
            let start = frame * channels;
            interleaved[start..start + channels].iter().sum::<f64>() / channels as f64
        })
        .collect();

    AudioClip::new(mono, spec.sample_rate, path.display().to_string())
}

/// Writes a clip as 16-bit PCM mono WAV. Used by fixture generation.
pub fn save_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound_error(path, e))?;
    for &sample in clip.samples() {
        let quantized = (sample * 32767.0).round() as i16;
        writer
            .write_sample(quantized)
            .map_err(|e| map_hound_error(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound_error(path, e))
}

fn map_hound_error(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        hound::Error::Unsupported => Error::UnsupportedWav {
            path: path.to_path_buf(),
        },
        hound::Error::FormatError(reason) => Error::MalformedWav {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        },
        other => Error::MalformedWav {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    }
}
