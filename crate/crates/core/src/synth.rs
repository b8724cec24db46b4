//! Deterministic synthetic clips and controlled degradations for testing
//! the pipeline without a recorded corpus.
//!
//! Noise uses ChaCha8 seeded explicitly, with the 53-bit u64-to-f64
//! conversion spelled out here, so fixtures are reproducible across
//! platforms and library versions.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signal::AudioClip;

/// Recipe for a synthetic clip. Identical specs (including seeds) always
/// generate bit-identical output.
#[derive(Debug, Clone, PartialEq)]
pub enum SynthSpec {
    /// `amplitude * sin(2*pi*frequency*n/rate)` with linear fade-in/out
    /// ramps over the first and last 10% of the clip.
    SineBurst {
        duration_samples: usize,
        sample_rate: u32,
        amplitude: f64,
        frequency: f64,
    },
    /// Seeded uniform noise in `[-amplitude, amplitude]`.
    NoiseBurst {
        duration_samples: usize,
        sample_rate: u32,
        amplitude: f64,
        seed: u64,
    },
    /// `scale` times the clip generated by `base`.
    ScaledCopy { scale: f64, base: Box<SynthSpec> },
    /// Sample-wise sum of the parts, zero-extended to the longest part.
    /// All parts must share one sample rate.
    Composite { parts: Vec<SynthSpec> },
}

fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    // 53 high bits -> [0, 1).
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&amplitude) {
        return Err(Error::InvalidParam {
            name: "amplitude",
            reason: format!("must be in [0, 1], got {amplitude}"),
        });
    }
    Ok(())
}

fn check_duration(duration_samples: usize) -> Result<()> {
    if duration_samples == 0 {
        return Err(Error::InvalidParam {
            name: "duration_samples",
            reason: "must be positive".into(),
        });
    }
    Ok(())
}

fn check_rate(sample_rate: u32) -> Result<()> {
    if sample_rate == 0 {
        return Err(Error::InvalidParam {
            name: "sample_rate",
            reason: "must be positive".into(),
        });
    }
    Ok(())
}

/// Generates the clip a spec describes.
pub fn generate(spec: &SynthSpec) -> Result<AudioClip> {
    match spec {
        SynthSpec::SineBurst {
            duration_samples,
            sample_rate,
            amplitude,
            frequency,
        } => {
            check_duration(*duration_samples)?;
            check_rate(*sample_rate)?;
            check_amplitude(*amplitude)?;
            if !(frequency.is_finite() && *frequency >= 0.0) {
                return Err(Error::InvalidParam {
                    name: "frequency",
                    reason: format!("must be finite and non-negative, got {frequency}"),
                });
            }
            let n = *duration_samples;
            let fade = n / 10;
            let omega = 2.0 * std::f64::consts::PI * frequency / *sample_rate as f64;
            let samples = (0..n)
                .map(|i| {
                    let mut gain = 1.0;
                    if fade > 0 {
                        if i < fade {
                            gain = i as f64 / fade as f64;
                        }
                        let from_end = n - 1 - i;
                        if from_end < fade {
                            gain = gain.min(from_end as f64 / fade as f64);
                        }
                    }
                    amplitude * gain * (omega * i as f64).sin()
                })
                .collect();
            AudioClip::new(samples, *sample_rate, "synth:sine")
        }
        SynthSpec::NoiseBurst {
            duration_samples,
            sample_rate,
            amplitude,
            seed,
        } => {
            check_duration(*duration_samples)?;
            check_rate(*sample_rate)?;
            check_amplitude(*amplitude)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let samples = (0..*duration_samples)
                .map(|_| amplitude * (2.0 * unit_uniform(&mut rng) - 1.0))
                .collect();
            AudioClip::new(samples, *sample_rate, "synth:noise")
        }
        SynthSpec::ScaledCopy { scale, base } => {
            if !(scale.is_finite() && *scale > 0.0) {
                return Err(Error::InvalidParam {
                    name: "scale",
                    reason: format!("must be positive and finite, got {scale}"),
                });
            }
            let base_clip = generate(base)?;
            scale_clip(&base_clip, *scale)
        }
        SynthSpec::Composite { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidParam {
                    name: "parts",
                    reason: "composite needs at least one part".into(),
                });
            }
            let clips: Vec<AudioClip> = parts.iter().map(generate).collect::<Result<_>>()?;
            let rate = clips[0].sample_rate();
            if clips.iter().any(|c| c.sample_rate() != rate) {
                return Err(Error::InvalidParam {
                    name: "parts",
                    reason: "all composite parts must share one sample rate".into(),
                });
            }
            let len = clips.iter().map(AudioClip::len).max().unwrap_or(0);
            let mut samples = vec![0.0; len];
            for clip in &clips {
                for (acc, s) in samples.iter_mut().zip(clip.samples()) {
                    *acc += s;
                }
            }
            let peak = samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
            if peak > 1.0 {
                return Err(Error::WouldClip { peak });
            }
            AudioClip::new(samples, rate, "synth:composite")
        }
    }
}

fn scale_clip(clip: &AudioClip, scale: f64) -> Result<AudioClip> {
    let samples: Vec<f64> = clip.samples().iter().map(|s| s * scale).collect();
    let peak = samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    if peak > 1.0 {
        return Err(Error::WouldClip { peak });
    }
    AudioClip::new(samples, clip.sample_rate(), clip.source_path())
}

/// Controlled degradations applied to a clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegradeKind {
    /// Multiply every sample by `magnitude`.
    AmplitudeScale,
    /// Add seeded uniform noise with peak `magnitude`; the sum is clamped
    /// to [-1, 1].
    AdditiveNoise,
    /// Zero the trailing `magnitude` fraction of samples.
    TailDrop,
}

/// Applies one degradation. `seed` matters only for [`DegradeKind::AdditiveNoise`].
pub fn degrade(
    clip: &AudioClip,
    kind: DegradeKind,
    magnitude: f64,
    seed: u64,
) -> Result<AudioClip> {
    if clip.is_empty() {
        return Err(Error::EmptyClip);
    }
    match kind {
        DegradeKind::AmplitudeScale => {
            if !(magnitude.is_finite() && magnitude >= 0.0) {
                return Err(Error::InvalidParam {
                    name: "magnitude",
                    reason: format!("scale must be finite and non-negative, got {magnitude}"),
                });
            }
            scale_clip(clip, magnitude)
        }
        DegradeKind::AdditiveNoise => {
            if !(0.0..=1.0).contains(&magnitude) {
                return Err(Error::InvalidParam {
                    name: "magnitude",
                    reason: format!("noise peak must be in [0, 1], got {magnitude}"),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples = clip
                .samples()
                .iter()
                .map(|s| {
                    let noise = magnitude * (2.0 * unit_uniform(&mut rng) - 1.0);
                    (s + noise).clamp(-1.0, 1.0)
                })
                .collect();
            Ok(clip.with_samples(samples))
        }
        DegradeKind::TailDrop => {
            if !(0.0..=1.0).contains(&magnitude) {
                return Err(Error::InvalidParam {
                    name: "magnitude",
                    reason: format!("drop fraction must be in [0, 1], got {magnitude}"),
                });
            }
            let drop = ((clip.len() as f64) * magnitude).floor() as usize;
            let keep = clip.len() - drop.min(clip.len());
            let mut samples = clip.samples().to_vec();
            for s in samples.iter_mut().skip(keep) {
                *s = 0.0;
            }
            Ok(clip.with_samples(samples))
        }
    }
}
