//! Error types shared across the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by loading, transforming, or analyzing speech recordings.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The file could not be opened or read.
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The file is not well-formed RIFF/WAVE data.
    #[error("malformed WAV file {path}: {reason}")]
    MalformedWav { path: PathBuf, reason: String },

    /// The WAV file uses an encoding outside the supported PCM set.
    #[error(
        "unsupported WAV encoding in {path}: expected 8/16/24-bit integer or 32-bit float PCM"
    )]
    UnsupportedWav { path: PathBuf },

    /// The WAV data chunk contains no frames.
    #[error("WAV file {path} has a zero-length data chunk")]
    EmptyWavData { path: PathBuf },

    /// An operation that requires samples received an empty clip.
    #[error("audio clip is empty")]
    EmptyClip,

    /// A clip sample falls outside the normalized [-1, 1] range.
    #[error("sample {value} at index {index} is outside [-1, 1]")]
    SampleOutOfRange { index: usize, value: f64 },

    /// A parameter violates its documented range.
    #[error("invalid {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// Every frame fell below the energy gate; there is nothing to trim to.
    #[error("no speech detected in {source_path}")]
    NoSpeechDetected { source_path: String },

    /// The clip is shorter than a single envelope block.
    #[error("clip has {len} samples, shorter than one block of {block_size}")]
    ClipTooShort { len: usize, block_size: usize },

    /// The clip length is not an exact multiple of the block size.
    #[error("clip length {len} is not a multiple of block size {block_size}")]
    NotBlockAligned { len: usize, block_size: usize },

    /// Subject and reference envelopes differ in length.
    #[error("envelope length mismatch: subject {subject}, reference {reference}")]
    EnvelopeLengthMismatch { subject: usize, reference: usize },

    /// The denominator guard excluded every sample; the reference envelope is
    /// effectively zero.
    #[error("all samples masked: reference envelope is effectively zero")]
    AllSamplesMasked,

    /// A ratio that must be positive was zero, negative, or NaN.
    #[error("ratio must be positive, got {value}")]
    NonPositiveRatio { value: f64 },

    /// The manifest file could not be parsed as JSON.
    #[error("cannot parse manifest {path}: {source}")]
    ManifestParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// The manifest parsed but violates a structural rule.
    #[error("invalid manifest: {reason}")]
    InvalidManifest { reason: String },

    /// No word in the manifest has a recording by the normal speaker.
    #[error("no normal recording found for any word")]
    NoNormalRecordings,

    /// A word could not be analyzed end to end.
    #[error("cannot analyze word \"{word}\" for speaker \"{speaker}\": {source}")]
    WordAnalysis {
        word: String,
        speaker: String,
        #[source]
        source: Box<Error>,
    },

    /// No threshold was supplied and none could be derived from the manifest.
    #[error("threshold unavailable: {reason}")]
    ThresholdUnavailable { reason: String },

    /// A stored report could not be parsed back into a document.
    #[error("cannot parse report: {source}")]
    ReportParse {
        #[source]
        source: serde_json::Error,
    },

    /// A synthesis or degradation step would push samples outside [-1, 1].
    #[error("operation would clip: peak amplitude {peak} exceeds 1.0")]
    WouldClip { peak: f64 },
}
