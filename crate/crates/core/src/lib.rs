//! Speech-envelope severity analysis.
//!
//! The pipeline estimates how far a subject's speech deviates from a
//! normal reference: recordings are trimmed to the spoken word, reduced
//! to a block-wise max/min piecewise-linear envelope, compared by the
//! mean of per-sample absolute envelope ratios, and the normalized ratio
//! is banded into no/mild/moderate/severe deviation classes. Per-word
//! classes aggregate into an overall severity per subject.
//!
//! Modules follow the pipeline: [`wav`] and [`signal`] load and prepare
//! clips, [`manifest`] describes a corpus, [`envelope`] builds the
//! envelope, [`analysis`] computes thresholds and classifications,
//! [`report`] renders results, and [`synth`] generates deterministic
//! test fixtures.

pub mod analysis;
pub mod envelope;
pub mod error;
pub mod manifest;
pub mod report;
pub mod signal;
pub mod synth;
pub mod wav;

pub use analysis::{
    aggregate_subject, analyze_corpus, classify_deviation, determine_threshold, ratio_mean,
    threshold_from_manifest, AnalysisConfig, AnalysisOutcome, ClassCounts, ConfigEcho,
    DeviationBands, RatioStats, SeverityClass, SubjectSummary, WordResult, DEFAULT_THRESHOLD,
};
pub use envelope::{
    block_extrema, build_envelope, truncate_to_block_multiple, BlockExtrema, Envelope,
    DEFAULT_BLOCK_SIZE,
};
pub use error::{Error, Result};
pub use manifest::{CorpusManifest, Role, UtteranceRecord};
pub use report::{render, ReportDocument, ReportFormat};
pub use signal::{equalize_length, select_reference, signal_energy, trim_endpoints, AudioClip};
pub use synth::{degrade, generate, DegradeKind, SynthSpec};
pub use wav::{load_wav, save_wav};
