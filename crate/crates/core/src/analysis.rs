//! Ratio-mean severity analysis.
//!
//! A subject envelope is compared against a normal reference envelope by
//! the mean of per-sample absolute ratios. The mean, divided by a
//! calibration threshold, falls into one of four deviation bands around
//! 1.0; per-word classes are then aggregated into an overall severity per
//! subject. The threshold itself is the minimum of the two ratio means
//! between repeated utterances of the normal speaker, capturing expected
//! same-speaker variability.

use serde::{Deserialize, Serialize};

use crate::envelope::{build_envelope, Envelope, DEFAULT_BLOCK_SIZE};
use crate::error::{Error, Result};
use crate::manifest::{CorpusManifest, UtteranceRecord};
use crate::signal::{equalize_length, trim_endpoints, AudioClip};
use crate::wav::load_wav;

/// Built-in threshold constant, calibrated on the original recording
/// corpus. Applied only on explicit request; a corpus-specific threshold
/// should normally be derived from three normal utterances.
pub const DEFAULT_THRESHOLD: f64 = 1.03989;

/// Default denominator guard, relative to the reference envelope peak.
pub const DEFAULT_EPSILON_REL: f64 = 1e-6;

/// Default endpoint-trim energy gate, relative to the loudest frame.
pub const DEFAULT_TRIM_REL_THRESHOLD: f64 = 0.05;

/// Default endpoint-trim frame length in samples.
pub const DEFAULT_TRIM_FRAME_LEN: usize = 100;

/// Severity of deviation from the normal reference, least to most severe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeverityClass {
    #[serde(rename = "no")]
    NoDeviation,
    #[serde(rename = "mild")]
    Mild,
    #[serde(rename = "moderate")]
    Moderate,
    #[serde(rename = "severe")]
    Large,
}

impl SeverityClass {
    pub const ALL: [SeverityClass; 4] = [
        SeverityClass::NoDeviation,
        SeverityClass::Mild,
        SeverityClass::Moderate,
        SeverityClass::Large,
    ];

    /// Output vocabulary: "no", "mild", "moderate", "severe".
    pub fn label(self) -> &'static str {
        match self {
            SeverityClass::NoDeviation => "no",
            SeverityClass::Mild => "mild",
            SeverityClass::Moderate => "moderate",
            SeverityClass::Large => "severe",
        }
    }
}

impl std::fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// The six band edges separating severity classes on the normalized ratio
/// axis. With edges `[a, b, c, d, e, f]` (default `[0.4, 0.6, 0.8, 1.2,
/// 1.8, 2.6]`) the bands partition the positive reals:
///
/// * no deviation: `c <= r <= d`
/// * mild:         `d < r <= e` or `b <= r < c`
/// * moderate:     `e < r <= f` or `a <= r < b`
/// * large:        `r > f` or `r < a`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationBands {
    edges: [f64; 6],
}

impl DeviationBands {
    pub fn new(edges: [f64; 6]) -> Result<Self> {
        if edges.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(Error::InvalidParam {
                name: "band edges",
                reason: "all edges must be finite and positive".into(),
            });
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParam {
                name: "band edges",
                reason: "edges must be strictly increasing".into(),
            });
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> [f64; 6] {
        self.edges
    }
}

impl Default for DeviationBands {
    fn default() -> Self {
        Self {
            edges: [0.4, 0.6, 0.8, 1.2, 1.8, 2.6],
        }
    }
}

/// Outcome of comparing one subject envelope against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    /// Mean over included samples of |subject| / |reference|.
    pub raw_ratio: f64,
    /// `raw_ratio / threshold`; the quantity the bands classify.
    pub normalized_ratio: f64,
    /// Samples whose reference magnitude passed the denominator guard.
    pub included_samples: usize,
    /// Samples excluded by the guard.
    pub masked_samples: usize,
}

/// One analyzed (word, speaker) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordResult {
    pub word: String,
    #[serde(rename = "speaker")]
    pub speaker_id: String,
    pub raw_ratio: f64,
    pub normalized_ratio: f64,
    pub class: SeverityClass,
}

/// Per-class result counts for one subject.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub no: usize,
    pub mild: usize,
    pub moderate: usize,
    pub severe: usize,
}

impl ClassCounts {
    pub fn get(&self, class: SeverityClass) -> usize {
        match class {
            SeverityClass::NoDeviation => self.no,
            SeverityClass::Mild => self.mild,
            SeverityClass::Moderate => self.moderate,
            SeverityClass::Large => self.severe,
        }
    }

    fn increment(&mut self, class: SeverityClass) {
        match class {
            SeverityClass::NoDeviation => self.no += 1,
            SeverityClass::Mild => self.mild += 1,
            SeverityClass::Moderate => self.moderate += 1,
            SeverityClass::Large => self.severe += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.no + self.mild + self.moderate + self.severe
    }
}

/// Per-subject roll-up: class counts and the overall severity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSummary {
    #[serde(rename = "speaker")]
    pub speaker_id: String,
    pub counts: ClassCounts,
    pub overall: SeverityClass,
}

/// Parameters that influence the analysis numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub block_size: usize,
    pub epsilon_rel: f64,
    /// Calibration threshold. `None` derives it from the manifest's three
    /// designated normal utterances.
    pub threshold: Option<f64>,
    pub trim_rel_threshold: f64,
    pub trim_frame_len: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            block_size: DEFAULT_BLOCK_SIZE,
            epsilon_rel: DEFAULT_EPSILON_REL,
            threshold: None,
            trim_rel_threshold: DEFAULT_TRIM_REL_THRESHOLD,
            trim_frame_len: DEFAULT_TRIM_FRAME_LEN,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::InvalidParam {
                name: "block_size",
                reason: "must be positive".into(),
            });
        }
        if !(self.epsilon_rel > 0.0 && self.epsilon_rel < 1.0) {
            return Err(Error::InvalidParam {
                name: "epsilon_rel",
                reason: format!("must be in (0, 1), got {}", self.epsilon_rel),
            });
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParam {
                    name: "threshold",
                    reason: format!("must be positive and finite, got {t}"),
                });
            }
        }
        if !(self.trim_rel_threshold > 0.0 && self.trim_rel_threshold < 1.0) {
            return Err(Error::InvalidParam {
                name: "trim_rel_threshold",
                reason: format!("must be in (0, 1), got {}", self.trim_rel_threshold),
            });
        }
        if self.trim_frame_len == 0 {
            return Err(Error::InvalidParam {
                name: "trim_frame_len",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Echo of every parameter that shaped a report's numbers, with the
/// threshold resolved to its concrete value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub block_size: usize,
    pub epsilon_rel: f64,
    pub threshold: f64,
    pub trim_rel_threshold: f64,
    pub trim_frame_len: usize,
}

/// Everything a corpus analysis produces.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutcome {
    pub word_results: Vec<WordResult>,
    pub summaries: Vec<SubjectSummary>,
    pub warnings: Vec<String>,
    pub config_echo: ConfigEcho,
}

/// Mean of per-sample absolute envelope ratios, with a relative guard on
/// the reference magnitude.
///
/// A sample is included when `|reference[n]| >= epsilon_rel * peak` where
/// `peak` is the maximum absolute reference value; this keeps zero-padded
/// and silent stretches from producing unbounded terms. The raw ratio is
/// the arithmetic mean of included terms; the normalized ratio divides by
/// `threshold`.
pub fn ratio_mean(
    subject: &Envelope,
    reference: &Envelope,
    epsilon_rel: f64,
    threshold: f64,
) -> Result<RatioStats> {
    if !(epsilon_rel > 0.0 && epsilon_rel < 1.0) {
        return Err(Error::InvalidParam {
            name: "epsilon_rel",
            reason: format!("must be in (0, 1), got {epsilon_rel}"),
        });
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidParam {
            name: "threshold",
            reason: format!("must be positive and finite, got {threshold}"),
        });
    }
    if subject.len() != reference.len() {
        return Err(Error::EnvelopeLengthMismatch {
            subject: subject.len(),
            reference: reference.len(),
        });
    }

    let peak = reference
        .values()
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::AllSamplesMasked);
    }
    let gate = epsilon_rel * peak;

    let mut sum = 0.0;
    let mut included = 0usize;
    for (s, r) in subject.values().iter().zip(reference.values()) {
        let denom = r.abs();
        if denom >= gate {
            sum += s.abs() / denom;
            included += 1;
        }
    }
    if included == 0 {
        return Err(Error::AllSamplesMasked);
    }
    let raw_ratio = sum / included as f64;
    Ok(RatioStats {
        raw_ratio,
        normalized_ratio: raw_ratio / threshold,
        included_samples: included,
        masked_samples: subject.len() - included,
    })
}

/// Calibration threshold from three utterances of one word by the normal
/// speaker: the minimum of the two ratio means of the second and third
/// utterance envelopes against the first.
pub fn determine_threshold(
    reference: &Envelope,
    second: &Envelope,
    third: &Envelope,
    epsilon_rel: f64,
) -> Result<f64> {
    let second_mean = ratio_mean(second, reference, epsilon_rel, 1.0)?.raw_ratio;
    let third_mean = ratio_mean(third, reference, epsilon_rel, 1.0)?.raw_ratio;
    Ok(second_mean.min(third_mean))
}

/// Maps a normalized ratio onto its severity band.
///
/// The no-deviation band is closed on both sides (`0.8 <= r <= 1.2`); the
/// outer bands alternate open/closed so every positive real lands in
/// exactly one class.
pub fn classify_deviation(normalized_ratio: f64, bands: &DeviationBands) -> Result<SeverityClass> {
    if normalized_ratio.is_nan() || normalized_ratio <= 0.0 {
        return Err(Error::NonPositiveRatio {
            value: normalized_ratio,
        });
    }
    let [large_lo, moderate_lo, no_lo, no_hi, mild_hi, moderate_hi] = bands.edges;
    let r = normalized_ratio;
    Ok(if r < large_lo {
        SeverityClass::Large
    } else if r < moderate_lo {
        SeverityClass::Moderate
    } else if r < no_lo {
        SeverityClass::Mild
    } else if r <= no_hi {
        SeverityClass::NoDeviation
    } else if r <= mild_hi {
        SeverityClass::Mild
    } else if r <= moderate_hi {
        SeverityClass::Moderate
    } else {
        SeverityClass::Large
    })
}

/// Rolls word results for one speaker into class counts and an overall
/// severity: the class with the highest count, ties resolving to the more
/// severe class.
pub fn aggregate_subject(results: &[WordResult]) -> Result<SubjectSummary> {
    let first = results.first().ok_or(Error::InvalidParam {
        name: "results",
        reason: "cannot aggregate an empty result list".into(),
    })?;
    if results.iter().any(|r| r.speaker_id != first.speaker_id) {
        return Err(Error::InvalidParam {
            name: "results",
            reason: "all results must belong to one speaker".into(),
        });
    }
    let mut counts = ClassCounts::default();
    for result in results {
        counts.increment(result.class);
    }
    let mut overall = SeverityClass::NoDeviation;
    let mut best = 0usize;
    for class in SeverityClass::ALL {
        let count = counts.get(class);
        if count >= best {
            best = count;
            overall = class;
        }
    }
    Ok(SubjectSummary {
        speaker_id: first.speaker_id.clone(),
        counts,
        overall,
    })
}

/// Loads an entry's WAV and isolates the spoken word: manual sample range
/// if the manifest provides one, energy-gate trimming otherwise.
pub fn prepare_clip(
    manifest: &CorpusManifest,
    entry: &UtteranceRecord,
    config: &AnalysisConfig,
) -> Result<AudioClip> {
    let clip = load_wav(manifest.resolve_path(entry))?;
    match (entry.start_sample, entry.end_sample) {
        (None, None) => trim_endpoints(&clip, config.trim_rel_threshold, config.trim_frame_len),
        (start, end) => clip.slice(start.unwrap_or(0), end.unwrap_or(clip.len())),
    }
}

/// Derives the calibration threshold from the manifest's three designated
/// normal utterances: trim, equalize the second and third to the first,
/// build envelopes, take the minimum ratio mean.
pub fn threshold_from_manifest(manifest: &CorpusManifest, config: &AnalysisConfig) -> Result<f64> {
    config.validate()?;
    let entries = manifest.threshold_entries()?;
    let reference_clip = prepare_clip(manifest, entries[0], config)?;
    let second_clip = equalize_length(
        &prepare_clip(manifest, entries[1], config)?,
        reference_clip.len(),
    )?;
    let third_clip = equalize_length(
        &prepare_clip(manifest, entries[2], config)?,
        reference_clip.len(),
    )?;
    let reference = build_envelope(&reference_clip, config.block_size)?;
    let second = build_envelope(&second_clip, config.block_size)?;
    let third = build_envelope(&third_clip, config.block_size)?;
    determine_threshold(&reference, &second, &third, config.epsilon_rel)
}

struct WordTask<'a> {
    word: &'a str,
    speaker: &'a str,
    normal: &'a UtteranceRecord,
    pathological: &'a UtteranceRecord,
}

fn analyze_word(
    manifest: &CorpusManifest,
    task: &WordTask<'_>,
    config: &AnalysisConfig,
    threshold: f64,
    bands: &DeviationBands,
) -> Result<(WordResult, Option<String>)> {
    let run = || -> Result<(WordResult, Option<String>)> {
        let reference_clip = prepare_clip(manifest, task.normal, config)?;
        let subject_clip = prepare_clip(manifest, task.pathological, config)?;
        let rate_warning = (subject_clip.sample_rate() != reference_clip.sample_rate()).then(|| {
            format!(
                "word \"{}\" speaker \"{}\": sample rate {} Hz differs from reference {} Hz; proceeding on raw samples",
                task.word,
                task.speaker,
                subject_clip.sample_rate(),
                reference_clip.sample_rate()
            )
        });
        let subject_clip = equalize_length(&subject_clip, reference_clip.len())?;
        let reference = build_envelope(&reference_clip, config.block_size)?;
        let subject = build_envelope(&subject_clip, config.block_size)?;
        let stats = ratio_mean(&subject, &reference, config.epsilon_rel, threshold)?;
        let class = classify_deviation(stats.normalized_ratio, bands)?;
        Ok((
            WordResult {
                word: task.word.to_string(),
                speaker_id: task.speaker.to_string(),
                raw_ratio: stats.raw_ratio,
                normalized_ratio: stats.normalized_ratio,
                class,
            },
            rate_warning,
        ))
    };
    run().map_err(|source| Error::WordAnalysis {
        word: task.word.to_string(),
        speaker: task.speaker.to_string(),
        source: Box::new(source),
    })
}

/// Runs the full pipeline over a corpus: for every word and pathological
/// speaker, trim, equalize to the normal clip, build both envelopes,
/// compute the ratio mean, classify, then aggregate per speaker.
///
/// Word results follow manifest order (words outer, speakers inner)
/// regardless of `jobs`; per-pair analyses run on a worker pool of that
/// size. Words lacking a normal or pathological recording are skipped with
/// a warning.
pub fn analyze_corpus(
    manifest: &CorpusManifest,
    config: &AnalysisConfig,
    jobs: usize,
) -> Result<AnalysisOutcome> {
    config.validate()?;
    if jobs == 0 {
        return Err(Error::InvalidParam {
            name: "jobs",
            reason: "must be positive".into(),
        });
    }

    let threshold = match config.threshold {
        Some(t) => t,
        None => threshold_from_manifest(manifest, config)?,
    };
    let bands = DeviationBands::default();

    let speakers = manifest.pathological_speakers();
    let mut warnings = Vec::new();
    let mut tasks = Vec::new();
    let mut words_with_normal = 0usize;
    for word in &manifest.words {
        let Some(normal) = manifest.normal_entry(word) else {
            warnings.push(format!(
                "word \"{word}\": no normal recording by \"{}\"; skipped",
                manifest.normal_speaker
            ));
            continue;
        };
        words_with_normal += 1;
        for speaker in &speakers {
            match manifest.pathological_entry(word, speaker) {
                Some(pathological) => tasks.push(WordTask {
                    word,
                    speaker,
                    normal,
                    pathological,
                }),
                None => warnings.push(format!(
                    "word \"{word}\": no pathological recording by \"{speaker}\"; skipped"
                )),
            }
        }
    }
    if words_with_normal == 0 {
        return Err(Error::NoNormalRecordings);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParam {
            name: "jobs",
            reason: e.to_string(),
        })?;
    let analyzed: Vec<Result<(WordResult, Option<String>)>> = pool.install(|| {
        use rayon::prelude::*;
        tasks
            .par_iter()
            .map(|task| analyze_word(manifest, task, config, threshold, &bands))
            .collect()
    });

    let mut word_results = Vec::with_capacity(tasks.len());
    for outcome in analyzed {
        let (result, rate_warning) = outcome?;
        warnings.extend(rate_warning);
        word_results.push(result);
    }

    let mut summaries = Vec::new();
    for speaker in &speakers {
        let theirs: Vec<WordResult> = word_results
            .iter()
            .filter(|r| r.speaker_id == *speaker)
            .cloned()
            .collect();
        if !theirs.is_empty() {
            summaries.push(aggregate_subject(&theirs)?);
        }
    }

    Ok(AnalysisOutcome {
        word_results,
        summaries,
        warnings,
        config_echo: ConfigEcho {
            block_size: config.block_size,
            epsilon_rel: config.epsilon_rel,
            threshold,
            trim_rel_threshold: config.trim_rel_threshold,
            trim_frame_len: config.trim_frame_len,
        },
    })
}
