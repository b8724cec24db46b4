//! Corpus manifest: a JSON document describing the recordings to analyze,
//! which speaker is the normal reference, and which three utterances seed
//! the threshold.
//!
//! Entry paths are relative to the manifest's directory. Entries may carry
//! manual `start_sample`/`end_sample` overrides that replace automatic
//! endpoint trimming for that recording.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a speaker is the normal cohort or a pathological subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Normal,
    Pathological,
}

/// One recording: a word uttered by a speaker, stored in a WAV file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UtteranceRecord {
    pub word: String,
    pub speaker_id: String,
    pub role: Role,
    pub repetition: u32,
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_sample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_sample: Option<usize>,
}

/// The corpus description loaded from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub words: Vec<String>,
    pub normal_speaker: String,
    pub threshold_word: String,
    pub threshold_repetitions: Vec<u32>,
    pub entries: Vec<UtteranceRecord>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl CorpusManifest {
    /// Loads and validates a manifest from a JSON file. Relative entry
    /// paths resolve against the manifest's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut manifest: CorpusManifest =
            serde_json::from_str(&text).map_err(|source| Error::ManifestParse {
                path: path.to_path_buf(),
                source,
            })?;
        manifest.base_dir = path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf();
        manifest.validate()?;
        Ok(manifest)
    }

    /// Builds a manifest in memory (for tests and generators). `base_dir`
    /// anchors relative entry paths.
    pub fn from_parts(
        words: Vec<String>,
        normal_speaker: String,
        threshold_word: String,
        threshold_repetitions: Vec<u32>,
        entries: Vec<UtteranceRecord>,
        base_dir: PathBuf,
    ) -> Result<Self> {
        let manifest = Self {
            words,
            normal_speaker,
            threshold_word,
            threshold_repetitions,
            entries,
            base_dir,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    fn validate(&self) -> Result<()> {
        if self.words.is_empty() {
            return Err(Error::InvalidManifest {
                reason: "words list is empty".into(),
            });
        }
        let mut seen_words = HashSet::new();
        for word in &self.words {
            if !seen_words.insert(word.as_str()) {
                return Err(Error::InvalidManifest {
                    reason: format!("duplicate word \"{word}\""),
                });
            }
        }
        if self.threshold_repetitions.len() != 3 {
            return Err(Error::InvalidManifest {
                reason: format!(
                    "threshold_repetitions must list exactly 3 repetitions, got {}",
                    self.threshold_repetitions.len()
                ),
            });
        }
        if !seen_words.contains(self.threshold_word.as_str()) {
            return Err(Error::InvalidManifest {
                reason: format!(
                    "threshold_word \"{}\" is not in the words list",
                    self.threshold_word
                ),
            });
        }
        let mut seen_entries = HashSet::new();
        for entry in &self.entries {
            if entry.repetition == 0 {
                return Err(Error::InvalidManifest {
                    reason: format!(
                        "entry {}/{} has repetition 0; repetitions start at 1",
                        entry.word, entry.speaker_id
                    ),
                });
            }
            if !seen_words.contains(entry.word.as_str()) {
                return Err(Error::InvalidManifest {
                    reason: format!(
                        "entry references word \"{}\" missing from the words list",
                        entry.word
                    ),
                });
            }
            if !seen_entries.insert((
                entry.word.as_str(),
                entry.speaker_id.as_str(),
                entry.repetition,
            )) {
                return Err(Error::InvalidManifest {
                    reason: format!(
                        "duplicate entry for (word={}, speaker={}, repetition={})",
                        entry.word, entry.speaker_id, entry.repetition
                    ),
                });
            }
            if let (Some(start), Some(end)) = (entry.start_sample, entry.end_sample) {
                if start >= end {
                    return Err(Error::InvalidManifest {
                        reason: format!(
                            "entry {}/{} has empty manual range {start}..{end}",
                            entry.word, entry.speaker_id
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Absolute path of an entry's WAV file.
    pub fn resolve_path(&self, entry: &UtteranceRecord) -> PathBuf {
        self.base_dir.join(&entry.path)
    }

    /// The three designated threshold utterances, in repetition-list order.
    pub fn threshold_entries(&self) -> Result<[&UtteranceRecord; 3]> {
        let mut found = Vec::with_capacity(3);
        for &rep in &self.threshold_repetitions {
            let entry = self
                .entries
                .iter()
                .find(|e| {
                    e.word == self.threshold_word
                        && e.speaker_id == self.normal_speaker
                        && e.repetition == rep
                        && e.role == Role::Normal
                })
                .ok_or_else(|| Error::ThresholdUnavailable {
                    reason: format!(
                        "no normal-role entry for threshold word \"{}\" by \"{}\" repetition {rep}",
                        self.threshold_word, self.normal_speaker
                    ),
                })?;
            found.push(entry);
        }
        Ok([found[0], found[1], found[2]])
    }

    /// First normal-speaker recording of a word, in manifest order.
    pub fn normal_entry(&self, word: &str) -> Option<&UtteranceRecord> {
        self.entries.iter().find(|e| {
            e.word == word && e.speaker_id == self.normal_speaker && e.role == Role::Normal
        })
    }

    /// First pathological recording of a word by a speaker, in manifest order.
    pub fn pathological_entry(&self, word: &str, speaker: &str) -> Option<&UtteranceRecord> {
        self.entries
            .iter()
            .find(|e| e.word == word && e.speaker_id == speaker && e.role == Role::Pathological)
    }

    /// Pathological speakers in first-appearance order.
    pub fn pathological_speakers(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .filter(|e| e.role == Role::Pathological)
            .filter_map(|e| {
                if seen.insert(e.speaker_id.as_str()) {
                    Some(e.speaker_id.as_str())
                } else {
                    None
                }
            })
            .collect()
    }
}
