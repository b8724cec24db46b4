//! Report rendering: JSON for storage and re-rendering, CSV for
//! spreadsheets, and aligned text tables for reading.
//!
//! Rendering is deterministic: the same document and format always
//! produce identical bytes, and a JSON render parses back into an equal
//! document.

use serde::{Deserialize, Serialize};

use crate::analysis::{AnalysisOutcome, ConfigEcho, SubjectSummary, WordResult};
use crate::error::{Error, Result};

/// A complete analysis report: per-word results, per-subject summaries,
/// the parameters that produced them, and any skip/mismatch warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: ConfigEcho,
    pub words: Vec<WordResult>,
    pub subjects: Vec<SubjectSummary>,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn from_outcome(outcome: AnalysisOutcome) -> Self {
        Self {
            config: outcome.config_echo,
            words: outcome.word_results,
            subjects: outcome.summaries,
            warnings: outcome.warnings,
        }
    }

    /// Parses a document previously rendered as JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::ReportParse { source })
    }
}

/// Output encodings for [`render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!(
                "unknown format \"{other}\" (expected json, csv, or text)"
            )),
        }
    }
}

/// Renders a document in the requested format.
pub fn render(doc: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => render_json(doc),
        ReportFormat::Csv => render_csv(doc),
        ReportFormat::Text => render_text(doc),
    }
}

fn render_json(doc: &ReportDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("report serialization is total");
    out.push('\n');
    out
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn render_csv(doc: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str("word,speaker,raw_ratio,normalized_ratio,class\n");
    for w in &doc.words {
        out.push_str(&format!(
            "{},{},{:.5},{:.5},{}\n",
            csv_field(&w.word),
            csv_field(&w.speaker_id),
            w.raw_ratio,
            w.normalized_ratio,
            w.class
        ));
    }
    out.push('\n');
    out.push_str("speaker,no,mild,moderate,large,overall\n");
    for s in &doc.subjects {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&s.speaker_id),
            s.counts.no,
            s.counts.mild,
            s.counts.moderate,
            s.counts.severe,
            s.overall
        ));
    }
    out
}

fn render_aligned(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 < row.len() {
                line.push_str(&format!("{cell:<width$}  ", width = widths[c]));
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "threshold {}  block size {}  epsilon {}  trim gate {}  trim frame {}\n\n",
        doc.config.threshold,
        doc.config.block_size,
        doc.config.epsilon_rel,
        doc.config.trim_rel_threshold,
        doc.config.trim_frame_len
    ));

    let mut word_rows = vec![vec![
        "word".to_string(),
        "particulars".to_string(),
        "ratio value".to_string(),
        "deviation".to_string(),
    ]];
    for w in &doc.words {
        word_rows.push(vec![
            w.word.clone(),
            w.speaker_id.clone(),
            format!("{:.5}", w.raw_ratio),
            w.class.to_string(),
        ]);
    }
    out.push_str(&render_aligned(&word_rows));

    out.push('\n');
    let mut subject_rows = vec![vec![
        "speaker".to_string(),
        "no".to_string(),
        "mild".to_string(),
        "moderate".to_string(),
        "large".to_string(),
        "overall".to_string(),
    ]];
    for s in &doc.subjects {
        subject_rows.push(vec![
            s.speaker_id.clone(),
            s.counts.no.to_string(),
            s.counts.mild.to_string(),
            s.counts.moderate.to_string(),
            s.counts.severe.to_string(),
            s.overall.to_string(),
        ]);
    }
    out.push_str(&render_aligned(&subject_rows));

    if !doc.warnings.is_empty() {
        out.push('\n');
        for warning in &doc.warnings {
            out.push_str(&format!("warning: {warning}\n"));
        }
    }
    out
}
