//! `speechsev` — batch speech-envelope severity analysis.
//!
//! Subcommands: `threshold` derives the calibration threshold from a
//! manifest's three designated normal utterances, `analyze` runs the
//! full corpus pipeline and writes a report, `envelope` dumps one clip's
//! envelope for plotting, `gen` emits synthetic WAV fixtures, and
//! `report` re-renders a stored JSON report in another format.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use speechsev_core::analysis::{
    analyze_corpus, threshold_from_manifest, AnalysisConfig, DEFAULT_THRESHOLD,
};
use speechsev_core::envelope::build_envelope;
use speechsev_core::manifest::CorpusManifest;
use speechsev_core::report::{render, ReportDocument, ReportFormat};
use speechsev_core::signal::trim_endpoints;
use speechsev_core::synth::{generate, SynthSpec};
use speechsev_core::wav::{load_wav, save_wav};

#[derive(Parser)]
#[command(
    name = "speechsev",
    version,
    about = "Estimate speech-disability severity from block-wise speech envelopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the calibration threshold from the manifest's designated utterances
    Threshold(ThresholdArgs),
    /// Analyze a corpus and write a per-word and per-subject report
    Analyze(AnalyzeArgs),
    /// Dump one clip's envelope (and optionally its anchors) as CSV
    Envelope(EnvelopeArgs),
    /// Generate a synthetic WAV fixture
    Gen(GenArgs),
    /// Re-render a stored JSON report in another format
    Report(ReportArgs),
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must be a fraction in (0, 1), got {v}"))
    }
}

fn parse_positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

fn parse_positive_usize(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn parse_unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must be in [0, 1], got {v}"))
    }
}

/// Analysis parameters shared by `threshold` and `analyze`. CLI flags
/// override config-file values, which override built-in defaults.
#[derive(Args)]
struct AnalysisFlags {
    /// Envelope block size in samples
    #[arg(long, value_parser = parse_positive_usize)]
    block_size: Option<usize>,
    /// Denominator guard, relative to the reference envelope peak
    #[arg(long, value_parser = parse_fraction)]
    epsilon_rel: Option<f64>,
    /// Endpoint-trim energy gate, relative to the loudest frame
    #[arg(long, value_parser = parse_fraction)]
    trim_rel_threshold: Option<f64>,
    /// Endpoint-trim frame length in samples
    #[arg(long, value_parser = parse_positive_usize)]
    trim_frame_len: Option<usize>,
    /// JSON file with analysis parameters
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Optional analysis parameters loaded from a JSON config file.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    block_size: Option<usize>,
    epsilon_rel: Option<f64>,
    threshold: Option<f64>,
    trim_rel_threshold: Option<f64>,
    trim_frame_len: Option<usize>,
}

impl AnalysisFlags {
    /// Defaults, overlaid by the config file, overlaid by CLI flags.
    fn resolve(&self, explicit_threshold: Option<f64>) -> anyhow::Result<AnalysisConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .with_context(|| format!("cannot parse config file {}", path.display()))?
            }
            None => ConfigFile::default(),
        };
        let defaults = AnalysisConfig::default();
        let config = AnalysisConfig {
            block_size: self
                .block_size
                .or(file.block_size)
                .unwrap_or(defaults.block_size),
            epsilon_rel: self
                .epsilon_rel
                .or(file.epsilon_rel)
                .unwrap_or(defaults.epsilon_rel),
            threshold: explicit_threshold.or(file.threshold),
            trim_rel_threshold: self
                .trim_rel_threshold
                .or(file.trim_rel_threshold)
                .unwrap_or(defaults.trim_rel_threshold),
            trim_frame_len: self
                .trim_frame_len
                .or(file.trim_frame_len)
                .unwrap_or(defaults.trim_frame_len),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct ThresholdArgs {
    /// Corpus manifest (JSON)
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    analysis: AnalysisFlags,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Corpus manifest (JSON)
    #[arg(long)]
    manifest: PathBuf,
    /// Report file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report encoding
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Calibration threshold; overrides derivation from the manifest
    #[arg(long, value_parser = parse_positive_f64, conflicts_with = "paper_threshold")]
    threshold: Option<f64>,
    /// Use the built-in default threshold constant (1.03989) instead of
    /// deriving one from this corpus
    #[arg(long)]
    paper_threshold: bool,
    /// Worker pool size; defaults to the processor count
    #[arg(long, env = "SPEECHSEV_JOBS", value_parser = parse_positive_usize)]
    jobs: Option<usize>,
    #[command(flatten)]
    analysis: AnalysisFlags,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// WAV file to analyze
    #[arg(long)]
    input: PathBuf,
    /// Per-sample CSV (`sample_index,signal,envelope`); standard output
    /// when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Anchor CSV (`anchor_index,amplitude`)
    #[arg(long)]
    anchors_out: Option<PathBuf>,
    /// Envelope block size in samples
    #[arg(long, value_parser = parse_positive_usize, default_value_t = 100)]
    block_size: usize,
    /// Skip endpoint trimming
    #[arg(long)]
    no_trim: bool,
    /// Endpoint-trim energy gate, relative to the loudest frame
    #[arg(long, value_parser = parse_fraction, default_value_t = 0.05)]
    trim_rel_threshold: f64,
    /// Endpoint-trim frame length in samples
    #[arg(long, value_parser = parse_positive_usize, default_value_t = 100)]
    trim_frame_len: usize,
}

#[derive(Args)]
struct GenArgs {
    /// Fixture kind
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Duration in samples
    #[arg(long, value_parser = parse_positive_usize)]
    dur: usize,
    /// Sample rate in Hz
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    rate: u32,
    /// Peak amplitude in [0, 1]
    #[arg(long, value_parser = parse_unit_interval, default_value_t = 0.8)]
    amp: f64,
    /// Sine frequency in Hz
    #[arg(long, default_value_t = 440.0)]
    freq: f64,
    /// Noise seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output WAV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Sine,
    Noise,
}

#[derive(Args)]
struct ReportArgs {
    /// Stored JSON report
    #[arg(long)]
    input: PathBuf,
    /// Re-rendered report file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Target encoding
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl From<OutputFormat> for ReportFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => ReportFormat::Json,
            OutputFormat::Csv => ReportFormat::Csv,
            OutputFormat::Text => ReportFormat::Text,
        }
    }
}

/// Writes to `path` atomically (temp file in the same directory, then
/// rename), or to standard output when `path` is `None`.
fn write_output(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match path {
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("cannot write to standard output")?;
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
                .context("cannot create temporary output file")?;
            tmp.write_all(content.as_bytes())
                .context("cannot write output")?;
            tmp.persist(path)
                .with_context(|| format!("cannot move output into place at {}", path.display()))?;
        }
    }
    Ok(())
}

fn cmd_threshold(args: &ThresholdArgs) -> anyhow::Result<()> {
    let config = args.analysis.resolve(None)?;
    let manifest = CorpusManifest::load(&args.manifest)?;
    let threshold = threshold_from_manifest(&manifest, &config)?;
    println!("{threshold:?}");
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let explicit = if args.paper_threshold {
        Some(DEFAULT_THRESHOLD)
    } else {
        args.threshold
    };
    let config = args.analysis.resolve(explicit)?;
    let jobs = args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let manifest = CorpusManifest::load(&args.manifest)?;
    let outcome = analyze_corpus(&manifest, &config, jobs)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    let document = ReportDocument::from_outcome(outcome);
    write_output(args.out.as_deref(), &render(&document, args.format.into()))
}

fn cmd_envelope(args: &EnvelopeArgs) -> anyhow::Result<()> {
    let clip = load_wav(&args.input)?;
    let clip = if args.no_trim {
        clip
    } else {
        trim_endpoints(&clip, args.trim_rel_threshold, args.trim_frame_len)?
    };
    let envelope = build_envelope(&clip, args.block_size)?;

    let mut csv = String::from("sample_index,signal,envelope\n");
    for (i, (&signal, &value)) in clip.samples().iter().zip(envelope.values()).enumerate() {
        csv.push_str(&format!("{i},{signal},{value}\n"));
    }
    write_output(args.out.as_deref(), &csv)?;

    if let Some(anchors_path) = &args.anchors_out {
        let mut csv = String::from("anchor_index,amplitude\n");
        for &(index, amplitude) in envelope.anchors() {
            csv.push_str(&format!("{index},{amplitude}\n"));
        }
        write_output(Some(anchors_path), &csv)?;
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let spec = match args.kind {
        GenKind::Sine => {
            if !(args.freq.is_finite() && args.freq >= 0.0) {
                bail!("--freq must be finite and non-negative, got {}", args.freq);
            }
            SynthSpec::SineBurst {
                duration_samples: args.dur,
                sample_rate: args.rate,
                amplitude: args.amp,
                frequency: args.freq,
            }
        }
        GenKind::Noise => SynthSpec::NoiseBurst {
            duration_samples: args.dur,
            sample_rate: args.rate,
            amplitude: args.amp,
            seed: args.seed,
        },
    };
    let clip = generate(&spec)?;
    save_wav(&clip, &args.out)?;
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("cannot read report {}", args.input.display()))?;
    let document = ReportDocument::from_json(&text)?;
    write_output(args.out.as_deref(), &render(&document, args.format.into()))
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Threshold(args) => cmd_threshold(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Envelope(args) => cmd_envelope(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
