//! Acceptance suite. Each test covers one acceptance criterion and prints
//! a `criterion N ... PASS` line (visible with `--nocapture`); a failing
//! criterion fails its test.
//!
//! Run with: `cargo test -p speechsev --test acceptance -- --nocapture`

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speechsev_core::analysis::{
    aggregate_subject, classify_deviation, determine_threshold, ratio_mean, DeviationBands,
    SeverityClass, WordResult, DEFAULT_THRESHOLD,
};
use speechsev_core::envelope::{block_extrema, build_envelope, truncate_to_block_multiple};
use speechsev_core::manifest::{CorpusManifest, Role, UtteranceRecord};
use speechsev_core::signal::{equalize_length, trim_endpoints, AudioClip};
use speechsev_core::synth::{degrade, DegradeKind};
use speechsev_core::wav::save_wav;

use SeverityClass::{Large, Mild, Moderate, NoDeviation};

/// Reference results: raw ratio means for three subjects over ten words,
/// classified at threshold 1.03989. The severity column is the known
/// classification for each row.
const REFERENCE_RESULTS: [(&str, &str, f64, SeverityClass); 30] = [
    ("Namma", "subject1", 1.62684, Mild),
    ("Namma", "subject2", 2.60459, Moderate),
    ("Namma", "subject3", 4.22875, Large),
    ("Ide", "subject1", 0.94963, NoDeviation),
    ("Ide", "subject2", 0.45808, Moderate),
    ("Ide", "subject3", 1.35224, Mild),
    ("Shale", "subject1", 1.54192, Mild),
    ("Shale", "subject2", 1.70836, Mild),
    ("Shale", "subject3", 2.19511, Moderate),
    ("Jepi", "subject1", 2.30208, Moderate),
    ("Jepi", "subject2", 3.52232, Large),
    ("Jepi", "subject3", 3.19259, Large),
    ("Hesa", "subject1", 1.39495, Mild),
    ("Hesa", "subject2", 1.66019, Mild),
    ("Hesa", "subject3", 3.23197, Large),
    ("Naga", "subject1", 1.04994, NoDeviation),
    ("Naga", "subject2", 2.05953, Moderate),
    ("Naga", "subject3", 1.09738, NoDeviation),
    ("Saha", "subject1", 1.67477, Mild),
    ("Saha", "subject2", 1.43331, Mild),
    ("Saha", "subject3", 2.22832, Moderate),
    ("Doora", "subject1", 0.76715, Mild),
    ("Doora", "subject2", 1.47577, Mild),
    ("Doora", "subject3", 1.42325, Mild),
    ("Jaya", "subject1", 1.20300, NoDeviation),
    ("Jaya", "subject2", 3.35342, Large),
    ("Jaya", "subject3", 2.77495, Large),
    ("Nanna", "subject1", 1.51143, Mild),
    ("Nanna", "subject2", 2.34976, Moderate),
    ("Nanna", "subject3", 2.96658, Large),
];

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Synthetic utterance with silent lead/tail and a positive-valued body:
/// the envelope stays away from zero, so ratio arithmetic is
/// well-conditioned. Body peak 0.2 leaves headroom for scaled copies up
/// to 4.2x.
fn utterance(seed: u64, body_len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![0.0; 300];
    samples.extend((0..body_len).map(|_| 0.1 + 0.1 * uniform(&mut rng)));
    samples.extend(vec![0.0; 200]);
    samples
}

#[test]
fn criterion_1_classifier_reproduces_reference_labels() {
    let bands = DeviationBands::default();
    let start = Instant::now();
    let mut matched = 0;
    for &(word, subject, raw, expected) in &REFERENCE_RESULTS {
        let class = classify_deviation(raw / DEFAULT_THRESHOLD, &bands).unwrap();
        assert_eq!(class, expected, "{word}/{subject} raw {raw}");
        matched += 1;
    }
    let elapsed = start.elapsed();
    assert_eq!(matched, 30);

    // The discriminating row: its raw value 2.60459 exceeds the outermost
    // band edge 2.6, so it classifies as moderate only under threshold
    // normalization.
    let discriminating = classify_deviation(2.60459 / DEFAULT_THRESHOLD, &bands).unwrap();
    assert_eq!(discriminating, Moderate);

    assert!(
        elapsed.as_micros() < 1000,
        "classification took {elapsed:?}, budget 1 ms"
    );
    println!("criterion 1 (classifier reproduces 30/30 reference labels, < 1 ms): PASS");
}

#[test]
fn criterion_2_aggregation_reproduces_reference_summary() {
    let expected: [(&str, [usize; 4], SeverityClass); 3] = [
        ("subject1", [3, 6, 1, 0], Mild),
        ("subject2", [0, 4, 4, 2], Moderate),
        ("subject3", [1, 2, 2, 5], Large),
    ];
    let bands = DeviationBands::default();
    for (subject, counts, overall) in expected {
        let results: Vec<WordResult> = REFERENCE_RESULTS
            .iter()
            .filter(|(_, s, _, _)| *s == subject)
            .map(|&(word, s, raw, _)| {
                let normalized = raw / DEFAULT_THRESHOLD;
                WordResult {
                    word: word.to_string(),
                    speaker_id: s.to_string(),
                    raw_ratio: raw,
                    normalized_ratio: normalized,
                    class: classify_deviation(normalized, &bands).unwrap(),
                }
            })
            .collect();
        assert_eq!(results.len(), 10);
        let summary = aggregate_subject(&results).unwrap();
        assert_eq!(
            [
                summary.counts.no,
                summary.counts.mild,
                summary.counts.moderate,
                summary.counts.severe
            ],
            counts,
            "{subject} counts"
        );
        assert_eq!(summary.overall, overall, "{subject} overall");
    }
    println!("criterion 2 (per-subject counts and overall severities reproduced): PASS");
}

#[test]
fn criterion_3_threshold_identity_on_randomized_envelopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..20 {
        let blocks = 2 + (rng.next_u64() % 40) as usize;
        let samples: Vec<f64> = (0..blocks * 100)
            .map(|_| 1.8 * uniform(&mut rng) - 0.9)
            .collect();
        let clip = AudioClip::new(samples, 8000, "synth").unwrap();
        let envelope = build_envelope(&clip, 100).unwrap();
        let threshold = determine_threshold(&envelope, &envelope, &envelope, 1e-6).unwrap();
        assert_eq!(threshold, 1.0, "case {case}");
    }
    println!("criterion 3 (threshold of an identical triple is exactly 1.0, 20 cases): PASS");
}

#[test]
fn criterion_4_end_to_end_homogeneity() {
    let cases = [
        (0.3, Large),
        (0.7, Mild),
        (1.0, NoDeviation),
        (1.5, Mild),
        (2.2, Moderate),
        (3.0, Large),
    ];
    // One-second 8 kHz clips.
    let normal = AudioClip::new(utterance(404, 7500), 8000, "normal").unwrap();
    let bands = DeviationBands::default();
    let start = Instant::now();
    for (alpha, expected_class) in cases {
        let subject = degrade(&normal, DegradeKind::AmplitudeScale, alpha, 0).unwrap();
        let normal_trimmed = trim_endpoints(&normal, 0.05, 100).unwrap();
        let subject_trimmed = trim_endpoints(&subject, 0.05, 100).unwrap();
        let subject_equalized = equalize_length(&subject_trimmed, normal_trimmed.len()).unwrap();
        let reference_env = build_envelope(&normal_trimmed, 100).unwrap();
        let subject_env = build_envelope(&subject_equalized, 100).unwrap();
        let stats = ratio_mean(&subject_env, &reference_env, 1e-6, 1.0).unwrap();
        assert!(
            (stats.raw_ratio - alpha).abs() <= 1e-9,
            "alpha {alpha}: raw ratio {}",
            stats.raw_ratio
        );
        let class = classify_deviation(stats.normalized_ratio, &bands).unwrap();
        assert_eq!(class, expected_class, "alpha {alpha}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("criterion 4 (scaled-copy pipeline recovers alpha to 1e-9 with expected classes, < 1 s): PASS");
}

#[test]
fn criterion_5_envelope_anchors_and_extrema_on_randomized_clips() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for case in 0..100 {
        let len = 100 + (rng.next_u64() % 49_901) as usize;
        let samples: Vec<f64> = (0..len).map(|_| 2.0 * uniform(&mut rng) - 1.0).collect();
        let clip = AudioClip::new(samples.clone(), 8000, "synth").unwrap();

        let envelope = build_envelope(&clip, 100).unwrap();
        for &(index, value) in envelope.anchors() {
            assert!(
                envelope.values()[index] == value,
                "case {case}: anchor at {index} not bit-exact"
            );
        }

        let truncated = truncate_to_block_multiple(&clip, 100).unwrap();
        let extrema = block_extrema(&truncated, 100).unwrap();
        assert_eq!(extrema.len(), len / 100);
        for (k, e) in extrema.iter().enumerate() {
            // Independent scan of the raw samples.
            let block = &samples[k * 100..(k + 1) * 100];
            let mut max_pos = 0;
            let mut min_pos = 0;
            for (i, &v) in block.iter().enumerate() {
                if v > block[max_pos] {
                    max_pos = i;
                }
                if v < block[min_pos] {
                    min_pos = i;
                }
            }
            assert_eq!(e.max_pos, k * 100 + max_pos, "case {case} block {k}");
            assert_eq!(e.min_pos, k * 100 + min_pos, "case {case} block {k}");
            assert_eq!(e.max_val, block[max_pos], "case {case} block {k}");
            assert_eq!(e.min_val, block[min_pos], "case {case} block {k}");
        }
    }
    println!("criterion 5 (anchors bit-exact and extrema match brute force, 100 clips): PASS");
}

#[test]
fn criterion_6_truncation_rounds_down_to_nearest_hundred() {
    let samples: Vec<f64> = (0..21121)
        .map(|i| ((i % 101) as f64 - 50.0) / 60.0)
        .collect();
    let clip = AudioClip::new(samples, 8000, "synth").unwrap();
    let truncated = truncate_to_block_multiple(&clip, 100).unwrap();
    assert_eq!(truncated.len(), 21100);
    let envelope = build_envelope(&clip, 100).unwrap();
    assert_eq!(envelope.len(), 21100);
    println!("criterion 6 (21121 samples truncate to 21100 at block size 100): PASS");
}

#[test]
fn criterion_7_band_partition_totality_and_boundary_senses() {
    let bands = DeviationBands::default();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for _ in 0..1_000_000 {
        // Log-uniform over [1e-3, 1e3].
        let ratio = 10f64.powf(6.0 * uniform(&mut rng) - 3.0);
        classify_deviation(ratio, &bands).expect("every positive ratio classifies");
    }

    let class = |r: f64| classify_deviation(r, &bands).unwrap();
    let boundary_cases: [(f64, SeverityClass, SeverityClass, SeverityClass); 6] = [
        // (edge, class below, class at, class above)
        (0.4, Large, Moderate, Moderate),
        (0.6, Moderate, Mild, Mild),
        (0.8, Mild, NoDeviation, NoDeviation),
        (1.2, NoDeviation, NoDeviation, Mild),
        (1.8, Mild, Mild, Moderate),
        (2.6, Moderate, Moderate, Large),
    ];
    for (edge, below, at, above) in boundary_cases {
        assert_eq!(class(edge.next_down()), below, "just below {edge}");
        assert_eq!(class(edge), at, "at {edge}");
        assert_eq!(class(edge.next_up()), above, "just above {edge}");
    }
    assert_eq!(class(0.8), NoDeviation);
    println!("criterion 7 (10^6 ratios classify uniquely; boundary senses hold, 0.8 -> no deviation): PASS");
}

fn write_clip(dir: &Path, name: &str, samples: &[f64]) -> String {
    let clip = AudioClip::new(samples.to_vec(), 8000, name).unwrap();
    save_wav(&clip, dir.join(name)).unwrap();
    name.to_string()
}

/// Corpus that replays the reference table: for each row the subject's
/// clip is the word's normal clip scaled by the row's raw ratio, so the
/// pipeline reproduces the ratio up to 16-bit quantization.
fn reference_corpus(dir: &Path) -> CorpusManifest {
    let mut words = Vec::new();
    let mut entries = Vec::new();
    for (i, &(word, subject, ratio, _)) in REFERENCE_RESULTS.iter().enumerate() {
        let normal = utterance(9000 + (i / 3) as u64, 2000);
        if !words.contains(&word.to_string()) {
            words.push(word.to_string());
            entries.push(UtteranceRecord {
                word: word.into(),
                speaker_id: "normal".into(),
                role: Role::Normal,
                repetition: 1,
                path: write_clip(dir, &format!("{word}_normal.wav"), &normal),
                start_sample: None,
                end_sample: None,
            });
        }
        let scaled: Vec<f64> = normal.iter().map(|s| s * ratio).collect();
        entries.push(UtteranceRecord {
            word: word.into(),
            speaker_id: subject.into(),
            role: Role::Pathological,
            repetition: 1,
            path: write_clip(dir, &format!("{word}_{subject}.wav"), &scaled),
            start_sample: None,
            end_sample: None,
        });
    }
    CorpusManifest::from_parts(
        words,
        "normal".into(),
        "Namma".into(),
        vec![1, 1, 1],
        entries,
        dir.to_path_buf(),
    )
    .unwrap()
}

#[test]
fn criterion_8_analyze_is_byte_deterministic_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = reference_corpus(dir.path());
    let manifest_path = dir.path().join("corpus.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).unwrap(),
    )
    .unwrap();

    let run = |jobs: &str, out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_speechsev"))
            .args([
                "analyze",
                "--manifest",
                manifest_path.to_str().unwrap(),
                "--threshold",
                "1.03989",
                "--jobs",
                jobs,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("binary runs");
        assert!(status.success(), "analyze failed with jobs={jobs}");
        std::fs::read(out).unwrap()
    };

    let mut reports = Vec::new();
    for jobs in ["1", "2", "4", "7"] {
        let first = run(jobs, &dir.path().join(format!("r_{jobs}_a.json")));
        let second = run(jobs, &dir.path().join(format!("r_{jobs}_b.json")));
        assert_eq!(first, second, "consecutive runs differ at --jobs {jobs}");
        reports.push(first);
    }
    for pair in reports.windows(2) {
        assert_eq!(pair[0], pair[1], "reports differ across --jobs values");
    }
    println!(
        "criterion 8 (byte-identical JSON reports across consecutive runs and jobs 1/2/4/7): PASS"
    );
}

#[test]
fn criterion_9_default_threshold_constant_is_pinned() {
    // The original corpus is not available, so the absolute threshold and
    // envelope plots cannot be recomputed here; criteria 3-5 and 7-8 cover
    // those paths with synthetic inputs, and criteria 1-2 pin the
    // arithmetic to the reference table. This pins the constant itself.
    assert_eq!(DEFAULT_THRESHOLD, 1.03989);
    println!("criterion 9 (default threshold constant pinned at 1.03989): PASS");
}

/// The reference corpus driven through the real binary reproduces all 30
/// labels in the text report.
#[test]
fn text_report_reproduces_reference_labels_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = reference_corpus(dir.path());
    let manifest_path = dir.path().join("corpus.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).unwrap(),
    )
    .unwrap();

    let output = Command::new(env!("CARGO_BIN_EXE_speechsev"))
        .args([
            "analyze",
            "--manifest",
            manifest_path.to_str().unwrap(),
            "--threshold",
            "1.03989",
            "--format",
            "text",
        ])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();

    for &(word, subject, _, expected) in &REFERENCE_RESULTS {
        let row = text
            .lines()
            .find(|l| l.starts_with(word) && l.contains(subject))
            .unwrap_or_else(|| panic!("row for {word}/{subject} missing"));
        assert!(
            row.trim_end().ends_with(expected.label()),
            "{word}/{subject}: row {row:?} should end with {:?}",
            expected.label()
        );
    }
    println!("reference text report: all 30 labels reproduced end to end");
}
