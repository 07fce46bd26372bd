use std::fs;

use halfgap::checkpoint::{Checkpoint, CHECKPOINT_VERSION};
use halfgap::records::RecordFormat;
use halfgap::{run_pipeline, write_records, Error, PipelineConfig, Run, Stage};
use proptest::prelude::*;

fn run(n: usize, jobs: usize, stage: Stage) -> Run {
    let mut cfg = PipelineConfig::new(n);
    cfg.jobs = jobs;
    cfg.stage = stage;
    run_pipeline(&cfg).unwrap()
}

fn jsonl(run: &Run) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records(&run.records, RecordFormat::Jsonl, &mut buf).unwrap();
    buf
}

#[test]
fn small_censuses() {
    for (n, gap, vertices) in [(4, "6/5", 1), (5, "5/4", 2), (6, "4/3", 11), (7, "4/3", 52)] {
        let s = run(n, 1, Stage::Gap).summary;
        assert_eq!(s.gap.as_ref().unwrap().to_string(), gap, "n = {n}");
        assert_eq!(s.vertices, Some(vertices), "n = {n}");
        assert!(s.complete);
        s.check_monotone().unwrap();
    }
}

#[test]
fn generation_stage_only_counts() {
    let r = run(4, 1, Stage::Gen);
    assert_eq!(r.summary.candidates, Some(4));
    assert_eq!(r.summary.certificates, None);
    assert!(r.records.is_empty());
}

#[test]
fn intermediate_stages_agree_with_full_run() {
    let full = run(6, 1, Stage::Gap);
    let cert = run(6, 1, Stage::Cert);
    let extreme = run(6, 1, Stage::Extreme);
    assert_eq!(cert.summary.certificates, full.summary.certificates);
    assert_eq!(cert.summary.vertices, None);
    assert_eq!(extreme.summary.vertices, full.summary.vertices);
    for (a, b) in extreme.records.iter().zip(&full.records) {
        assert_eq!((&a.pair, a.status), (&b.pair, b.status));
    }
}

#[test]
fn records_are_sorted_and_distinct() {
    let r = run(7, 1, Stage::Extreme);
    assert!(r.records.windows(2).all(|w| w[0].certificate < w[1].certificate));
}

#[test]
fn worker_count_does_not_change_output() {
    assert_eq!(jsonl(&run(6, 1, Stage::Gap)), jsonl(&run(6, 4, Stage::Gap)));
}

#[test]
fn max_candidates_truncates() {
    let mut cfg = PipelineConfig::new(6);
    cfg.max_candidates = Some(10);
    let r = run_pipeline(&cfg).unwrap();
    assert_eq!(r.summary.candidates, Some(10));
    assert!(!r.summary.complete);
}

fn resumed(n: usize, cut: u64) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::new(n);
    cfg.checkpoint = Some(dir.path().join("cp.json"));
    cfg.max_candidates = Some(cut);
    run_pipeline(&cfg).unwrap();
    cfg.max_candidates = None;
    run_pipeline(&cfg).unwrap()
}

#[test]
fn resume_at_partition_boundaries() {
    let full = run(6, 1, Stage::Gap);
    // cuts both at group boundaries and inside groups
    for cut in [1, 20, 60, 147] {
        let r = resumed(6, cut);
        assert_eq!(jsonl(&r), jsonl(&full), "cut at {cut}");
        assert_eq!(r.summary.candidates, full.summary.candidates);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn resume_anywhere_matches_uninterrupted(cut in 1u64..148) {
        let full = run(6, 1, Stage::Gap);
        prop_assert_eq!(jsonl(&resumed(6, cut)), jsonl(&full));
    }
}

#[test]
fn finished_checkpoint_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = PipelineConfig::new(5);
    cfg.checkpoint = Some(dir.path().join("cp.json"));
    let first = run_pipeline(&cfg).unwrap();
    let second = run_pipeline(&cfg).unwrap();
    assert_eq!(jsonl(&first), jsonl(&second));
    assert_eq!(first.summary.candidates, second.summary.candidates);
}

#[test]
fn checkpoint_mismatches_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let mut cfg = PipelineConfig::new(5);
    cfg.checkpoint = Some(path.clone());
    run_pipeline(&cfg).unwrap();

    let mut other = cfg.clone();
    other.n = 6;
    assert!(matches!(run_pipeline(&other), Err(Error::Checkpoint(_))));

    let mut cp = Checkpoint::load(&path).unwrap().unwrap();
    cp.version = CHECKPOINT_VERSION + 1;
    fs::write(&path, serde_json::to_string(&cp).unwrap()).unwrap();
    assert!(matches!(run_pipeline(&cfg), Err(Error::Checkpoint(_))));
}

#[test]
fn invalid_configs() {
    let mut cfg = PipelineConfig::new(6);
    cfg.jobs = 0;
    assert!(matches!(run_pipeline(&cfg), Err(Error::Config(_))));
    assert!(run_pipeline(&PipelineConfig::new(3)).is_err());
    assert!(run_pipeline(&PipelineConfig::new(40)).is_err());
}
