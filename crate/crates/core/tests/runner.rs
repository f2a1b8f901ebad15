//! Runner contracts: determinism across worker counts, rerun byte-identity,
//! manifest replay, and flagged unresolvable rows.

use qasim::runner::{self, ExperimentConfig, RunManifest};
use std::collections::BTreeMap;
use std::path::Path;

fn digests(dir: &Path, names: &[&str]) -> BTreeMap<String, String> {
    names
        .iter()
        .map(|n| (n.to_string(), runner::sha256_file(&dir.join(n)).unwrap()))
        .collect()
}

const SMALL_RUN: &str = "model = qa_purification\nengine = stabilizer\nobservable = purification\n\
                         L = 16\np = 0.137\np = 0.2\nT = 60\nensemble = 12\nseed = 7\n";

#[test]
fn worker_count_invariance_and_rerun_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for (label, workers) in [("w1", 1usize), ("w8", 8), ("w1b", 1)] {
        let mut cfg = ExperimentConfig::parse(SMALL_RUN).unwrap();
        cfg.workers = workers;
        let dir = tmp.path().join(label);
        runner::run(&cfg, &dir, false).unwrap();
        outs.push(digests(&dir, &["purification.csv"]));
    }
    assert_eq!(outs[0], outs[1], "1-worker vs 8-worker outputs differ");
    assert_eq!(outs[0], outs[2], "rerun with same config differs");
}

#[test]
fn manifest_written_last_and_replayable() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let cfg = ExperimentConfig::parse(SMALL_RUN).unwrap();
    let outcome = runner::run(&cfg, &dir, false).unwrap();
    assert!(outcome.manifest_path.exists());
    let manifest =
        RunManifest::parse(&std::fs::read_to_string(&outcome.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest.master_seed, 7);
    assert_eq!(manifest.files.len(), 1);
    // recorded digests match the files on disk
    for (name, digest) in &manifest.files {
        assert_eq!(&runner::sha256_file(&dir.join(name)).unwrap(), digest);
    }
    // replay reproduces byte-identical data
    let report = runner::replay(&outcome.manifest_path).unwrap();
    assert!(report.matched, "replay mismatch: {:?}", report.lines);
    // refusing to clobber without --overwrite
    assert!(runner::run(&cfg, &dir, false).is_err());
    assert!(runner::run(&cfg, &dir, true).is_ok());
}

#[test]
fn unresolvable_rows_are_flagged_not_dropped() {
    let text = "model = qa_nonclifford\nengine = mc\nobservable = entropy_t\n\
                L = 12\np = 0.0\nT = 30\nensemble = 2\nseed = 3\n\
                mc_initial = 200\nmc_ceiling = 400\n";
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let cfg = ExperimentConfig::parse(text).unwrap();
    let outcome = runner::run(&cfg, &dir, false).unwrap();
    assert!(outcome.unresolvable_rows > 0);
    let (axis, rows) = runner::read_csv(&dir.join("entropy_t.csv")).unwrap();
    assert_eq!(axis, "t");
    assert!(rows.iter().any(|r| r.mean.is_none()), "expected a flagged row");
    let text = std::fs::read_to_string(dir.join("entropy_t.csv")).unwrap();
    assert!(text.contains("unresolvable"));
}

#[test]
fn csv_round_trips_to_series() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let cfg = ExperimentConfig::parse(SMALL_RUN).unwrap();
    runner::run(&cfg, &dir, false).unwrap();
    let (axis, rows) = runner::read_csv(&dir.join("purification.csv")).unwrap();
    let series = runner::rows_to_series(&axis, &rows).unwrap();
    assert_eq!(series.len(), 2, "one series per rate");
    for (l, _p, s) in &series {
        assert_eq!(*l, 16);
        assert_eq!(s.points.first().unwrap().mean, 16.0, "S(0) = L");
        assert!(s.points.iter().all(|pt| pt.n == 12));
    }
}

#[test]
fn killed_run_leaves_no_manifest() {
    // a failing config writes nothing permanent
    let text = "model = qa_purification\nengine = oracle\nobservable = purification\n\
                L = 64\np = 0.1\nT = 4\nensemble = 1\nseed = 1\n";
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let cfg = ExperimentConfig::parse(text).unwrap();
    // oracle refuses 128 qubits
    assert!(runner::run(&cfg, &dir, false).is_err());
    assert!(!dir.join(runner::MANIFEST_NAME).exists());
}

#[test]
fn quick_crosscheck_passes() {
    let report = runner::crosscheck(runner::CrosscheckLevel::Quick, 2).unwrap();
    assert!(report.passed, "{:#?}", report.lines);
}
