use std::collections::BTreeSet;
use std::fs;

use landmark::sweep::{read_records, run_sweep, theoretical_scale, GridSpec, SweepPlan};
use landmark::{summarize, SweepRecord};
use landmark_core::{LandmarkConfig, ManifoldModel};

fn plan(dir: &std::path::Path, sigmas: Vec<f64>, reps: u32) -> SweepPlan {
    SweepPlan {
        grid: vec![GridSpec {
            manifold: ManifoldModel::sphere(2, 1.0, 16).unwrap(),
            ambient_dims: vec![],
            sigmas,
            noise_over_reach: vec![],
            landmark: LandmarkConfig { stage1_batch: Some(40), stage2_batch: Some(60), ..LandmarkConfig::default() },
        }],
        tuples: vec![],
        replications: reps,
        base_seed: 11,
        output: dir.join("runs.jsonl"),
        timings: None,
    }
}

#[test]
fn empty_grid_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = plan(dir.path(), vec![0.05], 1);
    p.grid.clear();
    assert!(run_sweep(&p, 1).unwrap().is_empty());
    assert_eq!(fs::read_to_string(&p.output).unwrap(), "");
}

#[test]
fn rows_and_seeds_are_counted_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_sweep(&plan(dir.path(), vec![0.05, 0.08], 3), 2).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().map(|r| r.seed).collect::<BTreeSet<_>>().len(), 6);
    assert!(rows.iter().all(|r| r.error.is_none()));
}

#[test]
fn resume_reruns_only_missing_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), vec![0.05, 0.08], 3);
    run_sweep(&p, 1).unwrap();
    let full = fs::read_to_string(&p.output).unwrap();
    let mut lines: Vec<&str> = full.lines().collect();
    lines.pop();
    fs::write(&p.output, lines.join("\n") + "\n").unwrap();
    let timings = p.timings_path();
    fs::write(&timings, "").unwrap();
    run_sweep(&p, 1).unwrap();
    assert_eq!(fs::read_to_string(&timings).unwrap().lines().count(), 1);
    assert_eq!(fs::read_to_string(&p.output).unwrap(), full);
}

#[test]
fn torn_last_line_is_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), vec![0.05], 2);
    run_sweep(&p, 1).unwrap();
    let full = fs::read_to_string(&p.output).unwrap();
    fs::write(&p.output, &full[..full.len() - 20]).unwrap();
    run_sweep(&p, 1).unwrap();
    assert_eq!(fs::read_to_string(&p.output).unwrap(), full);
}

#[test]
fn output_is_byte_identical_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_sweep(&plan(a.path(), vec![0.05, 0.08], 3), 1).unwrap();
    run_sweep(&plan(b.path(), vec![0.05, 0.08], 3), 3).unwrap();
    assert_eq!(fs::read(a.path().join("runs.jsonl")).unwrap(), fs::read(b.path().join("runs.jsonl")).unwrap());
}

#[test]
fn foreign_output_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&plan(dir.path(), vec![0.05], 2), 1).unwrap();
    let mut other = plan(dir.path(), vec![0.05], 2);
    other.base_seed = 12;
    assert!(run_sweep(&other, 1).is_err());
}

#[test]
fn invalid_tuple_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), vec![-1.0], 2);
    assert!(run_sweep(&p, 1).is_err());
    assert!(!p.output.exists());
}

#[test]
fn ratio_column_is_recomputable() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), vec![0.03, 0.05, 0.08], 40);
    run_sweep(&p, 2).unwrap();
    let rows: Vec<SweepRecord> = read_records(&p.output).unwrap();
    assert_eq!(rows.len(), 120);
    for r in rows.iter().take(100) {
        let d = r.manifold.intrinsic_dim() as f64;
        let ln_d = (r.manifold.ambient_dim() as f64).ln();
        let scale = r.sigma * (d * (1.0 + r.curvature * r.diameter / ln_d)).sqrt();
        assert!((scale - r.scale).abs() <= 1e-15 * scale);
        assert_eq!(scale, theoretical_scale(&r.manifold, r.sigma));
        assert!((r.distances.unwrap()[2] / scale - r.ratio.unwrap()).abs() <= 1e-15 * r.ratio.unwrap());
    }
    let s = summarize(&rows);
    assert_eq!(s.tuples.len(), 3);
    assert!(s.tuples.iter().all(|t| t.runs == 40 && t.stages_nonincreasing));
    let sigma_trend = s.trends.iter().find(|t| t.axis == "sigma").unwrap();
    assert!(sigma_trend.final_distance_nondecreasing);
}
