//! Acceptance criteria, run in sequence so each runtime is measured alone.
//! One line per criterion goes to stdout, captured or not.

use std::io::Write;
use std::time::{Duration, Instant};

use landmark::checks::{reference_profile, run_check};
use landmark::experiments::{pairwise_study, replicate, stage_medians};
use landmark::summarize;
use landmark::sweep::{run_sweep, GridSpec, SweepPlan};
use landmark_core::verify::Outcome;
use landmark_core::{LandmarkConfig, ManifoldModel};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> anyhow::Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn phase_transition() -> anyhow::Result<Verdict> {
    let p = reference_profile();
    let s_star_sq = p.s_star * p.s_star;
    let h_star = p.h(p.s_star);
    let (mut lo, mut hi) = (0.0, p.radius);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p.h(mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    let pass = (s_star_sq - 2.59).abs() < 1e-12
        && (p.s_star - 1.6093).abs() < 1e-4
        && h_star > 0.40
        && h_star < 0.55
        && (crossing - p.s_star).abs() <= 3.0 * p.nu_bar;
    verdict(
        pass,
        format!("s*^2 = {s_star_sq:.6}, s* = {:.4}, h(s*) = {h_star:.4}, h = 1/2 at s = {crossing:.4} (s* +/- 3 nu_bar = +/- {:.4})", p.s_star, 3.0 * p.nu_bar),
    )
}

fn check_outcome(name: &str, key: &str) -> anyhow::Result<Verdict> {
    let r = run_check(name, 0, None)?;
    let shown = r.measured(key).map(|v| format!("{key} = {v:.6}")).unwrap_or_default();
    verdict(r.outcome == Outcome::Pass, format!("{} {shown}", r.outcome))
}

fn sphere(dim: usize) -> ManifoldModel {
    ManifoldModel::sphere(2, 1.0, dim).unwrap()
}

fn two_stage_improvement() -> anyhow::Result<Verdict> {
    let dim = 128;
    let sigma = 0.5 / (dim as f64).sqrt();
    let records = replicate(&sphere(dim), &LandmarkConfig::new(sigma), 50, 3)?;
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    let [m0, m1, m2] = stage_medians(&records);
    let raw_scale = sigma * 126f64.sqrt();
    let pass = errors == 0
        && m0 >= 0.9 * raw_scale
        && m0 <= 1.1 * raw_scale
        && m1 <= 0.6 * m0
        && m2 <= m1
        && m2 <= 5.0 * sigma * 2f64.sqrt();
    verdict(
        pass,
        format!("medians d(q0) = {m0:.4} (sigma sqrt(126) = {raw_scale:.4}), d(q1) = {m1:.4}, d(q2) = {m2:.4} (5 sigma sqrt(d) = {:.4}), errors {errors}", 5.0 * sigma * 2f64.sqrt()),
    )
}

fn dimension_trend() -> anyhow::Result<Verdict> {
    let dir = tempfile::tempdir()?;
    let plan = SweepPlan {
        grid: vec![GridSpec {
            manifold: sphere(64),
            ambient_dims: vec![64, 128, 256],
            sigmas: vec![],
            noise_over_reach: vec![0.5],
            landmark: LandmarkConfig::default(),
        }],
        tuples: vec![],
        replications: 30,
        base_seed: 4,
        output: dir.path().join("trend.jsonl"),
        timings: None,
    };
    let records = run_sweep(&plan, 1)?;
    let summary = summarize(&records);
    let trend = summary.trends.iter().find(|t| t.axis == "D").ok_or_else(|| anyhow::anyhow!("no D trend"))?;
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    verdict(
        errors == 0 && trend.ratio_spread <= 3.0,
        format!("median ratios {:?} over D = {:?}, spread {:.3}", trend.median_ratios.iter().map(|r| (r * 1e4).round() / 1e4).collect::<Vec<_>>(), trend.values, trend.ratio_spread),
    )
}

fn stirling() -> anyhow::Result<Verdict> {
    let r = run_check("stirling", 0, None)?;
    let e1 = r.measured("epsilon_1").unwrap();
    verdict(r.passed() && (e1 - 0.0810615).abs() < 1e-7, format!("{} epsilon_1 = {e1:.7}", r.outcome))
}

fn pairwise() -> anyhow::Result<Verdict> {
    let config = LandmarkConfig { max_draws: 200_000_000, ..LandmarkConfig::new(0.02) };
    let study = pairwise_study(&sphere(256), &config, 100, 9)?;
    let pass = study.win_fraction >= 0.9 && study.median_averaged_error <= 5.0 * study.error_scale;
    verdict(
        pass,
        format!(
            "averaged beats raw in {:.0}% of pairs, median error {:.4e} (raw {:.4e}, bound {:.4e})",
            100.0 * study.win_fraction,
            study.median_averaged_error,
            study.median_raw_error,
            5.0 * study.error_scale
        ),
    )
}

fn conditional() -> anyhow::Result<Verdict> {
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, keys) in [
        ("conditional-noise-mean", &["ratio"][..]),
        ("conditional-signal-distance", &["second_moment_ratio", "fourth_moment_ratio"][..]),
    ] {
        let r = run_check(name, 0, None)?;
        let ratios: Vec<String> = keys.iter().filter_map(|k| r.measured(k).map(|v| format!("{k} = {v:.4}"))).collect();
        let ok = match r.outcome {
            Outcome::Pass => keys.iter().all(|k| r.measured(k).is_some_and(|v| v <= 10.0)),
            Outcome::Inconclusive | Outcome::Skipped => r.reason.is_some(),
            Outcome::Fail => false,
        };
        pass &= ok;
        lines.push(format!("{name} {} {}", r.outcome, ratios.join(", ")));
    }
    verdict(pass, lines.join("; "))
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, Duration, fn() -> anyhow::Result<Verdict>);
    let criteria: [Criterion; 10] = [
        (1, "phase transition of h", Duration::from_secs(1), phase_transition),
        (2, "grouping consistency", Duration::from_secs(60), || check_outcome("grouping-consistency", "max_abs_z")),
        (3, "two-stage improvement", Duration::from_secs(300), two_stage_improvement),
        (4, "stage-2 error across D", Duration::MAX, dimension_trend),
        (5, "noisy-point distance", Duration::from_secs(30), || check_outcome("noisy-point-distance", "coverage")),
        (6, "envelope suite", Duration::from_secs(60), || check_outcome("envelopes", "")),
        (7, "Stirling bracket", Duration::from_secs(1), stirling),
        (8, "signal average", Duration::from_secs(5), || check_outcome("signal-avg", "max_lhs_over_rhs")),
        (9, "pairwise distances", Duration::from_secs(300), pairwise),
        (10, "conditional expectations", Duration::from_secs(600), conditional),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    writeln!(out).unwrap();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(v) => (v.pass && elapsed <= limit, v.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        let timing = if limit == Duration::MAX {
            format!("{:.1}s", elapsed.as_secs_f64())
        } else {
            format!("{:.1}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs())
        };
        writeln!(out, "criterion {id:>2} {} {name}: {detail} [{timing}]", if pass { "PASS" } else { "FAIL" }).unwrap();
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
