//! Named verification checks with their default parameters.

use std::time::Instant;

use anyhow::{bail, Result};
use landmark_core::rng::{derive_seed, seeded};
use landmark_core::verify::{self, CheckReport, ConditionalOptions, Outcome};
use landmark_core::{GroupingProfile, ManifoldModel};
use rand::Rng;

pub const CHECK_NAMES: &[&str] = &[
    "signal-avg",
    "noisy-point-distance",
    "grouping-consistency",
    "acceptance-rate",
    "conditional-noise-mean",
    "conditional-signal-distance",
    "far-distance",
    "volume-ratio",
    "vector-hoeffding",
    "stirling",
    "envelopes",
];

/// `Sphere(1) ⊂ R^{10⁸}`, `σ = 5·10⁻⁵`, `q = 1.5 e₁`, `s⋆² = 1/2`: a query
/// satisfying the hypotheses of both conditional-expectation statements.
pub fn conditional_setting() -> Result<(ManifoldModel, Vec<f64>, f64, f64)> {
    let dim = 100_000_000;
    let m = ManifoldModel::sphere(2, 1.0, dim)?;
    let mut q = vec![0.0; dim];
    q[0] = 1.5;
    let sigma = 5e-5;
    let radius = (0.5 + sigma * sigma * (dim as f64 - 3.0)).sqrt();
    Ok((m, q, radius, sigma))
}

/// Fig. 2b-style profile: `D = 128`, `σ = 0.1`, `R² = 3σ²D`.
pub fn reference_profile() -> GroupingProfile {
    GroupingProfile::new((3.0 * 0.01 * 128.0_f64).sqrt(), 0.1, 128).expect("valid profile")
}

/// 100 random point sets of 2 to 50 points on `Sphere(1) ⊂ R³`, one report
/// per set folded into one.
pub fn signal_avg_sets(sets: usize, seed: u64) -> Result<CheckReport> {
    let m = ManifoldModel::sphere(2, 1.0, 3)?;
    let mut rng = seeded(seed);
    let mut report = CheckReport::new("signal_avg").param("sets", sets as f64);
    let mut worst: f64 = 0.0;
    for _ in 0..sets {
        let n = rng.random_range(2..=50);
        let points: Vec<_> = (0..n).map(|_| m.sample_uniform(&mut rng)).collect();
        let anchor = m.sample_uniform(&mut rng);
        let r = verify::check_signal_avg(&m, &points, &anchor)?;
        worst = worst.max(r.measured("distance_of_mean").unwrap() / r.bounds["curvature_times_mean_sq_geodesic"]);
        report.samples += r.samples;
        report.update(r.outcome);
    }
    report.measure("max_lhs_over_rhs", worst);
    Ok(report)
}

/// Run a named check. `trials` scales the Monte Carlo checks; `None` keeps
/// their defaults.
pub fn run_check(name: &str, seed: u64, trials: Option<u64>) -> Result<CheckReport> {
    let start = Instant::now();
    let t = |default: u64| trials.unwrap_or(default);
    let mut report = match name {
        "signal-avg" => signal_avg_sets(t(100) as usize, seed)?,
        "noisy-point-distance" => {
            let m = ManifoldModel::sphere(2, 1.0, 128)?;
            verify::check_noisy_point_distance(&m, 0.03, t(10_000) as usize, 5.0, seed)?
        }
        "grouping-consistency" => {
            let p = reference_profile();
            let hi = p.s_star + 4.0 * p.nu_bar;
            let ts: Vec<f64> = (0..10).map(|i| hi * i as f64 / 9.0).collect();
            verify::check_grouping_consistency(&p, &ts, t(1_000_000), seed)?
        }
        "acceptance-rate" => {
            let m = ManifoldModel::sphere(2, 1.0, 64)?;
            let mut rng = seeded(derive_seed(seed, 1, 0));
            let q = m.sample_uniform(&mut rng);
            verify::check_acceptance_rate(&m, 0.1, &q, 1.0, t(200_000), seed)?
        }
        "conditional-noise-mean" | "conditional-signal-distance" => {
            let (m, q, radius, sigma) = conditional_setting()?;
            let opts = ConditionalOptions { accepted: t(20_000) as usize, seed, ..Default::default() };
            if name == "conditional-noise-mean" {
                verify::check_conditional_noise_mean(&m, &q, radius, sigma, &opts)?
            } else {
                verify::check_conditional_signal_distance(&m, &q, radius, sigma, &opts)?
            }
        }
        "far-distance" => {
            let mut all = CheckReport::new("far_distance");
            let sphere = ManifoldModel::sphere(2, 1.0, 8)?;
            let mut qs = sphere.from_chart(&[0.7, 0.3])?;
            qs[5] = 0.2;
            let torus = ManifoldModel::flat_torus(1.0, 0.5, 6)?;
            let mut qt = torus.from_chart(&[0.2, 1.0])?;
            qt[4] = 0.05;
            for r in [
                verify::check_far_distance(&sphere, &qs, 0.3, 4000)?,
                verify::check_far_distance(&torus, &qt, 0.2, 400)?,
            ] {
                all.update(r.outcome);
                all.samples += r.samples;
                all.details.push(r);
            }
            all
        }
        "volume-ratio" => {
            let mut all = CheckReport::new("volume_ratio_sphere");
            for d in 2..=8 {
                let deltas: Vec<f64> = (1..=50).map(|i| std::f64::consts::PI * i as f64 / 50.0).collect();
                let r = verify::check_volume_ratio_sphere(d, 1.0, &deltas)?;
                all.update(r.outcome);
                all.samples += r.samples;
                all.details.push(r);
            }
            all
        }
        "vector-hoeffding" => verify::check_vector_hoeffding(16, 1.0, 100, &[0.5, 1.0, 2.0], t(10_000) as usize, seed)?,
        "stirling" => verify::check_stirling(20)?,
        "envelopes" => verify::check_envelope_suite()?,
        other => bail!("unknown check `{other}`; known checks: {}", CHECK_NAMES.join(", ")),
    };
    report.runtime_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

pub fn outcome_is_failure(o: Outcome) -> bool {
    o == Outcome::Fail
}

/// Fixed-width table of report outcomes.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut s = format!("{:<34} {:<13} {:>12} {:>9}  note\n", "check", "outcome", "samples", "secs");
    for r in reports {
        let note = r.reason.clone().unwrap_or_default();
        s += &format!(
            "{:<34} {:<13} {:>12} {:>9.2}  {}\n",
            r.name,
            r.outcome.label(),
            r.samples,
            r.runtime_secs.unwrap_or(0.0),
            note
        );
        for d in &r.details {
            s += &format!("  {:<32} {:<13} {:>12}\n", d.name, d.outcome.label(), d.samples);
        }
    }
    s
}
