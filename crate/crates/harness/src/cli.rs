use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use landmark_core::landmarking::two_round_landmark;
use landmark_core::rng::{derive_seed, seeded, RNG_DESCRIPTION};
use landmark_core::verify::Outcome;
use landmark_core::{GroupingProfile, ManifoldModel, SampleStream};
use serde_json::json;

use crate::checks::{render_table, run_check, CHECK_NAMES};
use crate::config::{load, RunConfig};
use crate::plot::{emit_plot_data, h_profile_svg, write_h_profile, PlotKind};
use crate::sweep::{run_sweep, SweepPlan};
use crate::{experiments, summarize, WORKERS_ENV};

#[derive(Debug, Parser)]
#[command(name = "landmark", version, about = "Denoise manifold samples by two-round local averaging")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One two-round landmarking run.
    Run(RunArgs),
    /// A seeded parameter sweep with resumable JSONL output.
    Sweep(SweepArgs),
    /// Numerical checks of the analytical bounds.
    Verify(VerifyArgs),
    /// Grouping probability h(s) and -h'(s) as CSV (and optionally SVG).
    Profile(ProfileArgs),
    /// Pairwise distance estimates from averaged and raw samples.
    Pairwise(PairwiseArgs),
    /// Greedy landmark net over the manifold.
    Net(NetArgs),
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// TOML or JSON file with `manifold`, `landmark` and `seed`.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Replace the ambient dimension of the configured manifold.
    #[arg(long)]
    pub ambient_dim: Option<usize>,
    #[arg(long)]
    pub max_draws: Option<u64>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg: RunConfig = load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.sigma {
            cfg.landmark.sigma = s;
        }
        if let Some(dim) = self.ambient_dim {
            cfg.manifold = ManifoldModel::new(cfg.manifold.kind(), dim)?;
        }
        if let Some(m) = self.max_draws {
            cfg.landmark.max_draws = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    /// Write the full result (landmarks, batch sums, diagnostics) as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write every accepted sample of both stages as JSONL.
    #[arg(long)]
    pub dump_samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML or JSON sweep plan.
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Replace the plan's output path.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the summary table as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Write error-vs-stage, error-vs-D and error-vs-sigma CSV files here.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check name or `all`.
    #[arg(long, default_value = "all")]
    pub check: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo trials for checks that take them.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Write the reports as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long = "dim", default_value_t = 128)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Ball radius; defaults to R² = 3σ²D.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Largest offset; defaults to R.
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairwiseArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long, default_value_t = 100)]
    pub pairs: u32,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long)]
    pub separation: f64,
    /// Total draw budget.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Execute a parsed command. Returns `false` when a run errored or a check
/// failed.
pub fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Profile(a) => profile(a),
        Command::Pairwise(a) => pairwise(a),
        Command::Net(a) => net(a),
    }
}

fn run(a: RunArgs) -> Result<bool> {
    let mut cfg = a.overrides.resolve()?;
    if a.dump_samples.is_some() {
        cfg.landmark.retain_batches = true;
    }
    let mut stream = SampleStream::new(cfg.manifold, cfg.landmark.sigma, cfg.seed)?;
    let mut rng = seeded(derive_seed(cfg.seed, u32::MAX as u64, 0));
    let result = two_round_landmark(&mut stream, &cfg.landmark, &mut rng)?;
    let d = result.diagnostics.distances;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "seed": cfg.seed,
            "rng": RNG_DESCRIPTION,
            "params": result.params,
            "distances": d,
            "draws_per_stage": result.draws_per_stage,
            "signal_average_distance": [result.diagnostics.stages[0].signal_average_distance, result.diagnostics.stages[1].signal_average_distance],
            "noise_average_norm": [result.diagnostics.stages[0].noise_average_norm, result.diagnostics.stages[1].noise_average_norm],
        }))?
    );
    if let Some(path) = &a.dump_samples {
        let mut w = create(path)?;
        for (stage, batch) in result.batches.iter().enumerate() {
            for m in &batch.members {
                serde_json::to_writer(&mut w, &json!({"stage": stage + 1, "draw": m.draw_index, "x": m.x, "x_nat": m.x_nat, "z": m.z}))?;
                w.write_all(b"\n")?;
            }
        }
        w.flush()?;
    }
    if let Some(path) = &a.output {
        write_json(path, &result)?;
    }
    Ok(true)
}

fn sweep(a: SweepArgs) -> Result<bool> {
    let mut plan: SweepPlan = load(&a.plan)?;
    if let Some(o) = a.output {
        plan.output = o;
    }
    let workers = a.workers.unwrap_or_else(crate::default_workers);
    let records = run_sweep(&plan, workers)?;
    let summary = summarize(&records);
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    println!("{:>5} {:>6} {:>11} {:>5} {:>11} {:>11} {:>11} {:>9}", "tuple", "D", "sigma", "runs", "d(q0)", "d(q1)", "d(q2)", "ratio");
    for t in &summary.tuples {
        let m = |k: &str| t.metrics.get(k).map(|s| s.median).unwrap_or(f64::NAN);
        println!(
            "{:>5} {:>6} {:>11.4e} {:>5} {:>11.4e} {:>11.4e} {:>11.4e} {:>9.3}",
            t.tuple, t.ambient_dim, t.sigma, t.runs, m("d_q0"), m("d_q1"), m("d_q2"), t.median_ratio
        );
    }
    for tr in &summary.trends {
        println!("trend along {} for {} (fixed {:.4}): ratio spread {:.3}", tr.axis, tr.manifold, tr.fixed, tr.ratio_spread);
    }
    if errors > 0 {
        eprintln!("{errors} run(s) errored; see the `error` column of {}", plan.output.display());
    }
    if let Some(path) = &a.summary {
        write_json(path, &summary)?;
    }
    if let Some(dir) = &a.plot_dir {
        for (kind, file) in [
            (PlotKind::ErrorVsStage, "error-vs-stage.csv"),
            (PlotKind::ErrorVsD, "error-vs-D.csv"),
            (PlotKind::ErrorVsSigma, "error-vs-sigma.csv"),
        ] {
            let mut w = create(&dir.join(file))?;
            emit_plot_data(&mut w, &records, kind)?;
        }
    }
    Ok(errors == 0)
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let names: Vec<&str> = if a.check == "all" {
        CHECK_NAMES.to_vec()
    } else if CHECK_NAMES.contains(&a.check.as_str()) {
        vec![a.check.as_str()]
    } else {
        bail!("unknown check `{}`; known checks: all, {}", a.check, CHECK_NAMES.join(", "));
    };
    let mut reports = Vec::new();
    for name in names {
        reports.push(run_check(name, a.seed, a.trials)?);
    }
    print!("{}", render_table(&reports));
    if let Some(path) = &a.json {
        write_json(path, &reports)?;
    }
    Ok(reports.iter().all(|r| r.outcome != Outcome::Fail))
}

fn profile(a: ProfileArgs) -> Result<bool> {
    let radius = a.radius.unwrap_or_else(|| (3.0 * a.sigma * a.sigma * a.dim as f64).sqrt());
    let p = GroupingProfile::new(radius, a.sigma, a.dim)?;
    let s_max = a.s_max.unwrap_or(radius);
    match &a.output {
        Some(path) => write_h_profile(create(path)?, &p, s_max, a.points)?,
        None => write_h_profile(std::io::stdout().lock(), &p, s_max, a.points)?,
    }
    if let Some(path) = &a.svg {
        std::fs::write(path, h_profile_svg(&p, s_max, a.points))?;
    }
    Ok(true)
}

fn pairwise(a: PairwiseArgs) -> Result<bool> {
    let cfg = a.overrides.resolve()?;
    let study = experiments::pairwise_study(&cfg.manifold, &cfg.landmark, a.pairs, cfg.seed)?;
    println!(
        "pairs {}  averaged beats raw {:.1}%  median error averaged {:.4e} raw {:.4e}  scale {:.4e}",
        study.rows.len(),
        100.0 * study.win_fraction,
        study.median_averaged_error,
        study.median_raw_error,
        study.error_scale
    );
    if let Some(path) = &a.output {
        write_json(path, &study)?;
    }
    Ok(true)
}

fn net(a: NetArgs) -> Result<bool> {
    let cfg = a.overrides.resolve()?;
    let net = experiments::net(&cfg.manifold, &cfg.landmark, a.separation, a.budget, cfg.seed)?;
    println!(
        "{} landmarks, {} draws{}",
        net.landmarks.len(),
        net.draws,
        if net.budget_exhausted { ", stopped on the draw budget" } else { "" }
    );
    if let Some(path) = &a.output {
        write_json(path, &net)?;
    }
    Ok(true)
}
