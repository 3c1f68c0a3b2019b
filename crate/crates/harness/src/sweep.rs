//! Seeded, resumable parameter sweeps.
//!
//! Run `(tuple, rep)` uses the stream seed `derive_seed(base_seed, tuple, rep)`
//! and draws its perturbation from `derive_seed(stream_seed, u32::MAX, 0)`.
//! Records go to a JSONL file, one line per run, written by a single writer
//! thread as runs finish. On start the file is scanned and runs already
//! present are skipped, so an interrupted sweep resumes where it stopped.
//! When all runs are done the file is rewritten sorted by `(tuple, rep)`,
//! which makes its bytes a function of the plan alone. Wall-clock timings
//! are kept in a separate file for that reason.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use landmark_core::landmarking::two_round_landmark;
use landmark_core::rng::{derive_seed, seeded};
use landmark_core::{LandmarkConfig, ManifoldModel, SampleStream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One axis-product block of a sweep grid.
///
/// Every ambient dimension in `ambient_dims` (or the manifold's own if
/// empty) is combined with every noise level, given either directly in
/// `sigmas` or as `σ√D/τ` in `noise_over_reach`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub manifold: ManifoldModel,
    #[serde(default)]
    pub ambient_dims: Vec<usize>,
    #[serde(default)]
    pub sigmas: Vec<f64>,
    #[serde(default)]
    pub noise_over_reach: Vec<f64>,
    /// Everything but `sigma`, which the grid sets.
    #[serde(default)]
    pub landmark: LandmarkConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTuple {
    pub manifold: ManifoldModel,
    pub landmark: LandmarkConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    #[serde(default)]
    pub grid: Vec<GridSpec>,
    /// Tuples listed one by one, run after the grid tuples.
    #[serde(default)]
    pub tuples: Vec<SweepTuple>,
    pub replications: u32,
    #[serde(default)]
    pub base_seed: u64,
    pub output: PathBuf,
    /// Defaults to the output path with `.timings.jsonl` appended.
    #[serde(default)]
    pub timings: Option<PathBuf>,
}

/// One run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub tuple: u32,
    pub rep: u32,
    pub seed: u64,
    pub manifold: ManifoldModel,
    pub sigma: f64,
    pub curvature: f64,
    pub diameter: f64,
    pub reach: f64,
    /// `[d(q⁰,M), d(q¹,M), d(q²,M)]`
    pub distances: Option<[f64; 3]>,
    /// `d(signal average, M)` for stages 1 and 2.
    pub signal_distance: Option<[f64; 2]>,
    /// `‖noise average‖` for stages 1 and 2.
    pub noise_norm: Option<[f64; 2]>,
    pub draws: Option<[u64; 3]>,
    /// `σ√(d(1 + κ diam / log D))`
    pub scale: f64,
    /// `d(q²,M) / scale`
    pub ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub tuple: u32,
    pub rep: u32,
    pub runtime_secs: f64,
}

/// `σ√(d(1 + κ diam / log D))`, the stage-2 error scale.
pub fn theoretical_scale(manifold: &ManifoldModel, sigma: f64) -> f64 {
    let k = manifold.constants();
    let d = manifold.intrinsic_dim() as f64;
    let ln_d = (manifold.ambient_dim() as f64).ln();
    sigma * (d * (1.0 + k.curvature * k.diameter / ln_d)).sqrt()
}

pub fn run_seed(base: u64, tuple: u32, rep: u32) -> u64 {
    derive_seed(base, tuple as u64, rep as u64)
}

impl SweepPlan {
    /// All tuples of the plan, grid blocks first.
    pub fn expand(&self) -> Result<Vec<SweepTuple>> {
        let mut out = Vec::new();
        for g in &self.grid {
            if g.sigmas.is_empty() && g.noise_over_reach.is_empty() {
                bail!("a grid block needs `sigmas` or `noise_over_reach`");
            }
            let dims = if g.ambient_dims.is_empty() { vec![g.manifold.ambient_dim()] } else { g.ambient_dims.clone() };
            for &dim in &dims {
                let manifold = ManifoldModel::new(g.manifold.kind(), dim)?;
                let reach = manifold.constants().reach;
                let sigmas = g.sigmas.iter().copied().chain(g.noise_over_reach.iter().map(|r| r * reach / (dim as f64).sqrt()));
                for sigma in sigmas {
                    out.push(SweepTuple { manifold, landmark: LandmarkConfig { sigma, ..g.landmark.clone() } });
                }
            }
        }
        out.extend(self.tuples.iter().cloned());
        Ok(out)
    }

    pub fn timings_path(&self) -> PathBuf {
        self.timings.clone().unwrap_or_else(|| {
            let mut s = self.output.clone().into_os_string();
            s.push(".timings.jsonl");
            PathBuf::from(s)
        })
    }

    /// Expand and check every tuple before anything runs.
    pub fn validate(&self) -> Result<Vec<SweepTuple>> {
        let tuples = self.expand()?;
        if tuples.len() > u32::MAX as usize {
            bail!("too many tuples");
        }
        for (i, t) in tuples.iter().enumerate() {
            t.landmark.resolve(&t.manifold).with_context(|| format!("tuple {i} is not a valid configuration"))?;
        }
        Ok(tuples)
    }
}

/// Execute one run. Errors are recorded in the row.
pub fn execute(tuple: &SweepTuple, tuple_index: u32, rep: u32, seed: u64) -> SweepRecord {
    let k = tuple.manifold.constants();
    let sigma = tuple.landmark.sigma;
    let scale = theoretical_scale(&tuple.manifold, sigma);
    let mut record = SweepRecord {
        tuple: tuple_index,
        rep,
        seed,
        manifold: tuple.manifold,
        sigma,
        curvature: k.curvature,
        diameter: k.diameter,
        reach: k.reach,
        distances: None,
        signal_distance: None,
        noise_norm: None,
        draws: None,
        scale,
        ratio: None,
        error: None,
    };
    let outcome = SampleStream::new(tuple.manifold, sigma, seed).and_then(|mut stream| {
        let mut rng = seeded(derive_seed(seed, u32::MAX as u64, 0));
        two_round_landmark(&mut stream, &tuple.landmark, &mut rng)
    });
    match outcome {
        Ok(r) => {
            let st = &r.diagnostics.stages;
            record.distances = Some(r.diagnostics.distances);
            record.signal_distance = Some([st[0].signal_average_distance, st[1].signal_average_distance]);
            record.noise_norm = Some([st[0].noise_average_norm, st[1].noise_average_norm]);
            record.draws = Some(r.draws_per_stage);
            record.ratio = Some(r.diagnostics.distances[2] / scale);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e).with_context(|| format!("opening {}", path.display())),
    };
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        // A torn final line from an interrupted sweep is dropped and rerun.
        if let Ok(v) = serde_json::from_str(&line?) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Read the records of a sweep output file.
pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    read_jsonl(path)
}

fn write_sorted<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        for r in rows {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn open_append(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    // Terminate a torn last line so appended rows start on their own line.
    let needs_newline = fs::read(path).map(|b| !b.is_empty() && b.last() != Some(&b'\n')).unwrap_or(false);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if needs_newline {
        f.write_all(b"\n")?;
    }
    Ok(BufWriter::new(f))
}

/// Run every `(tuple, rep)` of the plan not already in its output file on
/// `workers` threads and return all records, sorted.
pub fn run_sweep(plan: &SweepPlan, workers: usize) -> Result<Vec<SweepRecord>> {
    let tuples = plan.validate()?;
    let timings_path = plan.timings_path();

    let mut done: BTreeMap<(u32, u32), SweepRecord> = BTreeMap::new();
    for r in read_records(&plan.output)? {
        let expected = run_seed(plan.base_seed, r.tuple, r.rep);
        if (r.tuple as usize) >= tuples.len() || r.rep >= plan.replications || r.seed != expected {
            bail!("{} holds runs from a different plan; remove it or change `output`", plan.output.display());
        }
        done.insert((r.tuple, r.rep), r);
    }
    let pending: Vec<(u32, u32)> = (0..tuples.len() as u32)
        .flat_map(|t| (0..plan.replications).map(move |r| (t, r)))
        .filter(|key| !done.contains_key(key))
        .collect();

    let mut out = open_append(&plan.output)?;
    let mut tout = open_append(&timings_path)?;
    let (tx, rx) = mpsc::channel::<(SweepRecord, f64)>();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let fresh = std::thread::scope(|scope| -> Result<Vec<SweepRecord>> {
        let writer = scope.spawn(move || -> Result<Vec<SweepRecord>> {
            let mut rows = Vec::new();
            for (record, secs) in rx {
                serde_json::to_writer(&mut out, &record)?;
                out.write_all(b"\n")?;
                out.flush()?;
                let t = Timing { tuple: record.tuple, rep: record.rep, runtime_secs: secs };
                serde_json::to_writer(&mut tout, &t)?;
                tout.write_all(b"\n")?;
                tout.flush()?;
                rows.push(record);
            }
            Ok(rows)
        });
        pool.install(|| {
            pending.par_iter().for_each_with(tx, |tx, &(t, r)| {
                let start = Instant::now();
                let record = execute(&tuples[t as usize], t, r, run_seed(plan.base_seed, t, r));
                let _ = tx.send((record, start.elapsed().as_secs_f64()));
            });
        });
        writer.join().expect("writer thread panicked")
    })?;

    for r in fresh {
        done.insert((r.tuple, r.rep), r);
    }
    let rows: Vec<SweepRecord> = done.into_values().collect();
    write_sorted(&plan.output, &rows)?;
    let mut timings: Vec<Timing> = read_jsonl(&timings_path)?;
    timings.sort_by_key(|t| (t.tuple, t.rep));
    timings.dedup_by_key(|t| (t.tuple, t.rep));
    write_sorted(&timings_path, &timings)?;
    Ok(rows)
}
