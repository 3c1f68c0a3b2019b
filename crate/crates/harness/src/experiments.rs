//! Replicated experiments behind the `run`, `pairwise` and `net` commands.

use anyhow::Result;
use landmark_core::estimators::{build_net, estimate_pairwise_distance, NetSpec};
use landmark_core::linalg;
use landmark_core::rng::{derive_seed, seeded};
use landmark_core::{LandmarkConfig, ManifoldModel, SampleStream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::summary::median;
use crate::sweep::{execute, SweepRecord, SweepTuple};

/// `seeds` independent two-round runs of one configuration.
pub fn replicate(manifold: &ManifoldModel, config: &LandmarkConfig, seeds: u32, base_seed: u64) -> Result<Vec<SweepRecord>> {
    config.resolve(manifold)?;
    let tuple = SweepTuple { manifold: *manifold, landmark: config.clone() };
    Ok((0..seeds).into_par_iter().map(|r| execute(&tuple, 0, r, derive_seed(base_seed, 0, r as u64))).collect())
}

/// Median `d(q,M)` per stage over the successful runs.
pub fn stage_medians(records: &[SweepRecord]) -> [f64; 3] {
    let mut out = [f64::NAN; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = median(&records.iter().filter_map(|r| r.distances.map(|d| d[i])).collect::<Vec<_>>());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub truth: f64,
    pub raw: f64,
    pub estimate: f64,
    pub raw_error: f64,
    pub averaged_error: f64,
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseStudy {
    pub rows: Vec<PairRow>,
    /// Fraction of pairs where the averaged estimate beats the raw distance.
    pub win_fraction: f64,
    pub median_averaged_error: f64,
    pub median_raw_error: f64,
    /// `σ d^{1/4} D^{1/4} (log D)^{1/4}`
    pub error_scale: f64,
}

/// Distances between clean points estimated from pairs of noisy samples,
/// raw and after stage-1 averaging around each sample.
pub fn pairwise_study(manifold: &ManifoldModel, config: &LandmarkConfig, pairs: u32, seed: u64) -> Result<PairwiseStudy> {
    config.resolve(manifold)?;
    let rows = (0..pairs)
        .into_par_iter()
        .map(|k| -> Result<PairRow> {
            let mut stream = SampleStream::new(*manifold, config.sigma, derive_seed(seed, k as u64, 0))?;
            let qi = stream.next_sample().x;
            let qj = stream.next_sample().x;
            let truth = linalg::dist(&manifold.project(&qi)?, &manifold.project(&qj)?);
            let raw = linalg::dist(&qi, &qj);
            let est = estimate_pairwise_distance(&mut stream, &qi, &qj, config)?;
            Ok(PairRow {
                truth,
                raw,
                estimate: est.distance,
                raw_error: (raw - truth).abs(),
                averaged_error: (est.distance - truth).abs(),
                draws: stream.draws_so_far(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let wins = rows.iter().filter(|r| r.averaged_error < r.raw_error).count();
    let (dim, d) = (manifold.ambient_dim() as f64, manifold.intrinsic_dim() as f64);
    Ok(PairwiseStudy {
        win_fraction: wins as f64 / rows.len().max(1) as f64,
        median_averaged_error: median(&rows.iter().map(|r| r.averaged_error).collect::<Vec<_>>()),
        median_raw_error: median(&rows.iter().map(|r| r.raw_error).collect::<Vec<_>>()),
        error_scale: config.sigma * (d * dim * dim.ln()).powf(0.25),
        rows,
    })
}

/// Greedy net on a fresh stream.
pub fn net(manifold: &ManifoldModel, config: &LandmarkConfig, separation: f64, budget: u64, seed: u64) -> Result<NetSpec> {
    let mut stream = SampleStream::new(*manifold, config.sigma, seed)?;
    let mut rng = seeded(derive_seed(seed, u32::MAX as u64, 0));
    Ok(build_net(&mut stream, config, separation, budget, &mut rng)?)
}
