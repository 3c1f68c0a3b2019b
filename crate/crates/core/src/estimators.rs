//! Downstream uses of local averages: estimating the clean signal behind a
//! noisy point, estimating distances between clean points, and building a
//! net of landmarks over the manifold.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::landmarking::{two_round_landmark, LandmarkConfig};
use crate::linalg;
use crate::sampling::{Batch, SampleStream};

/// Local average around `q0` with the stage-1 radius and batch size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalEstimate {
    pub estimate: Point,
    pub batch: Batch,
}

/// Average the first-stage minibatch around `q0`. No perturbation is added.
pub fn estimate_signal(stream: &mut SampleStream, q0: &[f64], config: &LandmarkConfig) -> Result<SignalEstimate> {
    let params = config.resolve(stream.manifold())?;
    let batch =
        stream.collect_minibatch_with(q0, params.radius1, params.batch1, config.max_draws, config.retain_batches)?;
    Ok(SignalEstimate { estimate: batch.mean(), batch })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseEstimate {
    pub distance: f64,
    pub batch_i: Batch,
    pub batch_j: Batch,
}

/// `‖mean(X_i) − mean(X_j)‖` for two batches.
pub fn distance_between_batches(a: &Batch, b: &Batch) -> f64 {
    let inv_a = 1.0 / a.count as f64;
    let inv_b = 1.0 / b.count as f64;
    a.sum_x
        .iter()
        .zip(&b.sum_x)
        .map(|(x, y)| {
            let d = x * inv_a - y * inv_b;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Estimate `‖q_i♮ − q_j♮‖` from two fresh, independent stage-1 minibatches
/// collected around `q_i` and then `q_j`.
pub fn estimate_pairwise_distance(
    stream: &mut SampleStream,
    q_i: &[f64],
    q_j: &[f64],
    config: &LandmarkConfig,
) -> Result<PairwiseEstimate> {
    let batch_i = estimate_signal(stream, q_i, config)?.batch;
    let batch_j = estimate_signal(stream, q_j, config)?.batch;
    Ok(PairwiseEstimate { distance: distance_between_batches(&batch_i, &batch_j), batch_i, batch_j })
}

/// Where a net landmark came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandmarkProvenance {
    pub seed: u64,
    /// Stream index of the noisy point the landmark was started from.
    pub start_draw: u64,
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    pub landmarks: Vec<Point>,
    pub provenance: Vec<LandmarkProvenance>,
    pub separation: f64,
    /// Every screened noisy point was within this debiased distance of some
    /// landmark at the time it was screened.
    pub covering_radius: f64,
    pub draws: u64,
    /// `true` when construction stopped because the draw budget ran out
    /// mid-landmark.
    pub budget_exhausted: bool,
}

/// Greedy net construction.
///
/// Noisy points are screened against the current landmarks with the
/// debiased distance `√max(‖x − ℓ‖² − σ²D, 0)`, which removes the
/// `σ²D` the noise adds to squared distances from near-manifold points. A
/// point at debiased distance ≥ `separation` from every landmark seeds a
/// two-round landmarking run; its output `q²` joins the net if it is itself
/// at least `separation` from every landmark. Construction stops once
/// `budget` draws (screening plus landmarking) have been consumed; each
/// batch of a landmarking run is capped at the remaining budget, so the
/// final run can overshoot it by at most one batch budget.
pub fn build_net<R: Rng + ?Sized>(
    stream: &mut SampleStream,
    config: &LandmarkConfig,
    separation: f64,
    budget: u64,
    rng: &mut R,
) -> Result<NetSpec> {
    if !(separation > 0.0) {
        return Err(crate::error::domain("separation", separation));
    }
    config.validate()?;
    let dim = stream.manifold().ambient_dim();
    let noise_sq = stream.sigma() * stream.sigma() * dim as f64;
    let sep_sq = separation * separation;
    let start = stream.draws_so_far();
    let mut net = NetSpec {
        landmarks: Vec::new(),
        provenance: Vec::new(),
        separation,
        covering_radius: separation,
        draws: 0,
        budget_exhausted: false,
    };
    let far_from_all = |landmarks: &[Point], p: &[f64], offset: f64| {
        landmarks.iter().all(|l| linalg::dist_sq(p, l) - offset >= sep_sq)
    };
    while stream.draws_so_far() - start < budget {
        let candidate_index = stream.draws_so_far();
        let candidate = stream.next_sample();
        if !far_from_all(&net.landmarks, &candidate.x, noise_sq) {
            continue;
        }
        let remaining = budget - (stream.draws_so_far() - start);
        if remaining == 0 {
            break;
        }
        // Step back so the landmark run starts from the candidate itself.
        stream.seek(candidate_index);
        let run_config = LandmarkConfig { max_draws: config.max_draws.min(remaining), ..config.clone() };
        match two_round_landmark(stream, &run_config, rng) {
            Ok(result) => {
                let used = stream.draws_so_far() - candidate_index;
                if far_from_all(&net.landmarks, &result.q2, 0.0) {
                    net.landmarks.push(result.q2);
                    net.provenance.push(LandmarkProvenance { seed: stream.seed(), start_draw: candidate_index, draws: used });
                }
            }
            Err(Error::AcceptanceTooLow { .. }) => {
                net.budget_exhausted = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    net.draws = stream.draws_so_far() - start;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldModel;
    use crate::rng::seeded;

    #[test]
    fn pairwise_symmetry_on_shared_batches() {
        let m = ManifoldModel::sphere(2, 1.0, 16).unwrap();
        let mut s = SampleStream::new(m, 0.05, 1).unwrap();
        let cfg = LandmarkConfig { stage1_batch: Some(20), ..LandmarkConfig::new(0.05) };
        let qi = s.next_sample().x;
        let qj = s.next_sample().x;
        let est = estimate_pairwise_distance(&mut s, &qi, &qj, &cfg).unwrap();
        assert_eq!(distance_between_batches(&est.batch_i, &est.batch_j), distance_between_batches(&est.batch_j, &est.batch_i));
        assert_eq!(distance_between_batches(&est.batch_i, &est.batch_i), 0.0);
    }

    #[test]
    fn tiny_budget_gives_at_most_one_landmark() {
        let m = ManifoldModel::circle(1.0, 16).unwrap();
        let mut s = SampleStream::new(m, 0.05, 2).unwrap();
        let net = build_net(&mut s, &LandmarkConfig::new(0.05), 0.5, 50, &mut seeded(0)).unwrap();
        assert!(net.landmarks.len() <= 1);
        assert!(net.draws <= 50);
    }
}
