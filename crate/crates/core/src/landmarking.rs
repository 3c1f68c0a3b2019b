//! Two-round minibatch landmarking and its multi-round running-average
//! variant.
//!
//! A landmark starts at a raw noisy sample `q⁰`. Stage 1 averages the next
//! `N₁` samples within `R₁` of it and adds a small Gaussian perturbation `ϑ`
//! to get `q¹`; stage 2 averages the next `N₂` samples within `R₂` of `q¹`
//! to get `q²`. The stream index only moves forward, so no sample is used
//! twice.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{ManifoldModel, Point};
use crate::linalg;
use crate::rng::standard_normal;
use crate::sampling::{Batch, SampleStream, DEFAULT_MAX_DRAWS};

/// The numerical constants the radius and batch-size formulas leave free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TheoremConstants {
    pub c2: f64,
    pub c3: f64,
    pub c6: f64,
    pub c7: f64,
}

impl Default for TheoremConstants {
    fn default() -> Self {
        Self { c2: 1.0, c3: 1.0, c6: 1.0, c7: 1.0 }
    }
}

/// One round of the multi-round variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundSpec {
    pub radius: f64,
    pub batch: usize,
}

/// Tunables of the landmarking procedures. Radii and batch sizes left as
/// `None` are computed from the formulas at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LandmarkConfig {
    pub sigma: f64,
    pub constants: TheoremConstants,
    pub stage1_radius: Option<f64>,
    pub stage2_radius: Option<f64>,
    pub stage1_batch: Option<usize>,
    pub stage2_batch: Option<usize>,
    pub perturbation: bool,
    pub max_draws: u64,
    /// Keep every accepted sample in the result, not just batch sums.
    pub retain_batches: bool,
    /// Radius and batch size per round for [`multi_round_landmark`].
    pub schedule: Vec<RoundSpec>,
}

impl Default for LandmarkConfig {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            constants: TheoremConstants::default(),
            stage1_radius: None,
            stage2_radius: None,
            stage1_batch: None,
            stage2_batch: None,
            perturbation: true,
            max_draws: DEFAULT_MAX_DRAWS,
            retain_batches: false,
            schedule: Vec::new(),
        }
    }
}

/// Radii and batch sizes actually used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageParams {
    pub radius1: f64,
    pub radius2: f64,
    pub batch1: usize,
    pub batch2: usize,
}

/// `R₁² = σ²(2D − d − 3) + C₃κ̄²σ²d + 3C₃κ̄σ²√(Dd)`. Returns the squared
/// radius.
pub fn stage1_radius(sigma: f64, dim: usize, d: usize, kappa_bar: f64, c3: f64) -> f64 {
    let (big, small) = (dim as f64, d as f64);
    let s2 = sigma * sigma;
    s2 * (2.0 * big - small - 3.0) + c3 * kappa_bar * kappa_bar * s2 * small + 3.0 * c3 * kappa_bar * s2 * (big * small).sqrt()
}

/// `R₂² = σ²(D − 3 + D^{3/4} + 2C₇D^{5/12})`. Returns the squared radius.
pub fn stage2_radius(sigma: f64, dim: usize, c7: f64) -> f64 {
    let big = dim as f64;
    sigma * sigma * (big - 3.0 + big.powf(0.75) + 2.0 * c7 * big.powf(5.0 / 12.0))
}

fn batch_size(value: f64) -> Result<usize> {
    if value.is_nan() || value > 1e15 {
        return Err(Error::InvalidConfig(format!("batch size {value} is not representable")));
    }
    Ok((value.ceil() as usize).max(1))
}

/// `N₁ = ⌈C₂ log D · diam² / (σ²(log D + κ diam))⌉`, at least 1.
pub fn stage1_batch_size(sigma: f64, dim: usize, kappa: f64, diam: f64, c2: f64) -> Result<usize> {
    let ln_d = (dim as f64).ln();
    batch_size(c2 * ln_d * diam * diam / (sigma * sigma * (ln_d + kappa * diam)))
}

/// `N₂ = ⌈C₆ log² D · diam² / (σ²(log D + κ diam))⌉`, at least 1.
pub fn stage2_batch_size(sigma: f64, dim: usize, kappa: f64, diam: f64, c6: f64) -> Result<usize> {
    let ln_d = (dim as f64).ln();
    batch_size(c6 * ln_d * ln_d * diam * diam / (sigma * sigma * (ln_d + kappa * diam)))
}

/// `ϑ` with `D` i.i.d. `N(0, σ²D^{−1/4})` coordinates.
pub fn draw_perturbation<R: Rng + ?Sized>(sigma: f64, dim: usize, rng: &mut R) -> Vec<f64> {
    let sd = sigma * (dim as f64).powf(-0.125);
    (0..dim).map(|_| sd * standard_normal(rng)).collect()
}

impl LandmarkConfig {
    pub fn new(sigma: f64) -> Self {
        Self { sigma, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(domain("sigma", self.sigma));
        }
        let c = self.constants;
        for (name, v) in [("C2", c.c2), ("C3", c.c3), ("C6", c.c6), ("C7", c.c7)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        for r in [self.stage1_radius, self.stage2_radius].into_iter().flatten() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(domain("radius", r));
            }
        }
        if self.stage1_batch == Some(0) || self.stage2_batch == Some(0) {
            return Err(Error::InvalidConfig("batch sizes must be at least 1".into()));
        }
        if self.max_draws == 0 {
            return Err(Error::InvalidConfig("max_draws must be positive".into()));
        }
        for round in &self.schedule {
            if !(round.radius > 0.0) || round.batch == 0 {
                return Err(Error::InvalidConfig("every scheduled round needs a positive radius and batch".into()));
            }
        }
        Ok(())
    }

    /// Fill in the radii and batch sizes for a manifold.
    pub fn resolve(&self, manifold: &ManifoldModel) -> Result<StageParams> {
        self.validate()?;
        let k = manifold.constants();
        let (dim, d) = (manifold.ambient_dim(), manifold.intrinsic_dim());
        let c = self.constants;
        let needs_sigma = self.stage1_radius.is_none()
            || self.stage2_radius.is_none()
            || self.stage1_batch.is_none()
            || self.stage2_batch.is_none();
        if needs_sigma && self.sigma == 0.0 {
            return Err(Error::InvalidConfig("automatic radii and batch sizes need sigma > 0".into()));
        }
        let radius1 = match self.stage1_radius {
            Some(r) => r,
            None => stage1_radius(self.sigma, dim, d, k.kappa_bar, c.c3).sqrt(),
        };
        let radius2 = match self.stage2_radius {
            Some(r) => r,
            None => stage2_radius(self.sigma, dim, c.c7).sqrt(),
        };
        let batch1 = match self.stage1_batch {
            Some(n) => n,
            None => stage1_batch_size(self.sigma, dim, k.curvature, k.diameter, c.c2)?,
        };
        let batch2 = match self.stage2_batch {
            Some(n) => n,
            None => stage2_batch_size(self.sigma, dim, k.curvature, k.diameter, c.c6)?,
        };
        Ok(StageParams { radius1, radius2, batch1, batch2 })
    }

    fn check_stream(&self, stream: &SampleStream) -> Result<()> {
        let (a, b) = (stream.sigma(), self.sigma);
        if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
            return Err(Error::SigmaMismatch { stream: a, config: b });
        }
        Ok(())
    }
}

/// Per-stage split of a minibatch mean into its clean and noise parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDiagnostics {
    pub signal_average: Point,
    pub noise_average: Vec<f64>,
    /// `d((1/N)Σx♮, M)`
    pub signal_average_distance: f64,
    /// `‖(1/N)Σz‖`
    pub noise_average_norm: f64,
    pub acceptance_rate: f64,
}

impl StageDiagnostics {
    fn from_batch(manifold: &ManifoldModel, batch: &Batch) -> Result<Self> {
        let signal_average = batch.signal_average();
        let noise_average = batch.noise_average();
        Ok(Self {
            signal_average_distance: manifold.extrinsic_distance(&signal_average)?,
            noise_average_norm: linalg::norm(&noise_average),
            signal_average,
            noise_average,
            acceptance_rate: batch.acceptance_rate(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `[d(q⁰,M), d(q¹,M), d(q²,M)]`
    pub distances: [f64; 3],
    /// Clean point of the initial sample.
    pub q0_nat: Point,
    pub stages: [StageDiagnostics; 2],
}

/// Output of [`two_round_landmark`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkResult {
    pub q0: Point,
    pub q1: Point,
    pub q2: Point,
    pub perturbation: Vec<f64>,
    pub params: StageParams,
    /// Stage 1 and stage 2 minibatches. Members are present only when the
    /// config asked for retention.
    pub batches: [Batch; 2],
    /// Draws consumed by the initial sample, stage 1 and stage 2.
    pub draws_per_stage: [u64; 3],
    pub diagnostics: Diagnostics,
}

fn tag_stage(err: Error, stage: u32) -> Error {
    match err {
        Error::AcceptanceTooLow { accepted, requested, draws, .. } => {
            Error::AcceptanceTooLow { stage, accepted, requested, draws }
        }
        other => other,
    }
}

/// Run the two-round procedure on `stream`, drawing the perturbation from
/// `rng`.
pub fn two_round_landmark<R: Rng + ?Sized>(
    stream: &mut SampleStream,
    config: &LandmarkConfig,
    rng: &mut R,
) -> Result<LandmarkResult> {
    config.check_stream(stream)?;
    let params = config.resolve(stream.manifold())?;
    let manifold = *stream.manifold();
    let dim = manifold.ambient_dim();

    let first = stream.next_sample();
    let q0 = first.x;

    let batch1 = stream
        .collect_minibatch_with(&q0, params.radius1, params.batch1, config.max_draws, config.retain_batches)
        .map_err(|e| tag_stage(e, 1))?;
    let perturbation = if config.perturbation {
        draw_perturbation(config.sigma, dim, rng)
    } else {
        vec![0.0; dim]
    };
    let q1 = linalg::add(&batch1.mean(), &perturbation);

    let batch2 = stream
        .collect_minibatch_with(&q1, params.radius2, params.batch2, config.max_draws, config.retain_batches)
        .map_err(|e| tag_stage(e, 2))?;
    let q2 = batch2.mean();

    let diagnostics = Diagnostics {
        distances: [
            manifold.extrinsic_distance(&q0)?,
            manifold.extrinsic_distance(&q1)?,
            manifold.extrinsic_distance(&q2)?,
        ],
        q0_nat: first.x_nat,
        stages: [StageDiagnostics::from_batch(&manifold, &batch1)?, StageDiagnostics::from_batch(&manifold, &batch2)?],
    };
    Ok(LandmarkResult {
        q0,
        q1,
        q2,
        perturbation,
        params,
        draws_per_stage: [1, batch1.draws_consumed, batch2.draws_consumed],
        batches: [batch1, batch2],
        diagnostics,
    })
}

/// Output of [`multi_round_landmark`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiRoundResult {
    pub q0: Point,
    /// Landmark after each round.
    pub landmarks: Vec<Point>,
    /// `d(q,M)` for the initial point and after each round.
    pub distances: Vec<f64>,
    /// Number of points averaged into the landmark after each round,
    /// counting the initial sample.
    pub weights: Vec<usize>,
    pub draws_per_round: Vec<u64>,
    pub batches: Vec<Batch>,
}

/// Multi-round variant: after each round the landmark becomes the running
/// mean `q ← (N q + Σx)/(N + N_ℓ)` of the initial sample and every accepted
/// sample so far. No perturbation is injected.
pub fn multi_round_landmark(stream: &mut SampleStream, config: &LandmarkConfig) -> Result<MultiRoundResult> {
    config.check_stream(stream)?;
    config.validate()?;
    if config.schedule.is_empty() {
        return Err(Error::InvalidConfig("multi-round landmarking needs a radius schedule".into()));
    }
    let manifold = *stream.manifold();
    let q0 = stream.next_sample().x;
    let mut q = q0.clone();
    let mut weight = 1usize;
    let mut out = MultiRoundResult {
        distances: vec![manifold.extrinsic_distance(&q0)?],
        q0,
        landmarks: Vec::with_capacity(config.schedule.len()),
        weights: Vec::with_capacity(config.schedule.len()),
        draws_per_round: Vec::with_capacity(config.schedule.len()),
        batches: Vec::with_capacity(config.schedule.len()),
    };
    for (i, round) in config.schedule.iter().enumerate() {
        let batch = stream
            .collect_minibatch_with(&q, round.radius, round.batch, config.max_draws, config.retain_batches)
            .map_err(|e| tag_stage(e, i as u32 + 1))?;
        let total = (weight + batch.count) as f64;
        for (qi, sx) in q.iter_mut().zip(&batch.sum_x) {
            *qi = (weight as f64 * *qi + sx) / total;
        }
        weight += batch.count;
        out.distances.push(manifold.extrinsic_distance(&q)?);
        out.landmarks.push(q.clone());
        out.weights.push(weight);
        out.draws_per_round.push(batch.draws_consumed);
        out.batches.push(batch);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn radius_formulas() {
        assert!((stage1_radius(0.05, 256, 4, 1.0, 1.0) - 1.5125).abs() < 1e-12);
        assert!((stage1_radius(0.05, 256, 4, 1.0, 0.0) - 0.0025 * 505.0).abs() < 1e-12);
        let r2 = stage2_radius(0.1, 256, 1.0);
        assert!((r2 - 0.01 * (317.0 + 2.0 * 256f64.powf(5.0 / 12.0))).abs() < 1e-12);
        assert!((r2 - 3.37159).abs() < 1e-4);
    }

    #[test]
    fn batch_formulas() {
        let pi = core::f64::consts::PI;
        assert_eq!(stage1_batch_size(0.1, 128, 1.0, pi, 1.0).unwrap(), 600);
        assert_eq!(stage1_batch_size(0.1, 128, 1.0, pi, 0.0).unwrap(), 1);
        assert!(stage1_batch_size(0.0, 128, 1.0, pi, 1.0).is_err());
    }

    #[test]
    fn sigma_mismatch_is_rejected() {
        let m = ManifoldModel::sphere(2, 1.0, 16).unwrap();
        let mut s = SampleStream::new(m, 0.1, 0).unwrap();
        let cfg = LandmarkConfig::new(0.2);
        let err = two_round_landmark(&mut s, &cfg, &mut seeded(0)).unwrap_err();
        assert!(matches!(err, Error::SigmaMismatch { .. }));
    }

    #[test]
    fn stage_tag_on_acceptance_failure() {
        let m = ManifoldModel::sphere(2, 1.0, 64).unwrap();
        let mut s = SampleStream::new(m, 0.1, 0).unwrap();
        let cfg = LandmarkConfig {
            stage1_radius: Some(0.1),
            max_draws: 200,
            ..LandmarkConfig::new(0.1)
        };
        let err = two_round_landmark(&mut s, &cfg, &mut seeded(0)).unwrap_err();
        assert!(matches!(err, Error::AcceptanceTooLow { stage: 1, .. }));
    }

    #[test]
    fn multi_round_is_running_mean() {
        let m = ManifoldModel::sphere(2, 1.0, 8).unwrap();
        let mut s = SampleStream::new(m, 0.05, 4).unwrap();
        let cfg = LandmarkConfig {
            retain_batches: true,
            schedule: vec![RoundSpec { radius: 3.0, batch: 3 }, RoundSpec { radius: 3.0, batch: 2 }],
            ..LandmarkConfig::new(0.05)
        };
        let r = multi_round_landmark(&mut s, &cfg).unwrap();
        let mut sum = r.q0.clone();
        for b in &r.batches {
            for m in &b.members {
                linalg::axpy(&mut sum, 1.0, &m.x);
            }
        }
        linalg::scale(&mut sum, 1.0 / 6.0);
        assert_eq!(r.weights, vec![4, 6]);
        assert!(linalg::dist(&sum, r.landmarks.last().unwrap()) < 1e-12);
    }
}
