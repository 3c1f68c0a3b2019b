//! The noisy-sample stream `x = x♮ + z` and the radius-filtered minibatch
//! collector.
//!
//! Draw `i` of a stream with seed `s` is generated from its own generator,
//! seeded with `derive_seed(s, i >> 32, i)`. A draw is therefore a pure
//! function of `(s, i)`: replays are bit-identical, and a rejected draw that
//! was abandoned half-way (see [`SampleStream::next_within`]) does not
//! perturb any later draw.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{ManifoldModel, Point};
use crate::linalg;
use crate::rng::{derive_seed, seeded, standard_normal};

/// Default draw budget per minibatch.
pub const DEFAULT_MAX_DRAWS: u64 = 10_000_000;

/// One draw of the data model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisySample {
    pub x: Point,
    pub x_nat: Point,
    pub z: Vec<f64>,
    pub draw_index: u64,
}

/// An unbounded seeded stream of noisy samples from a manifold model.
#[derive(Debug, Clone)]
pub struct SampleStream {
    manifold: ManifoldModel,
    sigma: f64,
    seed: u64,
    draws: u64,
}

/// A filled minibatch.
///
/// Sums are always kept; the members themselves only when retention was
/// requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub center: Point,
    pub radius: f64,
    pub count: usize,
    pub members: Vec<NoisySample>,
    pub sum_x: Vec<f64>,
    pub sum_x_nat: Vec<f64>,
    pub sum_z: Vec<f64>,
    pub draws_consumed: u64,
    /// Stream index of the first draw examined for this batch.
    pub first_draw: u64,
}

impl Batch {
    fn empty(center: &[f64], radius: f64, first_draw: u64) -> Self {
        let n = center.len();
        Self {
            center: center.to_vec(),
            radius,
            count: 0,
            members: Vec::new(),
            sum_x: vec![0.0; n],
            sum_x_nat: vec![0.0; n],
            sum_z: vec![0.0; n],
            draws_consumed: 0,
            first_draw,
        }
    }

    fn absorb(&mut self, x_nat: &[f64], z: &[f64]) {
        for i in 0..self.sum_x.len() {
            self.sum_x[i] += x_nat[i] + z[i];
            self.sum_x_nat[i] += x_nat[i];
            self.sum_z[i] += z[i];
        }
        self.count += 1;
    }

    fn averaged(sum: &[f64], count: usize) -> Point {
        let inv = 1.0 / count as f64;
        sum.iter().map(|v| v * inv).collect()
    }

    /// `(1/N) Σ x`
    pub fn mean(&self) -> Point {
        Self::averaged(&self.sum_x, self.count)
    }

    /// `(1/N) Σ x♮`
    pub fn signal_average(&self) -> Point {
        Self::averaged(&self.sum_x_nat, self.count)
    }

    /// `(1/N) Σ z`
    pub fn noise_average(&self) -> Vec<f64> {
        Self::averaged(&self.sum_z, self.count)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.draws_consumed == 0 {
            return 0.0;
        }
        self.count as f64 / self.draws_consumed as f64
    }
}

impl SampleStream {
    pub fn new(manifold: ManifoldModel, sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(domain("sigma", sigma));
        }
        Ok(Self { manifold, sigma, seed, draws: 0 })
    }

    pub fn manifold(&self) -> &ManifoldModel {
        &self.manifold
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn draws_so_far(&self) -> u64 {
        self.draws
    }

    /// Move the stream position to draw `index`. Draws are pure functions of
    /// the index, so this replays or skips without generating anything.
    pub fn seek(&mut self, index: u64) {
        self.draws = index;
    }

    fn draw_rng(&self, index: u64) -> crate::rng::SeededRng {
        seeded(derive_seed(self.seed, index >> 32, index))
    }

    /// Generate the next draw.
    pub fn next_sample(&mut self) -> NoisySample {
        let dim = self.manifold.ambient_dim();
        let draw_index = self.draws;
        let mut rng = self.draw_rng(draw_index);
        self.draws += 1;
        let mut x_nat = vec![0.0; dim];
        self.manifold.sample_uniform_into(&mut rng, &mut x_nat);
        let z: Vec<f64> = (0..dim).map(|_| self.sigma * standard_normal(&mut rng)).collect();
        let x = linalg::add(&x_nat, &z);
        NoisySample { x, x_nat, z, draw_index }
    }

    /// Generate the next draw and test `‖x − center‖² ≤ r_sq`.
    ///
    /// Noise coordinates are generated in order while the squared distance is
    /// accumulated; once the partial sum exceeds `r_sq` the draw is abandoned.
    /// Accepted draws are exactly those [`next_sample`](Self::next_sample)
    /// would have produced. On acceptance `x_nat` and `z` hold the sample.
    pub fn next_within(&mut self, center: &[f64], r_sq: f64, x_nat: &mut [f64], z: &mut [f64]) -> bool {
        let mut rng = self.draw_rng(self.draws);
        self.draws += 1;
        self.manifold.sample_uniform_into(&mut rng, x_nat);
        let mut acc = 0.0;
        for i in 0..center.len() {
            let zi = self.sigma * standard_normal(&mut rng);
            z[i] = zi;
            let diff = x_nat[i] + zi - center[i];
            acc += diff * diff;
            if acc > r_sq {
                return false;
            }
        }
        true
    }

    /// Collect `count` samples with `‖x − center‖ ≤ radius`, keeping members.
    pub fn collect_minibatch(&mut self, center: &[f64], radius: f64, count: usize, max_draws: u64) -> Result<Batch> {
        self.collect_minibatch_with(center, radius, count, max_draws, true)
    }

    /// Like [`collect_minibatch`](Self::collect_minibatch); with
    /// `retain = false` only the running sums are kept, which is what large
    /// batches in high dimension need.
    pub fn collect_minibatch_with(
        &mut self,
        center: &[f64],
        radius: f64,
        count: usize,
        max_draws: u64,
        retain: bool,
    ) -> Result<Batch> {
        let dim = self.manifold.ambient_dim();
        if center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: center.len() });
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain("radius", radius));
        }
        if count == 0 {
            return Err(domain("count", 0.0));
        }
        let r_sq = radius * radius;
        let mut batch = Batch::empty(center, radius, self.draws);
        let mut x_nat = vec![0.0; dim];
        let mut z = vec![0.0; dim];
        while batch.count < count {
            if batch.draws_consumed >= max_draws {
                return Err(Error::AcceptanceTooLow {
                    stage: 0,
                    accepted: batch.count,
                    requested: count,
                    draws: batch.draws_consumed,
                });
            }
            let index = self.draws;
            batch.draws_consumed += 1;
            if self.next_within(center, r_sq, &mut x_nat, &mut z) {
                batch.absorb(&x_nat, &z);
                if retain {
                    batch.members.push(NoisySample {
                        x: linalg::add(&x_nat, &z),
                        x_nat: x_nat.clone(),
                        z: z.clone(),
                        draw_index: index,
                    });
                }
            }
        }
        Ok(batch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(d: usize) -> ManifoldModel {
        ManifoldModel::sphere(2, 1.0, d).unwrap()
    }

    #[test]
    fn zero_noise_gives_clean_points() {
        let mut s = SampleStream::new(sphere(16), 0.0, 1).unwrap();
        let p = s.next_sample();
        assert_eq!(p.x, p.x_nat);
        assert_eq!(p.draw_index, 0);
        assert_eq!(s.draws_so_far(), 1);
    }

    #[test]
    fn fused_filter_matches_plain_draws() {
        let m = sphere(32);
        let mut plain = SampleStream::new(m, 0.2, 5).unwrap();
        let mut fused = SampleStream::new(m, 0.2, 5).unwrap();
        let center = plain.next_sample().x;
        fused.next_sample();
        let r_sq = 1.6;
        let mut a = vec![0.0; 32];
        let mut b = vec![0.0; 32];
        for _ in 0..500 {
            let s = plain.next_sample();
            let hit = linalg::dist_sq(&s.x, &center) <= r_sq;
            assert_eq!(fused.next_within(&center, r_sq, &mut a, &mut b), hit);
            if hit {
                assert_eq!(a, s.x_nat);
                assert_eq!(b, s.z);
            }
        }
    }

    #[test]
    fn huge_radius_accepts_every_draw() {
        let mut s = SampleStream::new(sphere(64), 0.1, 3).unwrap();
        let q = vec![0.0; 64];
        let batch = s.collect_minibatch(&q, 100.0, 5, 100).unwrap();
        assert_eq!(batch.draws_consumed, 5);
        assert_eq!(batch.members.len(), 5);
        let idx: Vec<u64> = batch.members.iter().map(|m| m.draw_index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn tiny_radius_reports_low_acceptance() {
        let d = 64;
        let sigma = 0.1;
        let mut s = SampleStream::new(sphere(d), sigma, 3).unwrap();
        let q = s.manifold().from_chart(&[0.3, 0.2]).unwrap();
        let r = 0.5 * sigma * ((d - 3) as f64).sqrt();
        let err = s.collect_minibatch(&q, r, 1, 1000).unwrap_err();
        assert!(matches!(err, Error::AcceptanceTooLow { accepted: 0, requested: 1, draws: 1000, .. }));
    }

    #[test]
    fn batch_sums_decompose() {
        let mut s = SampleStream::new(sphere(20), 0.1, 11).unwrap();
        let q = s.next_sample().x;
        let b = s.collect_minibatch(&q, 1.2, 20, 100_000).unwrap();
        let mean = b.mean();
        let split = linalg::add(&b.signal_average(), &b.noise_average());
        assert!(linalg::dist(&mean, &split) < 1e-12);
        for m in &b.members {
            assert!(linalg::dist(&m.x, &q) <= 1.2);
        }
    }
}
