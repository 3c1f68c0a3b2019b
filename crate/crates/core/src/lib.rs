//! Local-averaging landmarks for data concentrated near a low-dimensional
//! manifold in high-dimensional Gaussian noise.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`geometry`]: closed-form manifold models (sphere, circle, flat torus)
//!   used as exact oracles for projection and geodesic distance.
//! * [`sampling`]: the seeded noisy-sample stream and the radius-filtered
//!   minibatch collector.
//! * [`grouping`]: the grouping probability `h(s)`, its derivative, the
//!   phase-transition location `s*`, subgaussian envelopes, and the Gaussian
//!   convolutions `φ∗h` and `φ∗(−ḣ)`.
//! * [`landmarking`]: the two-round landmarking procedure, the multi-round
//!   running-average variant, and the radius / batch-size calculators.
//! * [`estimators`]: signal estimation, pairwise distances and greedy nets.
//! * [`verify`]: Monte Carlo and grid checks of the analytical bounds.
//!
//! Special functions and quadrature live in [`special`] and [`quadrature`].

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod estimators;
pub mod geometry;
pub mod grouping;
pub mod landmarking;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{ManifoldConstants, ManifoldKind, ManifoldModel, Point};
pub use grouping::GroupingProfile;
pub use landmarking::{LandmarkConfig, LandmarkResult};
pub use sampling::{Batch, NoisySample, SampleStream};
