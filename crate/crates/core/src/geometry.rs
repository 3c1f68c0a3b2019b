//! Embedded manifold models with closed-form oracles.
//!
//! Each model lives in the first few coordinates of `R^D` (the "active
//! block") and is zero-padded beyond them. Noise is full-dimensional, so the
//! padding coordinates matter for everything downstream.
//!
//! Curvature is the bound on the ambient acceleration of unit-speed
//! geodesics, `‖c″‖ ≤ κ`. For the flat torus a unit-speed geodesic that
//! splits its speed as `(a, b)` across the two circle factors has
//! acceleration `√(a⁴/r₁² + b⁴/r₂²) ≤ max(1/r₁, 1/r₂)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::standard_normal;
use crate::special::ln_gamma;

pub type Point = Vec<f64>;

/// Relative tolerance used when deciding whether a point lies on M.
pub const ON_MANIFOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldKind {
    /// `S^d(r)` in the first `d + 1` coordinates.
    Sphere { dim: usize, radius: f64 },
    /// `S^1(r)` in the first two coordinates.
    Circle { radius: f64 },
    /// `S^1(r₁) × S^1(r₂)` in the first four coordinates.
    FlatTorus { r1: f64, r2: f64 },
}

/// Geometric constants of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldConstants {
    pub reach: f64,
    pub curvature: f64,
    pub diameter: f64,
    pub volume: f64,
    /// `max(1, κ)`
    pub kappa_bar: f64,
}

/// A `d`-dimensional manifold embedded in `R^D`.
///
/// Serialized as `{"kind": ..., "d": ..., "D": ..., "radii": [...]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ManifoldSpec", into = "ManifoldSpec")]
pub struct ManifoldModel {
    kind: ManifoldKind,
    ambient_dim: usize,
}

/// Wire form of a [`ManifoldModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: ManifoldKindName,
    pub d: usize,
    #[serde(rename = "D")]
    pub ambient_dim: usize,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKindName {
    Sphere,
    Circle,
    FlatTorus,
}

impl TryFrom<ManifoldSpec> for ManifoldModel {
    type Error = Error;

    fn try_from(spec: ManifoldSpec) -> Result<Self> {
        let radius = |i: usize| {
            spec.radii
                .get(i)
                .copied()
                .ok_or_else(|| Error::InvalidConfig(format!("manifold needs radius #{}", i + 1)))
        };
        let kind = match spec.kind {
            ManifoldKindName::Sphere => ManifoldKind::Sphere { dim: spec.d, radius: radius(0)? },
            ManifoldKindName::Circle => {
                if spec.d != 1 {
                    return Err(Error::InvalidConfig(format!("circle has d = 1, got {}", spec.d)));
                }
                ManifoldKind::Circle { radius: radius(0)? }
            }
            ManifoldKindName::FlatTorus => {
                if spec.d != 2 {
                    return Err(Error::InvalidConfig(format!("flat torus has d = 2, got {}", spec.d)));
                }
                ManifoldKind::FlatTorus { r1: radius(0)?, r2: radius(1)? }
            }
        };
        ManifoldModel::new(kind, spec.ambient_dim)
    }
}

impl From<ManifoldModel> for ManifoldSpec {
    fn from(m: ManifoldModel) -> Self {
        let (kind, radii) = match m.kind {
            ManifoldKind::Sphere { radius, .. } => (ManifoldKindName::Sphere, vec![radius]),
            ManifoldKind::Circle { radius } => (ManifoldKindName::Circle, vec![radius]),
            ManifoldKind::FlatTorus { r1, r2 } => (ManifoldKindName::FlatTorus, vec![r1, r2]),
        };
        ManifoldSpec { kind, d: m.intrinsic_dim(), ambient_dim: m.ambient_dim, radii }
    }
}

impl ManifoldModel {
    pub fn new(kind: ManifoldKind, ambient_dim: usize) -> Result<Self> {
        let radii_ok = match kind {
            ManifoldKind::Sphere { dim, radius } => {
                if dim == 0 {
                    return Err(Error::InvalidConfig("sphere dimension must be positive".into()));
                }
                radius > 0.0 && radius.is_finite()
            }
            ManifoldKind::Circle { radius } => radius > 0.0 && radius.is_finite(),
            ManifoldKind::FlatTorus { r1, r2 } => r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite(),
        };
        if !radii_ok {
            return Err(Error::InvalidConfig("radii must be positive and finite".into()));
        }
        let model = Self { kind, ambient_dim };
        if ambient_dim <= model.intrinsic_dim() || ambient_dim < model.active_dim() {
            return Err(Error::InvalidConfig(format!(
                "ambient dimension {} too small for a {}-dimensional model using {} coordinates",
                ambient_dim,
                model.intrinsic_dim(),
                model.active_dim()
            )));
        }
        Ok(model)
    }

    pub fn sphere(dim: usize, radius: f64, ambient_dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::Sphere { dim, radius }, ambient_dim)
    }

    pub fn circle(radius: f64, ambient_dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::Circle { radius }, ambient_dim)
    }

    pub fn flat_torus(r1: f64, r2: f64, ambient_dim: usize) -> Result<Self> {
        Self::new(ManifoldKind::FlatTorus { r1, r2 }, ambient_dim)
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere { dim, .. } => dim,
            ManifoldKind::Circle { .. } => 1,
            ManifoldKind::FlatTorus { .. } => 2,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of leading coordinates the model occupies.
    pub fn active_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Sphere { dim, .. } => dim + 1,
            ManifoldKind::Circle { .. } => 2,
            ManifoldKind::FlatTorus { .. } => 4,
        }
    }

    /// Largest radius in the model; the natural length scale.
    pub fn scale(&self) -> f64 {
        match self.kind {
            ManifoldKind::Sphere { radius, .. } | ManifoldKind::Circle { radius } => radius,
            ManifoldKind::FlatTorus { r1, r2 } => r1.max(r2),
        }
    }

    /// Same model with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let kind = match self.kind {
            ManifoldKind::Sphere { dim, radius } => ManifoldKind::Sphere { dim, radius: radius * factor },
            ManifoldKind::Circle { radius } => ManifoldKind::Circle { radius: radius * factor },
            ManifoldKind::FlatTorus { r1, r2 } => ManifoldKind::FlatTorus { r1: r1 * factor, r2: r2 * factor },
        };
        Self::new(kind, self.ambient_dim)
    }

    pub fn constants(&self) -> ManifoldConstants {
        let (reach, curvature, diameter, volume) = match self.kind {
            ManifoldKind::Sphere { dim, radius } => {
                let d = dim as f64;
                // |S^d(r)| = 2 π^{(d+1)/2} r^d / Γ((d+1)/2)
                let ln_area = core::f64::consts::LN_2 + 0.5 * (d + 1.0) * PI.ln() + d * radius.ln()
                    - ln_gamma(0.5 * (d + 1.0));
                (radius, 1.0 / radius, PI * radius, ln_area.exp())
            }
            ManifoldKind::Circle { radius } => (radius, 1.0 / radius, PI * radius, 2.0 * PI * radius),
            ManifoldKind::FlatTorus { r1, r2 } => (
                r1.min(r2),
                (1.0 / r1).max(1.0 / r2),
                PI * (r1 * r1 + r2 * r2).sqrt(),
                4.0 * PI * PI * r1 * r2,
            ),
        };
        ManifoldConstants { reach, curvature, diameter, volume, kappa_bar: curvature.max(1.0) }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: x.len() });
        }
        Ok(())
    }

    /// Radii of the circle factors, for models that are products of circles.
    fn circle_factors(&self) -> Option<([f64; 2], usize)> {
        match self.kind {
            ManifoldKind::Circle { radius } => Some(([radius, 0.0], 1)),
            ManifoldKind::FlatTorus { r1, r2 } => Some(([r1, r2], 2)),
            ManifoldKind::Sphere { .. } => None,
        }
    }

    /// Write a uniformly distributed point of M into `out` (length `D`).
    pub fn sample_uniform_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.ambient_dim);
        let k = self.active_dim();
        out[k..].fill(0.0);
        self.sample_active_into(rng, &mut out[..k]);
    }

    /// Write only the active block of a uniform point into `out`
    /// (length [`active_dim`](Self::active_dim)). Consumes the generator
    /// exactly like [`sample_uniform_into`](Self::sample_uniform_into).
    pub fn sample_active_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.kind {
            ManifoldKind::Sphere { radius, .. } => loop {
                for v in out.iter_mut() {
                    *v = standard_normal(rng);
                }
                let n = linalg::norm(out);
                if n > 0.0 {
                    linalg::scale(out, radius / n);
                    break;
                }
            },
            ManifoldKind::Circle { radius } => {
                let theta = rng.random::<f64>() * 2.0 * PI;
                out[0] = radius * theta.cos();
                out[1] = radius * theta.sin();
            }
            ManifoldKind::FlatTorus { r1, r2 } => {
                let a = rng.random::<f64>() * 2.0 * PI;
                let b = rng.random::<f64>() * 2.0 * PI;
                out[0] = r1 * a.cos();
                out[1] = r1 * a.sin();
                out[2] = r2 * b.cos();
                out[3] = r2 * b.sin();
            }
        }
    }

    /// A point drawn uniformly with respect to the surface measure.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut p = vec![0.0; self.ambient_dim];
        self.sample_uniform_into(rng, &mut p);
        p
    }

    /// Point with the given chart coordinates.
    ///
    /// Circle: `[θ]`. Torus: `[θ₁, θ₂]`. Sphere: `d` hyperspherical angles
    /// `x₁ = r cos φ₁, x₂ = r sin φ₁ cos φ₂, …, x_{d+1} = r sin φ₁ ⋯ sin φ_d`.
    pub fn from_chart(&self, coords: &[f64]) -> Result<Point> {
        let d = self.intrinsic_dim();
        if coords.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: coords.len() });
        }
        let mut p = vec![0.0; self.ambient_dim];
        match self.kind {
            ManifoldKind::Sphere { radius, .. } => {
                let mut sin_prod = radius;
                for (i, &phi) in coords.iter().enumerate() {
                    p[i] = sin_prod * phi.cos();
                    sin_prod *= phi.sin();
                }
                p[d] = sin_prod;
            }
            ManifoldKind::Circle { radius } => {
                p[0] = radius * coords[0].cos();
                p[1] = radius * coords[0].sin();
            }
            ManifoldKind::FlatTorus { r1, r2 } => {
                p[0] = r1 * coords[0].cos();
                p[1] = r1 * coords[0].sin();
                p[2] = r2 * coords[1].cos();
                p[3] = r2 * coords[1].sin();
            }
        }
        Ok(p)
    }

    /// Angles of the circle factors of a point (circle and torus only).
    pub fn angles(&self, p: &[f64]) -> Option<Vec<f64>> {
        let (_, n) = self.circle_factors()?;
        Some((0..n).map(|i| p[2 * i + 1].atan2(p[2 * i])).collect())
    }

    /// Nearest point on M. Closed form: rescale the active block (sphere) or
    /// each circle factor (torus) and zero the padding.
    pub fn project(&self, x: &[f64]) -> Result<Point> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.ambient_dim];
        match self.kind {
            ManifoldKind::Sphere { radius, .. } => {
                let k = self.active_dim();
                let n = linalg::norm(&x[..k]);
                if n == 0.0 {
                    return Err(Error::AmbiguousProjection);
                }
                for (o, v) in out[..k].iter_mut().zip(&x[..k]) {
                    *o = v * (radius / n);
                }
            }
            ManifoldKind::Circle { .. } | ManifoldKind::FlatTorus { .. } => {
                let (radii, n) = self.circle_factors().unwrap();
                for i in 0..n {
                    let (u, v) = (x[2 * i], x[2 * i + 1]);
                    let len = u.hypot(v);
                    if len == 0.0 {
                        return Err(Error::AmbiguousProjection);
                    }
                    out[2 * i] = u * (radii[i] / len);
                    out[2 * i + 1] = v * (radii[i] / len);
                }
            }
        }
        Ok(out)
    }

    /// `d(x, M) = ‖x − P_M x‖`.
    pub fn extrinsic_distance(&self, x: &[f64]) -> Result<f64> {
        let p = self.project(x)?;
        Ok(linalg::dist(x, &p))
    }

    /// Distance of `p` from satisfying the defining equations of M.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let k = self.active_dim();
        let pad = linalg::norm(&p[k..]);
        let block = match self.kind {
            ManifoldKind::Sphere { radius, .. } => (linalg::norm(&p[..k]) - radius).abs(),
            _ => {
                let (radii, n) = self.circle_factors().unwrap();
                (0..n).map(|i| (p[2 * i].hypot(p[2 * i + 1]) - radii[i]).abs()).fold(0.0, f64::max)
            }
        };
        block.max(pad)
    }

    pub fn check_on_manifold(&self, p: &[f64]) -> Result<()> {
        self.check_dim(p)?;
        let residual = self.residual(p);
        if residual > ON_MANIFOLD_TOL * self.scale() {
            return Err(Error::OffManifold { residual });
        }
        Ok(())
    }

    /// Intrinsic distance `d_M(a, b)` between two points of M.
    pub fn geodesic_distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_on_manifold(a)?;
        self.check_on_manifold(b)?;
        Ok(self.geodesic_distance_unchecked(a, b))
    }

    /// [`geodesic_distance`](Self::geodesic_distance) without the on-manifold
    /// check, for hot loops over points produced by this model. Only the
    /// active block is read, so active-block slices are accepted too.
    pub fn geodesic_distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            ManifoldKind::Sphere { radius, .. } => {
                let k = self.active_dim();
                let chord = linalg::dist(&a[..k], &b[..k]);
                2.0 * radius * (chord / (2.0 * radius)).min(1.0).asin()
            }
            _ => {
                let (radii, n) = self.circle_factors().unwrap();
                let mut sq = 0.0;
                for i in 0..n {
                    let ta = a[2 * i + 1].atan2(a[2 * i]);
                    let tb = b[2 * i + 1].atan2(b[2 * i]);
                    let mut gap = (ta - tb).abs() % (2.0 * PI);
                    if gap > PI {
                        gap = 2.0 * PI - gap;
                    }
                    sq += (radii[i] * gap) * (radii[i] * gap);
                }
                sq.sqrt()
            }
        }
    }

    /// Orthogonal projection of `v` onto the tangent space at `base` ∈ M.
    pub fn tangent_project(&self, base: &[f64], v: &[f64]) -> Point {
        let mut t = vec![0.0; self.ambient_dim];
        match self.kind {
            ManifoldKind::Sphere { radius, .. } => {
                let k = self.active_dim();
                let radial = linalg::dot(&base[..k], &v[..k]) / (radius * radius);
                for i in 0..k {
                    t[i] = v[i] - radial * base[i];
                }
            }
            _ => {
                let (radii, n) = self.circle_factors().unwrap();
                for i in 0..n {
                    // unit tangent of factor i is (-y, x) / r
                    let (x0, y0) = (base[2 * i] / radii[i], base[2 * i + 1] / radii[i]);
                    let s = -y0 * v[2 * i] + x0 * v[2 * i + 1];
                    t[2 * i] = -y0 * s;
                    t[2 * i + 1] = x0 * s;
                }
            }
        }
        t
    }

    /// A uniformly random unit tangent vector at `base`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, base: &[f64], rng: &mut R) -> Point {
        loop {
            let mut v = vec![0.0; self.ambient_dim];
            for x in v[..self.active_dim()].iter_mut() {
                *x = standard_normal(rng);
            }
            let mut t = self.tangent_project(base, &v);
            let n = linalg::norm(&t);
            if n > 1e-12 {
                linalg::scale(&mut t, 1.0 / n);
                return t;
            }
        }
    }

    /// Exponential map: the point `c(1)` of the geodesic with `c(0) = base`
    /// and `c′(0) = tangent` (the tangent is first projected onto `T_base M`).
    pub fn exp_map(&self, base: &[f64], tangent: &[f64]) -> Result<Point> {
        self.check_on_manifold(base)?;
        self.check_dim(tangent)?;
        let v = self.tangent_project(base, tangent);
        let mut out = vec![0.0; self.ambient_dim];
        match self.kind {
            ManifoldKind::Sphere { radius, .. } => {
                let speed = linalg::norm(&v);
                if speed == 0.0 {
                    out.copy_from_slice(base);
                    return Ok(out);
                }
                let theta = speed / radius;
                let (s, c) = theta.sin_cos();
                for i in 0..self.active_dim() {
                    out[i] = c * base[i] + s * radius * v[i] / speed;
                }
            }
            _ => {
                let (radii, n) = self.circle_factors().unwrap();
                for i in 0..n {
                    let (x0, y0) = (base[2 * i] / radii[i], base[2 * i + 1] / radii[i]);
                    let along = -y0 * v[2 * i] + x0 * v[2 * i + 1];
                    let angle = y0.atan2(x0) + along / radii[i];
                    out[2 * i] = radii[i] * angle.cos();
                    out[2 * i + 1] = radii[i] * angle.sin();
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn circle_chart_origin() {
        let m = ManifoldModel::circle(1.0, 2).unwrap();
        assert_eq!(m.from_chart(&[0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(ManifoldModel::sphere(2, 1.0, 2).is_err());
        assert!(ManifoldModel::flat_torus(1.0, 1.0, 3).is_err());
        assert!(ManifoldModel::sphere(2, -1.0, 10).is_err());
    }

    #[test]
    fn sphere_projection_examples() {
        let m = ManifoldModel::sphere(2, 1.0, 3).unwrap();
        assert_eq!(m.project(&[2.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(m.project(&[0.0, 0.0, 0.0]), Err(Error::AmbiguousProjection)));
        let p = [0.0, 0.6, 0.8];
        assert_eq!(m.project(&p).unwrap(), p.to_vec());
    }

    #[test]
    fn torus_projection_rescales_each_factor() {
        let m = ManifoldModel::flat_torus(1.0, 1.0, 4).unwrap();
        assert_eq!(m.project(&[0.5, 0.0, 2.0, 0.0]).unwrap(), vec![1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(m.project(&[0.0, 0.0, 2.0, 0.0]), Err(Error::AmbiguousProjection)));
    }

    #[test]
    fn extrinsic_distance_examples() {
        let m = ManifoldModel::sphere(2, 1.0, 5).unwrap();
        assert_eq!(m.extrinsic_distance(&[2.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(m.extrinsic_distance(&[0.5, 0.0, 0.0, 0.0, 0.0]).unwrap(), 0.5);
        let mut rng = seeded(3);
        let p = m.sample_uniform(&mut rng);
        assert!(m.extrinsic_distance(&p).unwrap() < 1e-12);
    }

    #[test]
    fn geodesic_distance_examples() {
        let s = ManifoldModel::sphere(2, 1.0, 3).unwrap();
        let d = s.geodesic_distance(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]).unwrap();
        assert!((d - PI).abs() < 1e-12);

        let c = ManifoldModel::circle(1.0, 2).unwrap();
        let a = c.from_chart(&[0.2]).unwrap();
        let b = c.from_chart(&[0.2 + PI / 3.0]).unwrap();
        assert!((c.geodesic_distance(&a, &b).unwrap() - PI / 3.0).abs() < 1e-12);

        let t = ManifoldModel::flat_torus(1.0, 1.0, 4).unwrap();
        let a = t.from_chart(&[0.0, 0.0]).unwrap();
        let b = t.from_chart(&[PI / 2.0, PI / 2.0]).unwrap();
        assert!((t.geodesic_distance(&a, &b).unwrap() - PI / 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn geodesic_distance_rejects_off_manifold_points() {
        let s = ManifoldModel::sphere(2, 1.0, 4).unwrap();
        let r = s.geodesic_distance(&[1.0, 0.0, 0.0, 0.1], &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(r, Err(Error::OffManifold { .. })));
    }

    #[test]
    fn torus_shorter_arc_wraps() {
        let t = ManifoldModel::flat_torus(2.0, 1.0, 6).unwrap();
        let a = t.from_chart(&[0.1, 0.0]).unwrap();
        let b = t.from_chart(&[2.0 * PI - 0.1, 0.0]).unwrap();
        assert!((t.geodesic_distance(&a, &b).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn constants_match_closed_forms() {
        let s = ManifoldModel::sphere(2, 2.0, 10).unwrap().constants();
        assert_eq!((s.reach, s.curvature, s.kappa_bar), (2.0, 0.5, 1.0));
        assert!((s.diameter - 2.0 * PI).abs() < 1e-15);
        assert!((s.volume - 16.0 * PI).abs() < 1e-12);
        let t = ManifoldModel::flat_torus(1.0, 0.5, 4).unwrap().constants();
        assert_eq!((t.reach, t.curvature, t.kappa_bar), (0.5, 2.0, 2.0));
        assert!((t.diameter - PI * 1.25_f64.sqrt()).abs() < 1e-15);
        let s3 = ManifoldModel::sphere(3, 1.0, 10).unwrap().constants();
        assert!((s3.volume - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn exp_map_moves_by_geodesic_length() {
        let mut rng = seeded(9);
        for m in [
            ManifoldModel::sphere(3, 1.5, 8).unwrap(),
            ManifoldModel::flat_torus(1.0, 0.7, 8).unwrap(),
            ManifoldModel::circle(2.0, 3).unwrap(),
        ] {
            let p = m.sample_uniform(&mut rng);
            let mut t = m.random_unit_tangent(&p, &mut rng);
            linalg::scale(&mut t, 0.4);
            let q = m.exp_map(&p, &t).unwrap();
            assert!(m.residual(&q) < 1e-12);
            assert!((m.geodesic_distance(&p, &q).unwrap() - 0.4).abs() < 1e-10);
        }
    }

    #[test]
    fn spec_round_trip() {
        let m = ManifoldModel::flat_torus(1.0, 2.0, 16).unwrap();
        let spec: ManifoldSpec = m.into();
        assert_eq!(spec.radii, vec![1.0, 2.0]);
        assert_eq!(ManifoldModel::try_from(spec).unwrap(), m);
    }
}
