//! Grouping probability and its phase transition.
//!
//! A noisy sample `x = x♮ + z` whose clean point sits at parallel offset `s`
//! from the center `q` falls inside `B(q, R)` with probability
//!
//! ```text
//! h(s) = P[χ²_{D−1} ≤ (R² − s²)/σ²] = P((D−1)/2, (R² − s²)/(2σ²))
//! ```
//!
//! where `P` is the regularized lower incomplete gamma function. `h` drops
//! from ≈1 to ≈0 around `s⋆ = √(R² − σ²(D−3))` over a width of order `ν`.
//! Averaging over the noise component along `q − x♮` gives `φ∗h`, the exact
//! acceptance probability of a clean point at distance `t` from `q`.
//!
//! `h` depends on `s` only through `s²`, so it is treated as an even
//! function of `s` and `−ḣ` as an odd one; this is what the convolutions
//! integrate against.

use core::f64::consts::{E, LN_2, PI};

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive_simpson, SimpsonOptions};
use crate::special::{ln_factorial, ln_gamma_dot_over_gamma, regularized_lower_gamma};

const LN_6: f64 = 1.791_759_469_228_055;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Half-width, in units of σ, of the Gaussian kernel support used by the
/// convolutions. The kernel mass outside is below `1e−32`.
pub const KERNEL_HALF_WIDTH: f64 = 12.0;

/// A two-sided bound valid on a window of its argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBand {
    pub lower: f64,
    pub upper: f64,
    pub window: (f64, f64),
}

impl EnvelopeBand {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// `(R, σ, D)` together with the phase-transition quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupingProfile {
    pub radius: f64,
    pub sigma: f64,
    pub dim: usize,
    /// `s⋆ = √(R² − σ²(D−3))`
    pub s_star: f64,
    /// `ν² = σ⁴(D−3) / (2 s⋆²)`
    pub nu: f64,
    /// `ν̄² = ν² + σ²`
    pub nu_bar: f64,
    /// `š⋆ = √(R² − σ²(D−1))`, absent when `R² < σ²(D−1)`.
    pub s_check: Option<f64>,
    /// `ν̌² = σ⁴(D−1) / (2 š⋆²)`
    pub nu_check: Option<f64>,
}

impl GroupingProfile {
    /// Fails unless `σ > 0`, `D ≥ 4` and `R² ≥ σ²(D−3)`.
    pub fn new(radius: f64, sigma: f64, dim: usize) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(domain("sigma", sigma));
        }
        if dim < 4 {
            return Err(domain("D", dim as f64));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain("R", radius));
        }
        let d = dim as f64;
        let s2 = sigma * sigma;
        let s_star_sq = radius * radius - s2 * (d - 3.0);
        if s_star_sq < 0.0 {
            return Err(domain("R^2 - sigma^2 (D - 3)", s_star_sq));
        }
        let s_star = s_star_sq.sqrt();
        let nu = (s2 * s2 * (d - 3.0) / (2.0 * s_star_sq)).sqrt();
        let nu_bar = (nu * nu + s2).sqrt();
        let s_check_sq = radius * radius - s2 * (d - 1.0);
        let (s_check, nu_check) = if s_check_sq >= 0.0 {
            (Some(s_check_sq.sqrt()), Some((s2 * s2 * (d - 1.0) / (2.0 * s_check_sq)).sqrt()))
        } else {
            (None, None)
        };
        Ok(Self { radius, sigma, dim, s_star, nu, nu_bar, s_check, nu_check })
    }

    /// Profile whose phase transition sits at the given `s⋆`.
    pub fn from_s_star(s_star: f64, sigma: f64, dim: usize) -> Result<Self> {
        let r_sq = s_star * s_star + sigma * sigma * (dim as f64 - 3.0);
        Self::new(r_sq.sqrt(), sigma, dim)
    }

    /// Shape parameter `(D−1)/2` of the chi-square law.
    pub fn shape(&self) -> f64 {
        0.5 * (self.dim as f64 - 1.0)
    }

    fn gamma_arg(&self, s: f64) -> f64 {
        (self.radius * self.radius - s * s) / (2.0 * self.sigma * self.sigma)
    }

    /// Grouping probability `h(s)`; zero for `|s| ≥ R`.
    pub fn h(&self, s: f64) -> f64 {
        let x = self.gamma_arg(s);
        if x <= 0.0 {
            return 0.0;
        }
        regularized_lower_gamma(self.shape(), x).unwrap_or(0.0)
    }

    /// `ln(−ḣ(s))` for `0 < s < R`.
    pub fn ln_neg_h_dot(&self, s: f64) -> f64 {
        let x = self.gamma_arg(s);
        if x <= 0.0 || s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        s.ln() - 2.0 * self.sigma.ln() + ln_gamma_dot_over_gamma(self.shape(), x)
    }

    /// `−ḣ(s) = (s/σ²) γ̇((D−1)/2, (R²−s²)/(2σ²)) / Γ((D−1)/2)`, extended as
    /// an odd function and set to zero for `|s| ≥ R`.
    pub fn neg_h_dot(&self, s: f64) -> f64 {
        if s < 0.0 {
            return -self.neg_h_dot(-s);
        }
        self.ln_neg_h_dot(s).exp()
    }

    /// `d/ds [−ḣ(s)] = (g/σ²)[1 − (s²/σ²)((p−1)/x − 1)]` with
    /// `g = γ̇(p, x)/Γ(p)`.
    pub fn neg_h_dot_derivative(&self, s: f64) -> f64 {
        let x = self.gamma_arg(s);
        if x <= 0.0 {
            return 0.0;
        }
        let s2 = self.sigma * self.sigma;
        let p = self.shape();
        let g = ln_gamma_dot_over_gamma(p, x).exp();
        g / s2 * (1.0 - s * s / s2 * ((p - 1.0) / x - 1.0))
    }

    /// `s⋆,∥ = √(s⋆² − d(q,M)²)`.
    pub fn s_star_parallel(&self, dist_q: f64) -> Result<f64> {
        let v = self.s_star * self.s_star - dist_q * dist_q;
        if v < 0.0 || !(dist_q >= 0.0) {
            return Err(domain("s_star^2 - d(q,M)^2", v));
        }
        Ok(v.sqrt())
    }

    fn kernel(&self, v: f64) -> f64 {
        let u = v / self.sigma;
        (-0.5 * u * u - LN_SQRT_2PI).exp() / self.sigma
    }

    /// Integration limits in `v` for `∫ φ_σ(v) f(t − v) dv` where `f`
    /// vanishes for `|t − v| ≥ R`, plus breakpoints at the transitions.
    fn conv_domain(&self, t: f64) -> (f64, f64, [f64; 7]) {
        let w = KERNEL_HALF_WIDTH * self.sigma;
        let lo = (-w).max(t - self.radius);
        let hi = w.min(t + self.radius);
        let (s, nu) = (self.s_star, self.nu.min(self.sigma));
        (lo, hi, [0.0, t - s - 3.0 * nu, t - s, t - s + 3.0 * nu, t + s - 3.0 * nu, t + s, t + s + 3.0 * nu])
    }

    /// Peak size of `−ḣ`, used to scale quadrature tolerances.
    fn neg_h_dot_scale(&self) -> f64 {
        self.neg_h_dot(self.s_star).max(self.neg_h_dot(self.s_star + self.nu)).max(1.0)
    }

    /// `(φ∗h)(t) = ∫ φ_σ(v) h(t − v) dv`, the probability that a sample with
    /// clean point at distance `t` from `q` falls in `B(q, R)`.
    pub fn phi_conv_h(&self, t: f64) -> Result<f64> {
        self.phi_conv_h_with(t, &SimpsonOptions { abs_tol: 1e-11, initial_panels: 24, ..Default::default() })
    }

    pub fn phi_conv_h_with(&self, t: f64, opts: &SimpsonOptions) -> Result<f64> {
        let (lo, hi, breaks) = self.conv_domain(t);
        let v = adaptive_simpson(|v| self.kernel(v) * self.h(t - v), lo, hi, &breaks, opts)?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// `(φ∗(−ḣ))(t) = −d/dt (φ∗h)(t)`.
    pub fn phi_conv_neg_hdot(&self, t: f64) -> Result<f64> {
        let opts = SimpsonOptions { abs_tol: 1e-11 * self.neg_h_dot_scale(), initial_panels: 24, ..Default::default() };
        self.phi_conv_neg_hdot_with(t, &opts)
    }

    pub fn phi_conv_neg_hdot_with(&self, t: f64, opts: &SimpsonOptions) -> Result<f64> {
        let (lo, hi, breaks) = self.conv_domain(t);
        adaptive_simpson(|v| self.kernel(v) * self.neg_h_dot(t - v), lo, hi, &breaks, opts)
    }

    /// Half-width `σ(D−3)^{1/6}` that sets every lemma window.
    pub fn window_unit(&self) -> f64 {
        self.sigma * (self.dim as f64 - 3.0).powf(1.0 / 6.0)
    }

    fn s_star_sq_in(&self, lower_factor: f64, lower_power: f64) -> bool {
        let d = self.dim as f64;
        let s2 = self.sigma * self.sigma;
        let ss = self.s_star * self.s_star;
        lower_factor * s2 * d.powf(lower_power) <= ss && ss <= 3.0 * s2 * d
    }

    /// Hypotheses of the subgaussian bounds on `−ḣ`:
    /// `D > 192` and `σ²√D ≤ s⋆² ≤ 3σ²D`.
    pub fn neg_h_dot_bounds_admissible(&self) -> bool {
        self.dim > 192 && self.s_star_sq_in(1.0, 0.5)
    }

    /// Hypotheses of the monotonicity of `−ḣ` away from `s⋆`:
    /// `D > 48³ + 3` and `96 log 6 · σ²D^{2/3} ≤ s⋆² ≤ 3σ²D`.
    pub fn monotonicity_admissible(&self) -> bool {
        self.dim as f64 > 48.0 * 48.0 * 48.0 + 3.0 && self.s_star_sq_in(96.0 * LN_6, 2.0 / 3.0)
    }

    /// Hypotheses of the bounds on `φ∗(−ḣ)`:
    /// `D > (48 log 6)³ + 3` and `24 log 6 · σ²D^{2/3} ≤ s⋆² ≤ 3σ²D`.
    pub fn phi_conv_neg_hdot_bounds_admissible(&self) -> bool {
        self.dim as f64 > (48.0 * LN_6).powi(3) + 3.0 && self.s_star_sq_in(24.0 * LN_6, 2.0 / 3.0)
    }

    /// Hypotheses of the bounds on `φ∗h` and of the relative bound:
    /// `D > (576 log 2)³ + 3` and `576 log 2 · σ²D^{2/3} ≤ s⋆² ≤ 3σ²D`.
    pub fn phi_conv_h_bounds_admissible(&self) -> bool {
        self.dim as f64 > (576.0 * LN_2).powi(3) + 3.0 && self.s_star_sq_in(576.0 * LN_2, 2.0 / 3.0)
    }

    fn check_window(&self, s: f64, half: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (self.s_star - half, self.s_star + half);
        if s < lo || s > hi {
            return Err(Error::Window { x: s, lo, hi });
        }
        Ok((lo, hi))
    }

    fn c_of_d(&self) -> f64 {
        c_of_d(self.dim).unwrap_or(f64::NAN)
    }

    /// Band `[1/(8e), 6e] · C(D)(s⋆/σ²) exp(−(s−s⋆)²/(2ν²))` for `−ḣ(s)`,
    /// valid for `|s − s⋆| ≤ σ(D−3)^{1/6}/3`.
    pub fn neg_h_dot_envelope(&self, s: f64) -> Result<EnvelopeBand> {
        let window = self.check_window(s, self.window_unit() / 3.0)?;
        let ds = s - self.s_star;
        let core = self.c_of_d() * self.s_star / (self.sigma * self.sigma) * (-ds * ds / (2.0 * self.nu * self.nu)).exp();
        Ok(EnvelopeBand { lower: core / (8.0 * E), upper: 6.0 * E * core, window })
    }

    /// Band `[1/(16e), 9e] · C(D)(ν/ν̄)(s⋆/σ²) exp(−(s−s⋆)²/(2ν̄²))` for
    /// `φ∗(−ḣ)`, valid for `|s − s⋆| ≤ σ(D−3)^{1/6}/6`.
    pub fn phi_conv_neg_hdot_envelope(&self, s: f64) -> Result<EnvelopeBand> {
        let window = self.check_window(s, self.window_unit() / 6.0)?;
        let ds = s - self.s_star;
        let core = self.c_of_d() * (self.nu / self.nu_bar) * self.s_star / (self.sigma * self.sigma)
            * (-ds * ds / (2.0 * self.nu_bar * self.nu_bar)).exp();
        Ok(EnvelopeBand { lower: core / (16.0 * E), upper: 9.0 * E * core, window })
    }

    /// Bounds on `φ∗h(s)` for `0 ≤ s ≤ s⋆ + σ(D−3)^{1/6}/12`.
    ///
    /// Lower: `C(D)s⋆ν/(64e²σ²)` up to `s⋆ + ν̄`, then
    /// `C(D)(s⋆ν/σ²)(ν̄/(s−s⋆)) exp(−(s−s⋆)²/(2ν̄²)) / (64e)`.
    /// Upper: `1` below `š⋆`, `4 exp(−(s−š⋆)²/(2(ν̌²+σ²)))` above it.
    pub fn phi_conv_h_envelope(&self, s: f64) -> Result<EnvelopeBand> {
        let hi = self.s_star + self.window_unit() / 12.0;
        if s < 0.0 || s > hi {
            return Err(Error::Window { x: s, lo: 0.0, hi });
        }
        let base = self.c_of_d() * self.s_star * self.nu / (self.sigma * self.sigma);
        let ds = s - self.s_star;
        let lower = if ds <= self.nu_bar {
            base / (64.0 * E * E)
        } else {
            base * (self.nu_bar / ds) * (-ds * ds / (2.0 * self.nu_bar * self.nu_bar)).exp() / (64.0 * E)
        };
        Ok(EnvelopeBand { lower, upper: self.phi_conv_h_upper(s), window: (0.0, hi) })
    }

    /// Upper tail bound `4 exp(−(s−š⋆)²/(2(ν̌²+σ²)))` for `s ≥ š⋆`, else 1.
    pub fn phi_conv_h_upper(&self, s: f64) -> f64 {
        match (self.s_check, self.nu_check) {
            (Some(sc), Some(nc)) if s >= sc => {
                let ds = s - sc;
                (4.0 * (-ds * ds / (2.0 * (nc * nc + self.sigma * self.sigma))).exp()).min(1.0)
            }
            _ => 1.0,
        }
    }

    /// Tail bound `4 exp(−(s−š⋆)²/(2ν̌²))` on `h(s)` for `s ≥ š⋆`.
    pub fn h_upper_tail(&self, s: f64) -> Option<f64> {
        let (sc, nc) = (self.s_check?, self.nu_check?);
        if s < sc {
            return None;
        }
        let ds = s - sc;
        Some(4.0 * (-ds * ds / (2.0 * nc * nc)).exp())
    }

    /// `max{1/ν̄, (s−s⋆)/ν̄²}`, the scale in the relative bound on
    /// `φ∗(−ḣ) / φ∗h`.
    pub fn relative_bound_scale(&self, s: f64) -> f64 {
        (1.0 / self.nu_bar).max((s - self.s_star) / (self.nu_bar * self.nu_bar))
    }
}

/// Band `[γ̇(p,x⋆)/4, 4γ̇(p,x⋆)] · exp(−(x−x⋆)²/(2x⋆))` with `x⋆ = p − 1`,
/// valid for `p ≥ 28` and `|x − x⋆| ≤ x⋆^{2/3}`.
///
/// The band is for the normalized integrand `γ̇(p, x)/Γ(p)` so that it stays
/// finite for large `p`; multiplying through by `Γ(p)` gives the band for
/// `γ̇` itself.
pub fn gamma_dot_envelope(p: f64, x: f64) -> Result<EnvelopeBand> {
    if !(p >= 28.0) || !p.is_finite() {
        return Err(domain("p", p));
    }
    let x_star = p - 1.0;
    let half = x_star.powf(2.0 / 3.0);
    let (lo, hi) = (x_star - half, x_star + half);
    if !(x >= lo && x <= hi) {
        return Err(Error::Window { x, lo, hi });
    }
    let dx = x - x_star;
    let core = (ln_gamma_dot_over_gamma(p, x_star) - dx * dx / (2.0 * x_star)).exp();
    Ok(EnvelopeBand { lower: 0.25 * core, upper: 4.0 * core, window: (lo, hi) })
}

/// `C(D) = γ̇((D−1)/2, (D−3)/2) / Γ((D−1)/2)` for `D ≥ 4`.
pub fn c_of_d(dim: usize) -> Result<f64> {
    if dim < 4 {
        return Err(domain("D", dim as f64));
    }
    let d = dim as f64;
    Ok(ln_gamma_dot_over_gamma(0.5 * (d - 1.0), 0.5 * (d - 3.0)).exp())
}

/// The sharper bound `(π(D−3))^{−1/2} e^{−1/(6(D−3)+1)}` on `C(D)`.
pub fn c_of_d_bound(dim: usize) -> f64 {
    let m = dim as f64 - 3.0;
    (PI * m).sqrt().recip() * (-1.0 / (6.0 * m + 1.0)).exp()
}

/// `ε_n = ln n! − ln(√(2π) n^{n+1/2} e^{−n})`, which lies in
/// `[1/(12n+1), 1/(12n)]`.
pub fn stirling_epsilon(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("n", 0.0));
    }
    let x = n as f64;
    Ok(ln_factorial(n) - (LN_SQRT_2PI + (x + 0.5) * x.ln() - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2b() -> GroupingProfile {
        GroupingProfile::new(3.84_f64.sqrt(), 0.1, 128).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let g = fig2b();
        assert!((g.s_star * g.s_star - 2.59).abs() < 1e-12);
        assert!((g.nu * g.nu - 1e-4 * 125.0 / (2.0 * 2.59)).abs() < 1e-15);
        assert!(g.s_star >= g.s_check.unwrap());
        assert!(GroupingProfile::new(0.5, 0.1, 128).is_err());
    }

    #[test]
    fn h_endpoints() {
        let g = fig2b();
        assert_eq!(g.h(g.radius), 0.0);
        assert!(g.h(0.0) >= 1.0 - 1e-12);
        assert_eq!(g.neg_h_dot(0.0), 0.0);
        assert_eq!(g.neg_h_dot(g.radius), 0.0);
    }

    #[test]
    fn s_star_parallel_examples() {
        let g = GroupingProfile::from_s_star(2.59_f64.sqrt(), 0.1, 128).unwrap();
        assert!((g.s_star_parallel(0.0).unwrap() - g.s_star).abs() < 1e-12);
        assert!(g.s_star_parallel(g.s_star).unwrap() < 1e-6);
        assert!((g.s_star_parallel(1.0).unwrap() - 1.59_f64.sqrt()).abs() < 1e-12);
        assert!(g.s_star_parallel(2.0).is_err());
    }

    #[test]
    fn derivative_of_neg_h_dot_matches_finite_difference() {
        let g = fig2b();
        for s in [1.2, 1.55, 1.6093, 1.7] {
            let eps = 1e-6;
            let fd = (g.neg_h_dot(s + eps) - g.neg_h_dot(s - eps)) / (2.0 * eps);
            let exact = g.neg_h_dot_derivative(s);
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "{s}: {fd} vs {exact}");
        }
    }

    #[test]
    fn c_of_d_closed_form_at_four() {
        let expected = 0.5_f64.sqrt() * (-0.5_f64).exp() / (PI.sqrt() / 2.0);
        assert!((c_of_d(4).unwrap() - expected).abs() < 1e-14);
        assert!(c_of_d(3).is_err());
    }

    #[test]
    fn stirling_epsilon_at_one() {
        let e1 = stirling_epsilon(1).unwrap();
        assert!((e1 - (1.0 - LN_SQRT_2PI)).abs() < 1e-15);
    }

    #[test]
    fn envelope_window_errors() {
        assert!(matches!(gamma_dot_envelope(28.0, 100.0), Err(Error::Window { .. })));
        assert!(gamma_dot_envelope(20.0, 19.0).is_err());
    }
}
