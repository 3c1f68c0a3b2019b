//! Adaptive Simpson quadrature.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Maximum bisection depth of a single panel.
const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy)]
pub struct SimpsonOptions {
    /// Target absolute error for the whole integral.
    pub abs_tol: f64,
    /// Number of equal panels each breakpoint interval is split into before
    /// adaptation starts, so narrow features are not stepped over.
    pub initial_panels: usize,
    /// Budget of integrand evaluations.
    pub max_evaluations: usize,
}

impl Default for SimpsonOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, initial_panels: 16, max_evaluations: 2_000_000 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

/// Integrate `f` over `[a, b]` with adaptive Simpson, splitting first at
/// every breakpoint that falls strictly inside the interval.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], opts: &SimpsonOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(b > a) {
        return Ok(0.0);
    }
    let mut knots: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    knots.push(a);
    knots.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    knots.push(b);
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup();

    let panels_per = opts.initial_panels.max(1);
    let total_panels = (knots.len() - 1) * panels_per;
    let width = b - a;
    let mut evaluations = 0usize;
    let mut stack: Vec<Panel> = Vec::with_capacity(64);
    let mut total = 0.0;
    // Compensated summation over accepted panels.
    let mut carry = 0.0;

    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / panels_per as f64;
        for k in 0..panels_per {
            let pa = lo + h * k as f64;
            let pb = if k + 1 == panels_per { hi } else { lo + h * (k + 1) as f64 };
            let pm = 0.5 * (pa + pb);
            let (fa, fm, fb) = (f(pa), f(pm), f(pb));
            evaluations += 3;
            let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
            // Tolerance is shared in proportion to panel width.
            let tol = opts.abs_tol * ((pb - pa) / width).max(1.0 / total_panels as f64 / 4.0);
            stack.push(Panel { a: pa, b: pb, fa, fm, fb, whole, tol, depth: 0 });
            while let Some(p) = stack.pop() {
                let m = 0.5 * (p.a + p.b);
                let lm = 0.5 * (p.a + m);
                let rm = 0.5 * (m + p.b);
                let flm = f(lm);
                let frm = f(rm);
                evaluations += 2;
                if evaluations > opts.max_evaluations {
                    return Err(Error::QuadratureNonConvergence { evaluations });
                }
                let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
                let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
                let delta = left + right - p.whole;
                if p.depth >= MAX_DEPTH || delta.abs() <= 15.0 * p.tol {
                    let accepted = left + right + delta / 15.0;
                    let y = accepted - carry;
                    let t = total + y;
                    carry = (t - total) - y;
                    total = t;
                } else {
                    let tol = 0.5 * p.tol;
                    let depth = p.depth + 1;
                    stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth });
                    stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth });
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, &[], &SimpsonOptions::default()).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt();
        let v = adaptive_simpson(phi, -12.0, 12.0, &[0.0], &SimpsonOptions::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sharp_feature_with_breakpoint() {
        let f = |x: f64| if x < 0.3 { 0.0 } else { 1.0 };
        let v = adaptive_simpson(f, 0.0, 1.0, &[0.3], &SimpsonOptions::default()).unwrap();
        assert!((v - 0.7).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = SimpsonOptions { abs_tol: 1e-300, initial_panels: 1, max_evaluations: 50 };
        let r = adaptive_simpson(|x: f64| x.sin() * x.exp(), 0.0, 10.0, &[], &opts);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }
}
