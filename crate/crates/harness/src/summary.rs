use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sweep::SweepRecord;

/// Median and quartiles, interpolated linearly between order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
}

pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn spread(values: &[f64]) -> Spread {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    Spread { median, q1, q3, iqr: q3 - q1 }
}

pub fn median(values: &[f64]) -> f64 {
    spread(values).median
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleSummary {
    pub tuple: u32,
    pub manifold: String,
    pub ambient_dim: usize,
    pub intrinsic_dim: usize,
    pub sigma: f64,
    pub noise_over_reach: f64,
    pub runs: usize,
    pub errors: usize,
    pub metrics: BTreeMap<String, Spread>,
    pub median_ratio: f64,
    /// Median distances do not increase from stage to stage.
    pub stages_nonincreasing: bool,
}

/// A set of tuples that differ along one axis only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisTrend {
    pub axis: String,
    pub manifold: String,
    /// The value held fixed: `σ√D/τ` on the D axis, `D` on the σ axis.
    pub fixed: f64,
    pub values: Vec<f64>,
    pub median_ratios: Vec<f64>,
    pub median_final_distances: Vec<f64>,
    /// max/min of the median ratios.
    pub ratio_spread: f64,
    /// Median `d(q²,M)` does not decrease as the axis value grows.
    pub final_distance_nondecreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tuples: Vec<TupleSummary>,
    pub trends: Vec<AxisTrend>,
}

fn describe(r: &SweepRecord) -> String {
    use landmark_core::ManifoldKind::*;
    match r.manifold.kind() {
        Sphere { dim, radius } => format!("sphere(d={dim}, r={radius})"),
        Circle { radius } => format!("circle(r={radius})"),
        FlatTorus { r1, r2 } => format!("flat_torus({r1}, {r2})"),
    }
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0])
}

/// Per-tuple statistics plus trends along the D and σ axes.
pub fn summarize(records: &[SweepRecord]) -> Summary {
    let mut groups: BTreeMap<u32, Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.tuple).or_default().push(r);
    }
    let mut tuples = Vec::new();
    for (tuple, rows) in groups {
        let first = rows[0];
        let ok: Vec<&SweepRecord> = rows.iter().copied().filter(|r| r.error.is_none()).collect();
        let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut push = |name: &str, v: f64| columns.entry(name.to_string()).or_default().push(v);
        for r in &ok {
            if let Some(d) = r.distances {
                push("d_q0", d[0]);
                push("d_q1", d[1]);
                push("d_q2", d[2]);
            }
            if let Some(s) = r.signal_distance {
                push("signal_distance_1", s[0]);
                push("signal_distance_2", s[1]);
            }
            if let Some(n) = r.noise_norm {
                push("noise_norm_1", n[0]);
                push("noise_norm_2", n[1]);
            }
            if let Some(dr) = r.draws {
                push("draws", dr.iter().sum::<u64>() as f64);
            }
            if let Some(x) = r.ratio {
                push("ratio", x);
            }
        }
        let metrics: BTreeMap<String, Spread> = columns.iter().map(|(k, v)| (k.clone(), spread(v))).collect();
        let med = |k: &str| metrics.get(k).map(|s| s.median).unwrap_or(f64::NAN);
        let dim = first.manifold.ambient_dim();
        tuples.push(TupleSummary {
            tuple,
            manifold: describe(first),
            ambient_dim: dim,
            intrinsic_dim: first.manifold.intrinsic_dim(),
            sigma: first.sigma,
            noise_over_reach: first.sigma * (dim as f64).sqrt() / first.reach,
            runs: rows.len(),
            errors: rows.len() - ok.len(),
            median_ratio: med("ratio"),
            stages_nonincreasing: med("d_q1") <= med("d_q0") && med("d_q2") <= med("d_q1"),
            metrics,
        });
    }
    let trends = trends(&tuples);
    Summary { tuples, trends }
}

fn round_key(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

fn trends(tuples: &[TupleSummary]) -> Vec<AxisTrend> {
    let mut out = Vec::new();
    let mut by_dim: BTreeMap<(String, i64), Vec<&TupleSummary>> = BTreeMap::new();
    let mut by_sigma: BTreeMap<(String, usize), Vec<&TupleSummary>> = BTreeMap::new();
    for t in tuples {
        by_dim.entry((t.manifold.clone(), round_key(t.noise_over_reach))).or_default().push(t);
        by_sigma.entry((t.manifold.clone(), t.ambient_dim)).or_default().push(t);
    }
    let mut build = |axis: &str, manifold: String, fixed: f64, mut members: Vec<&TupleSummary>, value: fn(&TupleSummary) -> f64| {
        members.sort_by(|a, b| value(a).total_cmp(&value(b)));
        members.dedup_by(|a, b| value(a) == value(b));
        if members.len() < 2 {
            return;
        }
        let ratios: Vec<f64> = members.iter().map(|t| t.median_ratio).collect();
        let finals: Vec<f64> =
            members.iter().map(|t| t.metrics.get("d_q2").map(|s| s.median).unwrap_or(f64::NAN)).collect();
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        out.push(AxisTrend {
            axis: axis.to_string(),
            manifold,
            fixed,
            values: members.iter().map(|t| value(t)).collect(),
            final_distance_nondecreasing: nondecreasing(&finals),
            median_ratios: ratios,
            median_final_distances: finals,
            ratio_spread: max / min,
        });
    };
    for ((m, _), members) in by_dim {
        let fixed = members[0].noise_over_reach;
        build("D", m, fixed, members, |t| t.ambient_dim as f64);
    }
    for ((m, dim), members) in by_sigma {
        build("sigma", m, dim as f64, members, |t| t.sigma);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert_eq!(spread(&[2.0]).median, 2.0);
        assert_eq!(spread(&[3.0, 3.0, 3.0]).iqr, 0.0);
        let s = spread(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!((s.q1, s.median, s.q3), (1.75, 2.5, 3.25));
    }
}
