//! CSV plot data. Each file starts with `#` comment lines naming the
//! columns, followed by a header row and the data rows.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{bail, Result};
use landmark_core::GroupingProfile;
use serde::{Deserialize, Serialize};

use crate::summary::median;
use crate::sweep::SweepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    HProfile,
    ErrorVsStage,
    ErrorVsD,
    ErrorVsSigma,
}

impl std::str::FromStr for PlotKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "h-profile" => PlotKind::HProfile,
            "error-vs-stage" => PlotKind::ErrorVsStage,
            "error-vs-D" | "error-vs-d" => PlotKind::ErrorVsD,
            "error-vs-sigma" => PlotKind::ErrorVsSigma,
            other => bail!("unknown plot kind `{other}`"),
        })
    }
}

fn header<W: Write>(out: &mut W, comments: &[&str], columns: &[&str]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{}", columns.join(","))?;
    Ok(())
}

/// Shortest round-trip text, in exponent form for very small or large values.
pub fn num(v: f64) -> String {
    if v != 0.0 && v.is_finite() && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn rows<W: Write>(out: W, rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// `(s, h(s), −ḣ(s))` on `points` evenly spaced offsets in `[0, s_max]`.
pub fn h_profile_points(profile: &GroupingProfile, s_max: f64, points: usize) -> Vec<(f64, f64, f64)> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let s = s_max * i as f64 / (n - 1) as f64;
            (s, profile.h(s), profile.neg_h_dot(s))
        })
        .collect()
}

pub fn write_h_profile<W: Write>(mut out: W, profile: &GroupingProfile, s_max: f64, points: usize) -> Result<()> {
    header(
        &mut out,
        &[
            &format!("grouping profile R={} sigma={} D={}", profile.radius, profile.sigma, profile.dim),
            &format!("s_star={} nu_bar={}", profile.s_star, profile.nu_bar),
            "s: offset of the clean point from the ball center along M",
            "h: probability the noisy point falls in the ball",
            "neg_h_dot: -dh/ds",
        ],
        &["s", "h", "neg_h_dot"],
    )?;
    let pts = h_profile_points(profile, s_max, points);
    rows(out, pts.into_iter().map(|(s, h, g)| vec![num(s), num(h), num(g)]))
}

/// Minimal SVG line chart of `h` and `−ḣ` (rescaled to peak 1).
pub fn h_profile_svg(profile: &GroupingProfile, s_max: f64, points: usize) -> String {
    let pts = h_profile_points(profile, s_max, points);
    let peak = pts.iter().map(|p| p.2).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let x = |s: f64| pad + (w - 2.0 * pad) * s / s_max;
    let y = |v: f64| h - pad - (h - 2.0 * pad) * v;
    let path = |f: &dyn Fn(&(f64, f64, f64)) -> f64| {
        pts.iter().map(|p| format!("{:.2},{:.2}", x(p.0), y(f(p)))).collect::<Vec<_>>().join(" ")
    };
    let mut svg = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n");
    svg += &format!(
        "<line x1=\"{pad}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{0}\" stroke=\"black\"/>\n",
        h - pad,
        w - pad
    );
    svg += &format!("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n", path(&|p| p.1));
    svg += &format!("<polyline fill=\"none\" stroke=\"firebrick\" stroke-width=\"2\" points=\"{}\"/>\n", path(&|p| p.2 / peak));
    let sx = x(profile.s_star);
    svg += &format!("<line x1=\"{sx:.2}\" y1=\"{pad}\" x2=\"{sx:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n", h - pad);
    svg += &format!("<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">s*</text>\n", sx + 4.0, pad + 12.0);
    svg += "<text x=\"50\" y=\"20\" font-size=\"12\" fill=\"steelblue\">h(s)</text>\n";
    svg += "<text x=\"110\" y=\"20\" font-size=\"12\" fill=\"firebrick\">-h'(s) / max</text>\n";
    svg += "</svg>\n";
    svg
}

fn by_tuple(records: &[SweepRecord]) -> BTreeMap<u32, Vec<&SweepRecord>> {
    let mut m: BTreeMap<u32, Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        m.entry(r.tuple).or_default().push(r);
    }
    m
}

fn stage_medians(rows: &[&SweepRecord]) -> [f64; 3] {
    let mut out = [f64::NAN; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let v: Vec<f64> = rows.iter().filter_map(|r| r.distances.map(|d| d[i])).collect();
        *o = median(&v);
    }
    out
}

fn ratio_median(rows: &[&SweepRecord]) -> f64 {
    median(&rows.iter().filter_map(|r| r.ratio).collect::<Vec<_>>())
}

/// Sweep plot data, one row per tuple in tuple order.
pub fn emit_plot_data<W: Write>(mut out: W, records: &[SweepRecord], kind: PlotKind) -> Result<()> {
    let groups = by_tuple(records);
    match kind {
        PlotKind::HProfile => bail!("h-profile data comes from a grouping profile, not sweep records"),
        PlotKind::ErrorVsStage => {
            header(
                &mut out,
                &["median d(q,M) after each stage per sweep tuple", "q0: raw sample, q1: after stage 1, q2: after stage 2"],
                &["tuple", "D", "sigma", "q0", "q1", "q2"],
            )?;
            rows(
                out,
                groups.iter().map(|(t, rs)| {
                    let m = stage_medians(rs);
                    vec![t.to_string(), rs[0].manifold.ambient_dim().to_string(), num(rs[0].sigma), num(m[0]), num(m[1]), num(m[2])]
                }),
            )
        }
        PlotKind::ErrorVsD | PlotKind::ErrorVsSigma => {
            let by_d = kind == PlotKind::ErrorVsD;
            header(
                &mut out,
                &[
                    if by_d { "median final error against ambient dimension" } else { "median final error against noise level" },
                    "d_q2: median d(q2,M); ratio: median d(q2,M) / (sigma sqrt(d (1 + kappa diam / log D)))",
                    "noise_over_reach: sigma sqrt(D) / reach",
                ],
                &["D", "sigma", "noise_over_reach", "d_q2", "ratio", "runs"],
            )?;
            let mut lines: Vec<(f64, f64, Vec<String>)> = groups
                .values()
                .map(|rs| {
                    let dim = rs[0].manifold.ambient_dim();
                    let sigma = rs[0].sigma;
                    let nor = sigma * (dim as f64).sqrt() / rs[0].reach;
                    let m = stage_medians(rs);
                    let key = if by_d { (nor, dim as f64) } else { (dim as f64, sigma) };
                    (key.0, key.1, vec![dim.to_string(), num(sigma), num(nor), num(m[2]), num(ratio_median(rs)), rs.len().to_string()])
                })
                .collect();
            lines.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            rows(out, lines.into_iter().map(|l| l.2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_records_give_header_only() {
        let mut buf = Vec::new();
        emit_plot_data(&mut buf, &[], PlotKind::ErrorVsStage).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
    }
}
