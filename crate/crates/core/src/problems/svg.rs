//! SVG line plots of solution bundles.
//!
//! One file per quantity. The `r = 1` curve is solid, the `r = 0` upper
//! bound dashed and the lower bound dotted; intermediate levels are thin grey.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bvp::SolutionBundle;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 40.0;

struct Series<'a> {
    r: f64,
    low: &'a [f64],
    up: &'a [f64],
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(t: &[f64], y: &[f64], sx: &dyn Fn(f64) -> f64, sy: &dyn Fn(f64) -> f64) -> String {
    t.iter()
        .zip(y)
        .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render(title: &str, t: &[f64], series: &[Series]) -> String {
    let finite = |v: &f64| v.is_finite();
    let (mut lo, mut hi) = series
        .iter()
        .flat_map(|s| s.low.iter().chain(s.up))
        .filter(|v| finite(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let (t0, t1) = (t[0], t[t.len() - 1]);
    let sx = move |v: f64| LEFT + (v - t0) / (t1 - t0) * (WIDTH - LEFT - RIGHT);
    let sy = move |v: f64| HEIGHT - BOTTOM - (v - lo) / (hi - lo) * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let tv = t0 + f * (t1 - t0);
        let yv = lo + f * (hi - lo);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(tv),
            HEIGHT - BOTTOM + 16.0,
            tick_label(tv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, WIDTH / 2.0, HEIGHT - 6.0);

    // intermediate levels first so the bounds stay on top
    let mut ordered: Vec<&Series> = series.iter().collect();
    ordered.sort_by_key(|s| if s.r == 0.0 || s.r == 1.0 { 1 } else { 0 });
    for s in ordered {
        let styles: [(&[f64], &str); 2] = if s.r == 1.0 {
            [(s.low, r#"stroke="black" stroke-width="2""#), (s.up, r#"stroke="black" stroke-width="2""#)]
        } else if s.r == 0.0 {
            [
                (s.low, r##"stroke="#1f4e9c" stroke-width="1.5" stroke-dasharray="2,3""##),
                (s.up, r##"stroke="#b22222" stroke-width="1.5" stroke-dasharray="8,4""##),
            ]
        } else {
            [(s.low, r##"stroke="#bbbbbb" stroke-width="0.75""##), (s.up, r##"stroke="#bbbbbb" stroke-width="0.75""##)]
        };
        for (curve, style) in styles {
            let _ = writeln!(
                out,
                r#"<polyline data-r="{}" fill="none" {} points="{}"/>"#,
                tick_label(s.r),
                style,
                polyline(t, curve, &sx, &sy)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Renders `(file stem suffix, svg text)` for the control and every state.
pub fn render_svgs(bundle: &SolutionBundle) -> Vec<(String, String)> {
    let t = bundle.time.nodes();
    let mut plots = Vec::new();
    for k in 0..bundle.n_controls() {
        let name = if bundle.n_controls() == 1 { "u".to_owned() } else { format!("u{}", k + 1) };
        let series: Vec<Series> =
            bundle.solutions.iter().map(|s| Series { r: s.r, low: s.u_low(k), up: s.u_up(k) }).collect();
        plots.push((name.clone(), render(&format!("{}: control {}", bundle.name, name), t, &series)));
    }
    for i in 0..bundle.n_states() {
        let name = format!("x{}", i + 1);
        let series: Vec<Series> =
            bundle.solutions.iter().map(|s| Series { r: s.r, low: s.x_low(i), up: s.x_up(i) }).collect();
        plots.push((name.clone(), render(&format!("{}: state {}", bundle.name, name), t, &series)));
    }
    plots
}

/// Writes `<dir>/<stem>_<quantity>.svg` files and returns their paths.
pub fn emit_svg(bundle: &SolutionBundle, dir: &Path, stem: &str) -> std::io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for (name, text) in render_svgs(bundle) {
        let path = dir.join(format!("{stem}_{name}.svg"));
        std::fs::write(&path, text)?;
        paths.push(path);
    }
    Ok(paths)
}
