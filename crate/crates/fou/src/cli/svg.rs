//! Deterministic static SVG line plots: fixed 800 x 500 canvas, no
//! external assets, coordinates rounded to 0.01 px so equal inputs
//! yield byte-equal files.

use crate::error::{FouError, Result};

pub struct PlotSpec {
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const ML: f64 = 72.0;
const MR: f64 = 24.0;
const MT: f64 = 28.0;
const MB: f64 = 56.0;

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

/// Tick positions and labels on a transformed-axis interval.
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<(f64, String)> {
    if log {
        let decades: Vec<i64> = ((lo.ceil() as i64)..=(hi.floor() as i64)).collect();
        if decades.len() >= 2 {
            return decades.iter().map(|&d| (d as f64, format!("1e{d}"))).collect();
        }
        // Narrow span: mantissa ticks 1, 2, 5 per decade.
        let mut out = Vec::new();
        for d in (lo.floor() as i64)..=(hi.floor() as i64 + 1) {
            for m in [1.0f64, 2.0, 5.0] {
                let t = d as f64 + m.log10();
                if t >= lo - 1e-9 && t <= hi + 1e-9 {
                    out.push((t, format!("{m}e{d}")));
                }
            }
        }
        return out;
    }
    let step = nice_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    if t == 0.0 {
        t = 0.0;
    }
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push((t, fmt_tick(t, step)));
        t += step;
    }
    out
}

fn transform(values: impl Iterator<Item = f64>, log: bool, axis: &str) -> Result<Vec<f64>> {
    values
        .map(|v| {
            if log {
                if !(v > 0.0) {
                    return Err(FouError::Usage(format!(
                        "log-scale {axis} axis needs positive values, got {v}"
                    )));
                }
                Ok(v.log10())
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn domain(values: &[f64], log: bool) -> (f64, f64) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return (0.0, 1.0);
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        let pad = if log { 0.5 } else { lo.abs().max(1.0) * 0.5 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render points as a polyline plot. Non-finite points are dropped;
/// log scales reject nonpositive values.
pub fn render(points: &[(f64, f64)], spec: &PlotSpec) -> Result<String> {
    let finite: Vec<(f64, f64)> =
        points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let xs = transform(finite.iter().map(|p| p.0), spec.log_x, "x")?;
    let ys = transform(finite.iter().map(|p| p.1), spec.log_y, "y")?;
    let (x0, x1) = domain(&xs, spec.log_x);
    let (y0, y1) = domain(&ys, spec.log_y);
    let pw = W - ML - MR;
    let ph = H - MT - MB;
    let sx = |t: f64| ML + (t - x0) / (x1 - x0) * pw;
    let sy = |t: f64| MT + ph - (t - y0) / (y1 - y0) * ph;

    let mut svg = String::with_capacity(4096);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!("<rect width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>\n"));

    for (t, label) in ticks(x0, x1, spec.log_x) {
        let x = sx(t);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
            px(x),
            px(MT),
            px(MT + ph)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            px(MT + ph + 18.0),
            esc(&label)
        ));
    }
    for (t, label) in ticks(y0, y1, spec.log_y) {
        let y = sy(t);
        svg.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#dddddd\"/>\n",
            px(y),
            px(ML),
            px(ML + pw)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            px(ML - 8.0),
            px(y + 4.0),
            esc(&label)
        ));
    }

    svg.push_str(&format!(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#222222\"/>\n",
        px(ML),
        px(MT),
        px(MT + ph)
    ));
    svg.push_str(&format!(
        "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#222222\"/>\n",
        px(MT + ph),
        px(ML),
        px(ML + pw)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        px(ML + pw / 2.0),
        px(H - 12.0),
        esc(&spec.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        px(MT + ph / 2.0),
        px(MT + ph / 2.0),
        esc(&spec.y_label)
    ));

    if !xs.is_empty() {
        let pts: Vec<String> =
            xs.iter().zip(&ys).map(|(&x, &y)| format!("{},{}", px(sx(x)), px(sy(y)))).collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        if xs.len() <= 256 {
            for (&x, &y) in xs.iter().zip(&ys) {
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1f6fb4\"/>\n",
                    px(sx(x)),
                    px(sy(y))
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
