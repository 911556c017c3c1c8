//! Static SVG output: hex-tiled map grids and node-link layout drawings.

use std::collections::BTreeSet;
use std::fmt::Write;

use anyhow::{bail, Result};
use socmap_core::som::{Dims, Grid};

/// Radius of a hexagon, centre to corner.
const HEX: f64 = 20.0;
const MARGIN: f64 = 10.0;
const LEGEND: f64 = 150.0;
const TITLE: f64 = 24.0;
const LOW: (u8, u8, u8) = (0xf7, 0xfb, 0xff);
const HIGH: (u8, u8, u8) = (0x08, 0x30, 0x6b);
const EMPTY: &str = "#e0e0e0";
pub const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

pub enum Fill<'a> {
    Numeric(&'a Grid<f64>),
    Categorical(&'a Grid<Option<String>>),
}

impl Fill<'_> {
    fn dims(&self) -> Dims {
        match self {
            Fill::Numeric(g) => g.dims,
            Fill::Categorical(g) => g.dims,
        }
    }
}

fn ramp(t: f64) -> String {
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(LOW.0, HIGH.0), mix(LOW.1, HIGH.1), mix(LOW.2, HIGH.2))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Centre of cell `(row, col)`; odd rows shift right by half a cell.
pub fn hex_center(row: usize, col: usize) -> (f64, f64) {
    let w = 3f64.sqrt() * HEX;
    let x = MARGIN + w / 2.0 + w * (col as f64 + if row % 2 == 1 { 0.5 } else { 0.0 });
    let y = MARGIN + TITLE + HEX + 1.5 * HEX * row as f64;
    (x, y)
}

fn hex_points(cx: f64, cy: f64) -> String {
    let mut s = String::new();
    for k in 0..6 {
        let a = std::f64::consts::PI / 180.0 * (60.0 * k as f64 - 30.0);
        if k > 0 {
            s.push(' ');
        }
        write!(s, "{:.2},{:.2}", cx + HEX * a.cos(), cy + HEX * a.sin()).unwrap();
    }
    s
}

/// Hex map of `fill` with a legend: min/max for numeric grids, one swatch
/// per category (sorted) for categorical grids.
pub fn render_hexmap(fill: &Fill, title: &str) -> Result<String> {
    let dims = fill.dims();
    if dims.cells() == 0 {
        bail!("cannot render an empty grid");
    }
    let w = 3f64.sqrt() * HEX;
    let map_w = MARGIN * 2.0 + w * (dims.cols as f64 + if dims.rows > 1 { 0.5 } else { 0.0 });
    let map_h = MARGIN * 2.0 + TITLE + HEX * 2.0 + 1.5 * HEX * (dims.rows as f64 - 1.0);
    let categories: Vec<String> = match fill {
        Fill::Categorical(g) => g.cells.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
        Fill::Numeric(_) => Vec::new(),
    };
    let legend_h = MARGIN + TITLE + 20.0 * (categories.len().max(2) as f64 + 1.0);
    let (width, height) = (map_w + LEGEND, map_h.max(legend_h));

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    )?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(s, r#"<text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="14">{}</text>"#, MARGIN + 14.0, escape(title))?;
    let lx = map_w + 10.0;
    match fill {
        Fill::Numeric(g) => {
            let finite = g.cells.iter().copied().filter(|v| v.is_finite());
            let lo = finite.clone().fold(f64::INFINITY, f64::min);
            let hi = finite.fold(f64::NEG_INFINITY, f64::max);
            for (c, &v) in g.iter() {
                let (cx, cy) = hex_center(c.row, c.col);
                let color = if !v.is_finite() {
                    EMPTY.to_string()
                } else if hi > lo {
                    ramp((v - lo) / (hi - lo))
                } else {
                    ramp(0.0)
                };
                writeln!(s, r##"<polygon points="{}" fill="{color}" stroke="#555" stroke-width="0.5"/>"##, hex_points(cx, cy))?;
            }
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (f64::NAN, f64::NAN) };
            let top = MARGIN + TITLE;
            writeln!(s, r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#, ramp(0.0), ramp(1.0))?;
            writeln!(s, r##"<rect x="{lx:.2}" y="{top:.2}" width="16" height="100" fill="url(#ramp)" stroke="#555" stroke-width="0.5"/>"##)?;
            writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">max={}</text>"#, lx + 22.0, top + 10.0, fmt_value(hi))?;
            writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">min={}</text>"#, lx + 22.0, top + 100.0, fmt_value(lo))?;
        }
        Fill::Categorical(g) => {
            let color = |cat: &str| PALETTE[categories.iter().position(|c| c == cat).unwrap_or(0) % PALETTE.len()];
            for (c, v) in g.iter() {
                let (cx, cy) = hex_center(c.row, c.col);
                let fill = v.as_deref().map_or(EMPTY, color);
                writeln!(s, r##"<polygon points="{}" fill="{fill}" stroke="#555" stroke-width="0.5"/>"##, hex_points(cx, cy))?;
            }
            for (i, cat) in categories.iter().enumerate() {
                let y = MARGIN + TITLE + 20.0 * i as f64;
                writeln!(s, r##"<rect x="{lx:.2}" y="{y:.2}" width="14" height="14" fill="{}" stroke="#555" stroke-width="0.5"/>"##, color(cat))?;
                writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#, lx + 20.0, y + 11.0, escape(cat))?;
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "n/a".into()
    } else {
        let r = format!("{v:.4}");
        let r = r.trim_end_matches('0').trim_end_matches('.');
        if r == "-0" { "0".into() } else { r.into() }
    }
}

/// Node-link drawing: coordinates scaled into a square canvas, node radius
/// proportional to `sizes` (rescaled to 2..8 px), fill by `groups`.
pub fn render_layout(coords: &[[f64; 2]], edges: &[(usize, usize)], sizes: &[f64], groups: &[usize], title: &str) -> Result<String> {
    if coords.is_empty() {
        bail!("cannot render an empty layout");
    }
    const SIDE: f64 = 800.0;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in coords {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let pad = MARGIN + 10.0;
    let at = |p: &[f64; 2]| (pad + (p[0] - x0) / span * (SIDE - 2.0 * pad), pad + TITLE + (p[1] - y0) / span * (SIDE - 2.0 * pad));
    let (s_lo, s_hi) = sizes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let radius = |v: f64| if s_hi > s_lo { 2.0 + 6.0 * (v - s_lo) / (s_hi - s_lo) } else { 4.0 };

    let mut s = String::new();
    let h = SIDE + TITLE;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIDE:.0}" height="{h:.0}" viewBox="0 0 {SIDE:.2} {h:.2}">"#)?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(s, r#"<text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="14">{}</text>"#, MARGIN + 14.0, escape(title))?;
    writeln!(s, r##"<g stroke="#999" stroke-opacity="0.3" stroke-width="0.5">"##)?;
    for &(a, b) in edges {
        let (ax, ay) = at(&coords[a]);
        let (bx, by) = at(&coords[b]);
        writeln!(s, r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}"/>"#)?;
    }
    s.push_str("</g>\n");
    for (i, p) in coords.iter().enumerate() {
        let (x, y) = at(p);
        let fill = PALETTE[groups.get(i).copied().unwrap_or(0) % PALETTE.len()];
        let r = radius(sizes.get(i).copied().unwrap_or(s_lo));
        writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}" stroke="#333" stroke-width="0.3"/>"##)?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}
