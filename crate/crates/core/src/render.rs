//! SVG rendering of a laid-out MDT in the Poincaré disk.
//!
//! Fixed 1000×1000 viewport, disk of radius 480 px centred at (500, 500).
//! Node markers have radius 6 px; labels use 11 px sans-serif text.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::boosting::Leverage;
use crate::geometry::{embed_t_radius, isoline_radius, GeometryError, MAX_RADIUS};
use crate::layout::DiskLayout;
use crate::mdt::MonotonicDecisionTree;
use crate::tempered::Temper;

pub const VIEWPORT: f64 = 1000.0;
pub const DISK_RADIUS_PX: f64 = 480.0;
pub const NEGATIVE_COLOR: &str = "#cc0000";
pub const POSITIVE_COLOR: &str = "#007700";
const NEUTRAL_COLOR: &str = "#777777";
const CENTER: f64 = VIEWPORT / 2.0;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("layout has {0} points but the MDT has {1} nodes")]
    InconsistentIds(usize, usize),
    #[error("requested t = {requested} but the layout was computed at t = {layout}")]
    TemperMismatch { requested: f64, layout: f64 },
    #[error("isoline posterior {0} outside [0, 1]")]
    InvalidIsoline(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// What the renderer left out or had to adjust.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderReport {
    /// Isolines with radius 0 (p = 1/2), not drawn.
    pub omitted_isolines: Vec<f64>,
}

/// `<stem>_tree<j>_t<t>.svg`
pub fn svg_file_name(stem: &str, tree: usize, t: Temper) -> String {
    format!("{stem}_tree{tree}_t{t}.svg")
}

fn px(z: Complex64) -> (f64, f64) {
    (
        CENTER + DISK_RADIUS_PX * z.re,
        CENTER - DISK_RADIUS_PX * z.im,
    )
}

fn circumcenter(a: Complex64, b: Complex64, c: Complex64) -> Option<Complex64> {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() < 1e-300 {
        return None;
    }
    let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    Some(Complex64::new(
        (a2 * (b.im - c.im) + b2 * (c.im - a.im) + c2 * (a.im - b.im)) / d,
        (a2 * (c.re - b.re) + b2 * (a.re - c.re) + c2 * (b.re - a.re)) / d,
    ))
}

/// SVG path data for the Poincaré geodesic segment from `p` to `q`: an arc of
/// the circle through `p`, `q` orthogonal to the unit circle, or a straight
/// chord when `p`, `q` and the origin are collinear.
pub fn geodesic_path(p: Complex64, q: Complex64) -> String {
    let (x0, y0) = px(p);
    let (x1, y1) = px(q);
    let cross = p.re * q.im - p.im * q.re;
    let scale = p.norm().max(q.norm()).max(1e-12);
    let anchor = if p.norm() >= q.norm() { p } else { q };
    let center = (cross.abs() > 1e-9 * scale)
        .then(|| circumcenter(p, q, anchor / anchor.norm_sqr()))
        .flatten();
    match center {
        None => format!("M {x0:.9} {y0:.9} L {x1:.9} {y1:.9}"),
        Some(c) => {
            let radius = (p - c).norm() * DISK_RADIUS_PX;
            // SVG's y axis points down, so a clockwise turn in disk
            // coordinates is the positive-angle sweep.
            let turn = (p - c).re * (q - c).im - (p - c).im * (q - c).re;
            let sweep = u8::from(turn < 0.0);
            format!("M {x0:.9} {y0:.9} A {radius:.9} {radius:.9} 0 0 {sweep} {x1:.9} {y1:.9}")
        }
    }
}

fn color(prediction: f64) -> &'static str {
    if prediction > 0.0 {
        POSITIVE_COLOR
    } else if prediction < 0.0 {
        NEGATIVE_COLOR
    } else {
        NEUTRAL_COLOR
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders to a string. `t` must equal the layout's temper.
pub fn svg_string(
    layout: &DiskLayout,
    mdt: &MonotonicDecisionTree,
    leverage: Option<&Leverage>,
    isolines: &[f64],
    t: Temper,
) -> Result<(String, RenderReport), RenderError> {
    if layout.points.len() != mdt.len() {
        return Err(RenderError::InconsistentIds(layout.points.len(), mdt.len()));
    }
    if (t.value() - layout.t.value()).abs() > 1e-12 {
        return Err(RenderError::TemperMismatch {
            requested: t.value(),
            layout: layout.t.value(),
        });
    }
    let mut report = RenderReport::default();
    let mut out = String::new();
    let w = VIEWPORT;
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{w}" viewBox="0 0 {w} {w}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{w}" height="{w}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<circle class="boundary" cx="{CENTER}" cy="{CENTER}" r="{DISK_RADIUS_PX}" fill="none" stroke="black" stroke-width="2"/>"#
    );

    let mut radii = Vec::new();
    for &p in isolines {
        if !(0.0..=1.0).contains(&p) {
            return Err(RenderError::InvalidIsoline(p));
        }
        let r = isoline_radius(p, t)?;
        if r == 0.0 {
            report.omitted_isolines.push(p);
        } else {
            radii.push((p, r));
        }
    }
    let outer = radii.iter().map(|x| x.1).fold(0.0, f64::max);
    let _ = writeln!(
        out,
        r##"<g class="isolines" fill="none" stroke="#999999" stroke-dasharray="4 3">"##
    );
    for &(p, r) in &radii {
        let sw = if r == outer { 2.5 } else { 0.8 };
        let _ = writeln!(
            out,
            r#"<circle class="isoline" data-p="{p}" data-radius="{r}" cx="{CENTER}" cy="{CENTER}" r="{:.9}" stroke-width="{sw}"/>"#,
            r * DISK_RADIUS_PX
        );
    }
    let _ = writeln!(out, "</g>");
    for &(p, r) in &radii {
        let (x, y) = (CENTER + 4.0, CENTER - r * DISK_RADIUS_PX - 3.0);
        let _ = writeln!(
            out,
            r##"<text x="{x:.3}" y="{y:.3}" font-family="sans-serif" font-size="9" fill="#777777">p={p}</text>"##
        );
    }

    if let Some(lev) = leverage {
        let _ = writeln!(
            out,
            r##"<g class="leverage" fill="none" stroke="#1f4fbf" stroke-dasharray="8 4">"##
        );
        for (name, kappa) in [("kappa", lev.kappa), ("kappa_star", lev.kappa_star)] {
            let r1 = (0.5 * kappa).tanh().min(MAX_RADIUS);
            let r = embed_t_radius(r1, t)?.radius;
            let _ = writeln!(
                out,
                r#"<circle class="{name}" data-kappa="{kappa}" cx="{CENTER}" cy="{CENTER}" r="{:.9}" stroke-width="1.2"/>"#,
                r * DISK_RADIUS_PX
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r##"<g class="arcs" fill="none" stroke="#333333">"##);
    for arc in mdt.arcs() {
        let d = geodesic_path(
            layout.points[arc.head].complex(),
            layout.points[arc.tail].complex(),
        );
        let _ = writeln!(
            out,
            r#"<path d="{d}" stroke-width="{}"/>"#,
            1.5 * arc.width as f64
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r#"<g class="nodes" font-family="sans-serif" font-size="11">"#
    );
    for (node, z) in mdt.nodes().iter().zip(&layout.points) {
        let (x, y) = px(z.complex());
        let c = color(node.prediction);
        let tags = node
            .tags
            .iter()
            .map(|t| format!("#{}", t.leaf))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            r#"<circle class="node" data-id="{}" cx="{x:.9}" cy="{y:.9}" r="6" fill="{c}"><title>node {} (DT #{}) {}</title></circle>"#,
            node.id,
            node.id,
            node.source,
            escape(&tags)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" fill="{c}">{:+.2}</text>"#,
            x + 8.0,
            y - 8.0,
            node.prediction
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text class="caption" x="{CENTER}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="16">ρ = {:.4}   t = {}</text>"#,
        VIEWPORT - 6.0,
        layout.rho,
        layout.t
    );
    let _ = writeln!(out, "</svg>");
    Ok((out, report))
}

/// Writes the SVG produced by [`svg_string`] to `path`.
pub fn render_svg(
    layout: &DiskLayout,
    mdt: &MonotonicDecisionTree,
    leverage: Option<&Leverage>,
    isolines: &[f64],
    t: Temper,
    path: impl AsRef<Path>,
) -> Result<RenderReport, RenderError> {
    let (svg, report) = svg_string(layout, mdt, leverage, isolines, t)?;
    let path = path.as_ref();
    std::fs::write(path, svg).map_err(|source| RenderError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(report)
}
