//! 2-projection of the top two dimensions of a diagram.
//!
//! Slice `i` sits at `y = i`; wire `p` of a slice at `x = p + 0.5`. The
//! vertex of entry `i` sits at `y = i + 0.5`, centred over the interval it
//! consumes. A diagram of height zero is drawn as a band of unit height.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, DiagramError};
use crate::signature::Signature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wire {
    pub label: String,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub label: String,
    pub at: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub label: String,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub wires: Vec<Wire>,
    pub vertices: Vec<Vertex>,
    pub regions: Vec<Region>,
}

fn wire_count(slice: &Diagram) -> usize {
    slice.height()
}

fn wire_label(slice: &Diagram, p: usize) -> String {
    slice.generator_at(p).map(|g| g.to_string()).unwrap_or_default()
}

fn region_labels(sig: &Signature, slice: &Diagram) -> Result<Vec<String>, DiagramError> {
    if slice.dim() == 0 {
        return Ok(vec![String::new(); 2]);
    }
    Ok(slice
        .slices(sig)?
        .iter()
        .map(|s| s.point_generator().map(|g| g.to_string()).unwrap_or_default())
        .collect())
}

struct Open {
    label: String,
    points: Vec<Point>,
}

pub fn project(sig: &Signature, d: &Diagram) -> Result<Scene, DiagramError> {
    if d.dim() == 0 {
        return Err(DiagramError::NoBoundary);
    }
    let slices = d.slices(sig)?;
    let n = d.height();
    let top = if n == 0 { 1.0 } else { n as f64 };
    let mut scene = Scene { height: top, ..Scene::default() };
    scene.width = slices.iter().map(wire_count).max().unwrap_or(0) as f64;

    let mut open: Vec<Open> = (0..wire_count(&slices[0]))
        .map(|p| Open { label: wire_label(&slices[0], p), points: vec![Point { x: p as f64 + 0.5, y: 0.0 }] })
        .collect();

    for (i, entry) in d.entries().iter().enumerate() {
        let (gs, gt) = sig.boundaries(&entry.generator)?;
        let (ns, nt) = (wire_count(gs), wire_count(gt));
        let h = if d.dim() == 1 { 0 } else { entry.height() };
        let y = i as f64;
        let centre = Point { x: h as f64 + ns as f64 / 2.0, y: y + 0.5 };
        let cut = if d.dim() == 1 { 1 } else { ns };
        let produced = if d.dim() == 1 { 1 } else { nt };
        let mut consumed: Vec<Open> = open.drain(h..h + cut).collect();
        for w in &mut consumed {
            w.points.push(centre);
            scene.wires.push(Wire { label: std::mem::take(&mut w.label), points: std::mem::take(&mut w.points) });
        }
        let next = &slices[i + 1];
        let fresh: Vec<Open> = (0..produced)
            .map(|k| Open {
                label: wire_label(next, h + k),
                points: vec![centre, Point { x: (h + k) as f64 + 0.5, y: y + 1.0 }],
            })
            .collect();
        // Wires passing by take a point on every slice.
        for (p, w) in open.iter_mut().enumerate() {
            let q = if p < h { p } else { p + produced };
            w.points.push(Point { x: q as f64 + 0.5, y: y + 1.0 });
        }
        open.splice(h..h, fresh);
        scene.vertices.push(Vertex { label: entry.generator.to_string(), at: centre });
    }
    for mut w in open {
        let last = *w.points.last().expect("wires start with a point");
        if last.y < top {
            w.points.push(Point { x: last.x, y: top });
        }
        scene.wires.push(Wire { label: w.label, points: w.points });
    }

    for (i, slice) in slices.iter().enumerate() {
        let labels = region_labels(sig, slice)?;
        let y0 = (i as f64 - 0.5).max(0.0);
        let y1 = if n == 0 { top } else { (i as f64 + 0.5).min(top) };
        let k = labels.len();
        for (j, label) in labels.into_iter().enumerate() {
            let x0 = if j == 0 { 0.0 } else { j as f64 - 0.5 };
            let x1 = if j + 1 == k { scene.width.max(x0) } else { j as f64 + 0.5 };
            scene.regions.push(Region { label, x0, x1, y0, y1 });
        }
    }
    Ok(scene)
}

const SCALE: f64 = 60.0;
const MARGIN: f64 = 20.0;

fn px(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Standalone SVG; the y axis is flipped so sources are at the bottom.
pub fn scene_to_svg(s: &Scene) -> String {
    let w = s.width * SCALE + 2.0 * MARGIN;
    let h = s.height * SCALE + 2.0 * MARGIN;
    let tx = |x: f64| px(MARGIN + x * SCALE);
    let ty = |y: f64| px(MARGIN + (s.height - y) * SCALE);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        px(w),
        px(h),
        px(w),
        px(h)
    );
    for r in &s.regions {
        let _ = writeln!(
            out,
            r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#f4f4f4" fill-opacity="0.5"><title>{}</title></rect>"##,
            tx(r.x0),
            ty(r.y1),
            px((r.x1 - r.x0) * SCALE),
            px((r.y1 - r.y0) * SCALE),
            esc(&r.label)
        );
    }
    for wire in &s.wires {
        let mut d = String::new();
        for (i, p) in wire.points.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, tx(p.x), ty(p.y));
        }
        let _ = writeln!(
            out,
            r#"  <path d="{d}" fill="none" stroke="black" stroke-width="2"><title>{}</title></path>"#,
            esc(&wire.label)
        );
    }
    for v in &s.vertices {
        let _ = writeln!(
            out,
            r#"  <circle cx="{}" cy="{}" r="6" fill="black"><title>{}</title></circle>"#,
            tx(v.at.x),
            ty(v.at.y),
            esc(&v.label)
        );
        let _ = writeln!(
            out,
            r#"  <text x="{}" y="{}" font-size="12" font-family="sans-serif">{}</text>"#,
            px(MARGIN + v.at.x * SCALE + 9.0),
            ty(v.at.y),
            esc(&v.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
