//! Static SVG pictures of planar spaces.

use std::fmt::Write;

use crate::mmspace::{PointCloudSpace, VertexId};
use crate::netflow::NetGraph;

const SIZE: f64 = 600.0;
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let s = t * (RAMP.len() - 1) as f64;
    let i = (s.floor() as usize).min(RAMP.len() - 2);
    let f = s - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

struct Frame {
    lo: [f64; 2],
    scale: f64,
}

impl Frame {
    fn of(space: &PointCloudSpace) -> Option<Self> {
        if space.dim() != 2 || space.is_empty() {
            return None;
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for i in 0..space.len() {
            for k in 0..2 {
                lo[k] = lo[k].min(space.coords(i)[k]);
                hi[k] = hi[k].max(space.coords(i)[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        Some(Self { lo, scale: (SIZE - 20.0) / span })
    }

    fn at(&self, p: &[f64]) -> (f64, f64) {
        (10.0 + (p[0] - self.lo[0]) * self.scale, SIZE - 10.0 - (p[1] - self.lo[1]) * self.scale)
    }
}

fn open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <title>{title}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn cells(out: &mut String, space: &PointCloudSpace, frame: &Frame, shade: impl Fn(VertexId) -> Option<f64>) {
    let side = (space.resolution() * frame.scale).max(1.0);
    for i in 0..space.len() {
        if let Some(t) = shade(i) {
            let (cx, cy) = frame.at(space.coords(i));
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{side:.2}\" height=\"{side:.2}\" fill=\"{}\"/>",
                cx - side / 2.0,
                cy - side / 2.0,
                color(t)
            );
        }
    }
}

fn poles(out: &mut String, space: &PointCloudSpace, frame: &Frame, ids: &[VertexId]) {
    for &p in ids {
        let (cx, cy) = frame.at(space.coords(p));
        let _ = writeln!(out, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"red\" stroke=\"black\"/>");
    }
}

/// Log-scaled heatmap of positive per-vertex values. `None` unless the
/// space is planar.
pub fn heatmap(space: &PointCloudSpace, values: &[f64], marks: &[VertexId], title: &str) -> Option<String> {
    let frame = Frame::of(space)?;
    let logs: Vec<f64> = values.iter().map(|&v| if v > 0.0 { v.ln() } else { f64::NAN }).collect();
    let (lo, hi) = logs
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = open(title);
    cells(&mut out, space, &frame, |i| logs[i].is_finite().then(|| (logs[i] - lo) / span));
    poles(&mut out, space, &frame, marks);
    out.push_str("</svg>\n");
    Some(out)
}

/// Banded picture of a field: `bands` equal steps between 0 and `top`;
/// values above `top` are drawn in the last band.
pub fn contours(space: &PointCloudSpace, values: &[f64], top: f64, bands: usize, marks: &[VertexId], title: &str) -> Option<String> {
    let frame = Frame::of(space)?;
    let bands = bands.max(1) as f64;
    let mut out = open(title);
    cells(&mut out, space, &frame, |i| {
        let v = values[i];
        if !v.is_finite() {
            return None;
        }
        let b = if top > 0.0 { (v / top * bands).floor().min(bands) } else { 0.0 };
        Some(b / bands)
    });
    poles(&mut out, space, &frame, marks);
    out.push_str("</svg>\n");
    Some(out)
}

/// Net points coloured by cut side; cut edges drawn in red.
pub fn cut(space: &PointCloudSpace, net: &NetGraph, source_side: &[bool], title: &str) -> Option<String> {
    let frame = Frame::of(space)?;
    let mut out = open(title);
    for e in &net.edges {
        let (a, b) = (net.points[e.a], net.points[e.b]);
        let crossing = source_side[e.a] != source_side[e.b];
        let (x1, y1) = frame.at(space.coords(a));
        let (x2, y2) = frame.at(space.coords(b));
        let (stroke, w) = if crossing { ("red", 1.5) } else { ("#bbbbbb", 0.5) };
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"{w}\"/>"
        );
    }
    for (k, &p) in net.points.iter().enumerate() {
        let (cx, cy) = frame.at(space.coords(p));
        let fill = if source_side[k] { color(0.2) } else { color(0.9) };
        let _ = writeln!(out, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"2.5\" fill=\"{fill}\"/>");
    }
    poles(&mut out, space, &frame, &[net.points[net.source], net.points[net.sink]]);
    out.push_str("</svg>\n");
    Some(out)
}
