//! Planar development of the belt, the developability (origami) condition
//! and crease patterns.
//!
//! The strip is laid out with `B_i* = (i, 0)`; one unit cell spans one unit
//! horizontally, so the `n` cells of the belt form a strip of width `n`
//! whose two ends are glued along `B_0 D_0 A_0`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use nalgebra::Point2;

use crate::error::{Error, Result};
use crate::geometry::{dihedral_angles, DesignSpec, EdgeClass, Fold, Mesh, Realization};
use crate::tol;

/// `Q3` that makes a sandglass with `Q1 = Q4` developable.
pub fn origami_q3(q1: f64, q2: f64) -> Result<f64> {
    let w = 4.0 * q1 - 1.0;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("W = 4 Q1 - 1 must be positive, got {w}")));
    }
    if !(q2 > 0.0) {
        return Err(Error::Domain(format!("Q2 must be positive, got {q2}")));
    }
    let q3 = q1 + q2 - (q2 * w).sqrt();
    if !(q3 > 0.0) {
        return Err(Error::Degenerate(format!("origami Q3 = {q3} is not positive")));
    }
    Ok(q3)
}

/// Strip parameters `(a, b, f)` of a belt with squared lengths `q`.
fn strip_parameters(q: [f64; 4]) -> Result<(f64, f64, f64)> {
    let [q1, q2, _, q4] = q;
    let a = (q4 - q1 - 1.0) / 2.0;
    let b2 = 2.0 * q1 + 2.0 * q4 - 1.0 - (q1 - q4).powi(2);
    let f2 = 4.0 * q2 - (q1 - q4).powi(2);
    if !(b2 > 0.0) {
        return Err(Error::Overlap(format!("b is not positive (4b^2 = {b2})")));
    }
    if !(f2 > 0.0) {
        return Err(Error::Overlap(format!("f is not positive (4f^2 = {f2})")));
    }
    Ok((a, 0.5 * b2.sqrt(), 0.5 * f2.sqrt()))
}

/// Deviation `Q3 - (1/4 + (f - b)^2)` from developability.
pub fn general_origami_residual(q: [f64; 4]) -> Result<f64> {
    let (_, b, f) = strip_parameters(q)?;
    Ok(q[2] - (0.25 + (f - b).powi(2)))
}

/// Role of a segment of the development.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    /// One of the six folds inside a unit cell.
    Interior,
    /// `B_i D_i` or `A_i D_i`, separating consecutive unit cells.
    CellBoundary,
    /// Skeleton edge on the rim of the strip.
    Rim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: Point2<f64>,
    pub to: Point2<f64>,
    pub class: EdgeClass,
    pub kind: SegmentKind,
    /// Endpoints as sandglass mesh vertex indices.
    pub mesh_edge: (usize, usize),
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.to - self.from).norm()
    }
}

/// Unrolled belt.
#[derive(Debug, Clone, PartialEq)]
pub struct Development {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub f: f64,
    /// `B_0*..B_n*`.
    pub b_row: Vec<Point2<f64>>,
    /// `D_0*..D_n*`.
    pub d_row: Vec<Point2<f64>>,
    /// `C_1*..C_n*`.
    pub c_row: Vec<Point2<f64>>,
    /// `A_0*..A_n*`.
    pub a_row: Vec<Point2<f64>>,
    pub segments: Vec<Segment>,
}

impl Development {
    /// Abscissa `a + 1/2` of `C_1*`.
    pub fn c_star(&self) -> f64 {
        self.a + 0.5
    }

    pub fn d(&self) -> f64 {
        self.f
    }

    pub fn e(&self) -> f64 {
        -self.c_star()
    }

    pub fn interior_creases(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Interior)
    }
}

/// Planar development of the belt of `spec`.
pub fn develop(spec: &DesignSpec) -> Result<Development> {
    let n = spec.n();
    let (a, b, f) = strip_parameters(spec.q())?;
    let b_row: Vec<_> = (0..=n).map(|i| Point2::new(i as f64, 0.0)).collect();
    let d_row: Vec<_> = (0..=n).map(|i| Point2::new(a + i as f64, b)).collect();
    let c_row: Vec<_> = (0..n).map(|i| Point2::new(a + 0.5 + i as f64, f)).collect();
    let a_row: Vec<_> = (0..=n).map(|i| Point2::new(i as f64 - 0.5, b + f)).collect();

    let mut segments = Vec::with_capacity(10 * n + 2);
    let seg = |p: Point2<f64>, q: Point2<f64>, class, kind, e: (usize, usize)| Segment {
        from: p,
        to: q,
        class,
        kind,
        mesh_edge: e,
    };
    use EdgeClass::*;
    use SegmentKind::*;
    for i in 0..=n {
        segments.push(seg(b_row[i], d_row[i], L1, CellBoundary, (Mesh::b(n, i), Mesh::d(n, i))));
        segments.push(seg(a_row[i], d_row[i], L2, CellBoundary, (Mesh::a(n, i), Mesh::d(n, i))));
    }
    for i in 0..n {
        let j = i + 1;
        let (bi, bj, di, dj, ci, ai, aj) =
            (b_row[i], b_row[j], d_row[i], d_row[j], c_row[i], a_row[i], a_row[j]);
        let (mbi, mbj, mdi, mdj, mc, mai, maj) = (
            Mesh::b(n, i),
            Mesh::b(n, j),
            Mesh::d(n, i),
            Mesh::d(n, j),
            Mesh::c(n, j),
            Mesh::a(n, i),
            Mesh::a(n, j),
        );
        segments.extend_from_slice(&[
            seg(bi, ci, L2, Interior, (mbi, mc)),
            seg(di, ci, L3, Interior, (mdi, mc)),
            seg(ci, dj, L3, Interior, (mc, mdj)),
            seg(bi, dj, L4, Interior, (mbi, mdj)),
            seg(ai, ci, L4, Interior, (mai, mc)),
            seg(aj, ci, L1, Interior, (maj, mc)),
            seg(bi, bj, Skeleton, Rim, (mbi, mbj)),
            seg(ai, aj, Skeleton, Rim, (mai, maj)),
        ]);
    }
    Ok(Development { n, a, b, f, b_row, d_row, c_row, a_row, segments })
}

/// Sum of the face angles at a vertex, from the squared lengths
/// `(adjacent, adjacent, opposite)` of each incident triangle.
fn angle_sum(triangles: &[[f64; 3]]) -> Result<f64> {
    let mut sum = 0.0;
    for &[p, q, o] in triangles {
        let (lp, lq, lo) = (p.sqrt(), q.sqrt(), o.sqrt());
        if lp + lq <= lo || lp + lo <= lq || lq + lo <= lp {
            return Err(Error::Degenerate(format!(
                "triangle with squared sides ({p}, {q}, {o}) is degenerate"
            )));
        }
        sum += ((p + q - o) / (2.0 * lp * lq)).clamp(-1.0, 1.0).acos();
    }
    Ok(sum)
}

/// Angle defects `2 pi - (sum of incident face angles)` at a `D`- and a
/// `C`-vertex, computed from the intrinsic edge lengths alone.
pub fn angle_defect(spec: &DesignSpec) -> Result<(f64, f64)> {
    let [q1, q2, q3, q4] = spec.q();
    let at_d = angle_sum(&[
        [q1, q3, q2], // B_i D_i C_{i+1}
        [q2, q3, q4], // D_i A_i C_{i+1}
        [q4, q3, q2], // B_{i-1} C_i D_i
        [q4, q1, 1.0], // B_{i-1} D_i B_i
        [q3, q2, q1], // C_i A_i D_i
    ])?;
    let at_c = angle_sum(&[
        [q2, q3, q1], // B_i D_i C_{i+1}
        [q2, q3, q4], // B_i C_{i+1} D_{i+1}
        [q3, q4, q2], // D_i A_i C_{i+1}
        [q4, q1, 1.0], // A_i A_{i+1} C_{i+1}
        [q1, q3, q2], // C_{i+1} A_{i+1} D_{i+1}
    ])?;
    Ok((TAU - at_d, TAU - at_c))
}

/// Fold labels of the belt edges of `real`, relative to the face of the
/// development that is drawn facing up. Edges that are (nearly) flat or
/// folded flat in `real` take their label from `approach` when given, e.g. a
/// neighbouring configuration on a path into `real`.
pub fn fold_assignment(
    real: &Realization,
    approach: Option<&Realization>,
) -> Result<HashMap<(usize, usize), Fold>> {
    let dev = develop(&real.spec)?;
    let reference = folds_of(real, &dev);
    let fallback = approach.map(|ap| folds_of(ap, &dev));
    let mut out = HashMap::new();
    for (edge, (fold, ambiguous)) in &reference {
        let fold = match (&fallback, ambiguous) {
            (Some(fb), true) => fb.get(edge).map_or(*fold, |(f, _)| *f),
            _ => *fold,
        };
        out.insert(*edge, fold);
    }
    Ok(out)
}

fn folds_of(real: &Realization, dev: &Development) -> HashMap<(usize, usize), (Fold, bool)> {
    let n = dev.n;
    let mesh = real.mesh();
    // does the development, seen from above, show the outside of the solid?
    let (b0, d0, c1) = (Mesh::b(n, 0), Mesh::d(n, 0), Mesh::c(n, 1));
    let face = mesh
        .faces
        .iter()
        .find(|f| f.contains(&b0) && f.contains(&d0) && f.contains(&c1))
        .expect("belt face B0 D0 C1");
    let stored_forward = (0..3).any(|k| face[k] == b0 && face[(k + 1) % 3] == d0);
    let (p, q, r) = (dev.b_row[0], dev.d_row[0], dev.c_row[0]);
    let dev_ccw = (q - p).perp(&(r - p)) > 0.0;
    let outside_up = stored_forward == dev_ccw;

    let mut out = HashMap::new();
    for dh in dihedral_angles(&mesh) {
        let Some(theta) = dh.angle else { continue };
        let fold = Fold::from_angle(theta);
        let fold = if outside_up { fold } else { fold.swapped() };
        let near = |x: f64| (theta - x).abs() < tol::DIHEDRAL;
        let ambiguous = near(0.0) || near(PI) || near(TAU);
        out.insert((dh.a.min(dh.b), dh.a.max(dh.b)), (fold, ambiguous));
    }
    out
}

/// Styling of crease-pattern drawings.
#[derive(Debug, Clone, PartialEq)]
pub struct CreaseStyle {
    /// SVG user units per skeleton edge.
    pub scale: f64,
    pub margin: f64,
    pub stroke_width: f64,
    pub dash: &'static str,
    /// Draw the two cap polygons; `None` draws them for `n > 3` only.
    pub caps: Option<bool>,
}

impl Default for CreaseStyle {
    fn default() -> Self {
        CreaseStyle { scale: 100.0, margin: 20.0, stroke_width: 1.5, dash: "6,3", caps: None }
    }
}

/// Vertices of the regular unit-side polygon erected on `p -> q`, on the
/// side opposite to `away`.
fn cap_polygon(n: usize, p: Point2<f64>, q: Point2<f64>, away: Point2<f64>) -> Vec<Point2<f64>> {
    let e = q - p;
    let mut normal = nalgebra::Vector2::new(-e.y, e.x);
    if normal.dot(&(away - p)) > 0.0 {
        normal = -normal;
    }
    let ext = TAU / n as f64;
    let mut dir = e.normalize();
    // turn towards the chosen side at every corner
    let sign = if nalgebra::Vector2::new(-dir.y, dir.x).dot(&normal) > 0.0 { 1.0 } else { -1.0 };
    let mut pts = vec![p, q];
    let mut cur = q;
    for _ in 2..n {
        let (s, c) = (sign * ext).sin_cos();
        dir = nalgebra::Vector2::new(c * dir.x - s * dir.y, s * dir.x + c * dir.y);
        cur += dir;
        pts.push(cur);
    }
    pts
}

/// SVG drawing of the development with interior creases labeled by the
/// fold direction in `real` (solid mountain, dashed valley).
pub fn crease_pattern(
    real: &Realization,
    approach: Option<&Realization>,
    style: &CreaseStyle,
) -> Result<String> {
    let dev = develop(&real.spec)?;
    let folds = fold_assignment(real, approach)?;
    let n = dev.n;
    let caps = style.caps.unwrap_or(n > 3);

    let mut outlines: Vec<Vec<Point2<f64>>> = Vec::new();
    if caps {
        outlines.push(cap_polygon(n, dev.b_row[0], dev.b_row[1], dev.d_row[0]));
        outlines.push(cap_polygon(n, dev.a_row[0], dev.a_row[1], dev.d_row[0]));
    }
    let mut pts: Vec<Point2<f64>> =
        dev.segments.iter().flat_map(|s| [s.from, s.to]).collect();
    pts.extend(outlines.iter().flatten());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let (k, m) = (style.scale, style.margin);
    let map = |p: &Point2<f64>| ((p.x - x0) * k + m, (y1 - p.y) * k + m);
    let width = (x1 - x0) * k + 2.0 * m;
    let height = (y1 - y0) * k + 2.0 * m;

    let spec = real.spec;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        "<!-- sandglass {} crease pattern n={} Q1={:e} Q2={:e} Q3={:e} Q4={:e} H={:e} h={:e} r={:e} -->",
        env!("CARGO_PKG_VERSION"),
        n,
        spec.q1(),
        spec.q2(),
        spec.q3(),
        spec.q4(),
        real.coords.cap_z,
        real.coords.waist_z,
        real.coords.waist_r
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(
        svg,
        r#"<g fill="none" stroke="black" stroke-width="{}" stroke-linecap="round">"#,
        style.stroke_width
    );
    for poly in &outlines {
        let path: Vec<String> = poly
            .iter()
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(svg, r#"<polygon class="cap" points="{}"/>"#, path.join(" "));
    }
    for s in &dev.segments {
        let (xa, ya) = map(&s.from);
        let (xb, yb) = map(&s.to);
        let key = (s.mesh_edge.0.min(s.mesh_edge.1), s.mesh_edge.0.max(s.mesh_edge.1));
        let (class, dash) = match s.kind {
            SegmentKind::Interior => {
                let fold = folds.get(&key).copied().unwrap_or(Fold::Flat);
                let dash = match fold {
                    Fold::Valley => format!(r#" stroke-dasharray="{}""#, style.dash),
                    _ => String::new(),
                };
                (format!("crease {} {}", s.class.as_str(), fold.as_str()), dash)
            }
            SegmentKind::CellBoundary => {
                (format!("cell-boundary {}", s.class.as_str()), String::new())
            }
            SegmentKind::Rim => ("rim skeleton".to_string(), String::new()),
        };
        let _ = writeln!(
            svg,
            r#"<line class="{class}" x1="{xa:.3}" y1="{ya:.3}" x2="{xb:.3}" y2="{yb:.3}"{dash}/>"#
        );
    }
    let _ = writeln!(svg, "</g>\n</svg>");
    Ok(svg)
}
