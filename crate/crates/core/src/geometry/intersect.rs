//! Pairwise triangle contact tests.
//!
//! Two faces are reported when their intersection extends beyond the
//! simplex they share, by more than `eps`. A contact where one face stays on
//! one closed side of the other's plane (including coplanar overlap) is
//! [`ContactKind::Touching`]; one where each face passes through the other's
//! plane is [`ContactKind::Crossing`].

use nalgebra::{Point3, Vector2, Vector3};

use super::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContactKind {
    Touching,
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub faces: (usize, usize),
    pub kind: ContactKind,
    /// Overlap length on the common line, or overlap area for coplanar faces.
    pub extent: f64,
}

struct Tri {
    p: [Point3<f64>; 3],
    normal: Vector3<f64>,
}

impl Tri {
    fn new(mesh: &Mesh, f: usize) -> Option<Self> {
        let idx = mesh.faces[f];
        let p = idx.map(|i| mesh.vertices[i]);
        let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let len = n.norm();
        let scale = (p[1] - p[0]).norm().max((p[2] - p[0]).norm()).max(1e-300);
        (len > 1e-14 * scale * scale).then(|| Tri { p, normal: n / len })
    }

    fn signed_distances(&self, plane: &Tri, eps: f64) -> [f64; 3] {
        self.p.map(|q| {
            let d = plane.normal.dot(&(q - plane.p[0]));
            if d.abs() <= eps {
                0.0
            } else {
                d
            }
        })
    }

    /// Parameter interval of `self ∩ plane` along `dir`.
    fn interval(&self, d: &[f64; 3], dir: &Vector3<f64>) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut push = |q: Point3<f64>| {
            let t = dir.dot(&q.coords);
            lo = lo.min(t);
            hi = hi.max(t);
        };
        for k in 0..3 {
            let (a, b) = (k, (k + 1) % 3);
            if d[a] == 0.0 {
                push(self.p[a]);
            }
            if d[a] * d[b] < 0.0 {
                let s = d[a] / (d[a] - d[b]);
                push(self.p[a] + (self.p[b] - self.p[a]) * s);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    fn max_edge(&self) -> f64 {
        (0..3).map(|k| (self.p[(k + 1) % 3] - self.p[k]).norm()).fold(0.0, f64::max)
    }
}

fn straddles(d: &[f64; 3]) -> bool {
    d.iter().any(|&x| x > 0.0) && d.iter().any(|&x| x < 0.0)
}

fn one_side(d: &[f64; 3]) -> bool {
    d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0)
}

/// All pairs of faces whose intersection extends beyond their shared
/// simplex by more than `eps`.
pub fn self_intersections(mesh: &Mesh, eps: f64) -> Vec<Contact> {
    let eps = eps.max(0.0);
    let tris: Vec<Option<Tri>> = (0..mesh.faces.len()).map(|f| Tri::new(mesh, f)).collect();
    let mut out = Vec::new();
    for i in 0..mesh.faces.len() {
        let Some(t1) = &tris[i] else { continue };
        for j in (i + 1)..mesh.faces.len() {
            let Some(t2) = &tris[j] else { continue };
            let shared = mesh.faces[i].iter().filter(|v| mesh.faces[j].contains(v)).count();
            if shared == 3 {
                continue;
            }
            if let Some((kind, extent)) = contact(t1, t2, shared, eps) {
                out.push(Contact { faces: (i, j), kind, extent });
            }
        }
    }
    out
}

fn contact(t1: &Tri, t2: &Tri, shared: usize, eps: f64) -> Option<(ContactKind, f64)> {
    let d1 = t1.signed_distances(t2, eps);
    let d2 = t2.signed_distances(t1, eps);
    if one_side(&d1) || one_side(&d2) {
        return None;
    }
    if d1.iter().all(|&x| x == 0.0) && d2.iter().all(|&x| x == 0.0) {
        let area = coplanar_overlap_area(t1, t2);
        let threshold = eps * t1.max_edge().max(t2.max_edge());
        return (area > threshold).then_some((ContactKind::Touching, area));
    }
    if shared == 2 {
        // non-coplanar faces sharing an edge meet only along that edge
        return None;
    }
    let dir = t1.normal.cross(&t2.normal);
    if dir.norm() < 1e-12 {
        return None;
    }
    let dir = dir.normalize();
    let (lo1, hi1) = t1.interval(&d1, &dir)?;
    let (lo2, hi2) = t2.interval(&d2, &dir)?;
    let extent = hi1.min(hi2) - lo1.max(lo2);
    if extent <= eps {
        return None;
    }
    let kind = if straddles(&d1) && straddles(&d2) {
        ContactKind::Crossing
    } else {
        ContactKind::Touching
    };
    Some((kind, extent))
}

fn coplanar_overlap_area(t1: &Tri, t2: &Tri) -> f64 {
    let n = t1.normal;
    let drop = if n.x.abs() >= n.y.abs() && n.x.abs() >= n.z.abs() {
        0
    } else if n.y.abs() >= n.z.abs() {
        1
    } else {
        2
    };
    let project = |p: &Point3<f64>| match drop {
        0 => Vector2::new(p.y, p.z),
        1 => Vector2::new(p.z, p.x),
        _ => Vector2::new(p.x, p.y),
    };
    let subject: Vec<Vector2<f64>> = t1.p.iter().map(project).collect();
    let mut clip: Vec<Vector2<f64>> = t2.p.iter().map(project).collect();
    if polygon_area(&clip) < 0.0 {
        clip.reverse();
    }
    let poly = clip_convex(subject, &clip);
    // scale back from the projection plane
    polygon_area(&poly).abs() / n[drop].abs()
}

fn polygon_area(p: &[Vector2<f64>]) -> f64 {
    if p.len() < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for k in 0..p.len() {
        let (u, v) = (p[k], p[(k + 1) % p.len()]);
        a += u.x * v.y - u.y * v.x;
    }
    0.5 * a
}

/// Sutherland-Hodgman clipping against a counter-clockwise convex polygon.
fn clip_convex(mut poly: Vec<Vector2<f64>>, clip: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    for k in 0..clip.len() {
        if poly.is_empty() {
            break;
        }
        let (a, b) = (clip[k], clip[(k + 1) % clip.len()]);
        let side = |p: &Vector2<f64>| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        let input = std::mem::take(&mut poly);
        for m in 0..input.len() {
            let (cur, next) = (input[m], input[(m + 1) % input.len()]);
            let (sc, sn) = (side(&cur), side(&next));
            if sc >= 0.0 {
                poly.push(cur);
            }
            if (sc >= 0.0) != (sn >= 0.0) {
                let t = sc / (sc - sn);
                poly.push(cur + (next - cur) * t);
            }
        }
    }
    poly
}
