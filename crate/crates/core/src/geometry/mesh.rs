use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use nalgebra::{Point3, Rotation3, Vector3};

use super::{Coords, Skeleton};
use crate::error::{Error, Result};
use crate::tol;

/// Label of a mesh edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    /// Unit-length edge of a cap polygon.
    Skeleton,
    L1,
    L2,
    L3,
    L4,
    /// Synthetic edge from a cap center to a cap vertex.
    Spoke,
    /// Unlabeled edge of a fixture mesh.
    Other,
}

impl EdgeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::Skeleton => "skeleton",
            EdgeClass::L1 => "L1",
            EdgeClass::L2 => "L2",
            EdgeClass::L3 => "L3",
            EdgeClass::L4 => "L4",
            EdgeClass::Spoke => "spoke",
            EdgeClass::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "skeleton" => EdgeClass::Skeleton,
            "L1" => EdgeClass::L1,
            "L2" => EdgeClass::L2,
            "L3" => EdgeClass::L3,
            "L4" => EdgeClass::L4,
            "spoke" => EdgeClass::Spoke,
            "other" => EdgeClass::Other,
            _ => return None,
        })
    }

    /// Index `k - 1` for the belt classes `Lk`.
    pub fn belt_index(self) -> Option<usize> {
        match self {
            EdgeClass::L1 => Some(0),
            EdgeClass::L2 => Some(1),
            EdgeClass::L3 => Some(2),
            EdgeClass::L4 => Some(3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledEdge {
    pub a: usize,
    pub b: usize,
    pub class: EdgeClass,
}

/// Triangle mesh with labeled edges.
///
/// Sandglass meshes store the vertices as `A_0..A_{n-1}`, `B_0..B_{n-1}`,
/// `C_0..C_{n-1}`, `D_0..D_{n-1}` followed by the cap centers `A` and `B`;
/// see the index helpers on [`Mesh`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[usize; 3]>,
    pub edges: Vec<LabeledEdge>,
}

impl Mesh {
    /// Mesh from raw data; edges are derived from the faces and labeled
    /// [`EdgeClass::Other`].
    pub fn from_faces(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Self {
        let mut seen = HashMap::new();
        let mut edges = Vec::new();
        for f in &faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if seen.insert(key, ()).is_none() {
                    edges.push(LabeledEdge { a: key.0, b: key.1, class: EdgeClass::Other });
                }
            }
        }
        Mesh { vertices, faces, edges }
    }

    pub fn a(n: usize, i: usize) -> usize {
        i % n
    }

    pub fn b(n: usize, i: usize) -> usize {
        n + i % n
    }

    pub fn c(n: usize, i: usize) -> usize {
        2 * n + i % n
    }

    pub fn d(n: usize, i: usize) -> usize {
        3 * n + i % n
    }

    pub fn center_a(n: usize) -> usize {
        4 * n
    }

    pub fn center_b(n: usize) -> usize {
        4 * n + 1
    }

    /// Vertex positions of the symmetric sandglass with shape `x`.
    pub fn sandglass_vertices(sk: &Skeleton, x: &Coords) -> Vec<Point3<f64>> {
        let n = sk.n;
        let (rad, c, s) = (sk.radius, sk.cos, sk.sin);
        let (big_h, h, r) = (x.cap_z, x.waist_z, x.waist_r);
        let mut v = vec![Point3::origin(); 4 * n + 2];
        for i in 0..n {
            let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), TAU * i as f64 / n as f64);
            v[Self::a(n, i)] = rot * Point3::new(rad, 0.0, big_h);
            v[Self::b(n, i)] = rot * Point3::new(rad * c, rad * s, -big_h);
            v[Self::d(n, i)] = rot * Point3::new(r, 0.0, -h);
            v[Self::c(n, i + 1)] = rot * Point3::new(r * c, r * s, h);
        }
        v[Self::center_a(n)] = Point3::new(0.0, 0.0, big_h);
        v[Self::center_b(n)] = Point3::new(0.0, 0.0, -big_h);
        v
    }

    /// Closed sandglass mesh: `6n` belt triangles and `2n` cap fan triangles,
    /// wound so that the enclosed volume is non-negative.
    pub fn sandglass(sk: &Skeleton, x: &Coords) -> Self {
        let n = sk.n;
        let vertices = Self::sandglass_vertices(sk, x);
        let (ca, cb) = (Self::center_a(n), Self::center_b(n));
        let mut faces = Vec::with_capacity(8 * n);
        let mut edges = Vec::with_capacity(12 * n);
        for i in 0..n {
            let j = i + 1;
            let (ai, aj) = (Self::a(n, i), Self::a(n, j));
            let (bi, bj) = (Self::b(n, i), Self::b(n, j));
            let cj = Self::c(n, j);
            let (di, dj) = (Self::d(n, i), Self::d(n, j));
            faces.extend_from_slice(&[
                [bi, di, cj],
                [bi, cj, dj],
                [bi, dj, bj],
                [di, ai, cj],
                [ai, aj, cj],
                [cj, aj, dj],
            ]);
            let edge = |a: usize, b: usize, class| LabeledEdge { a: a.min(b), b: a.max(b), class };
            edges.extend_from_slice(&[
                edge(bi, di, EdgeClass::L1),
                edge(aj, cj, EdgeClass::L1),
                edge(bi, cj, EdgeClass::L2),
                edge(ai, di, EdgeClass::L2),
                edge(di, cj, EdgeClass::L3),
                edge(cj, dj, EdgeClass::L3),
                edge(bi, dj, EdgeClass::L4),
                edge(ai, cj, EdgeClass::L4),
                edge(ai, aj, EdgeClass::Skeleton),
                edge(bi, bj, EdgeClass::Skeleton),
                edge(ca, ai, EdgeClass::Spoke),
                edge(cb, bi, EdgeClass::Spoke),
            ]);
        }
        for i in 0..n {
            faces.push([cb, Self::b(n, i), Self::b(n, i + 1)]);
        }
        for i in 0..n {
            faces.push([ca, Self::a(n, i + 1), Self::a(n, i)]);
        }
        let mut mesh = Mesh { vertices, faces, edges };
        if signed_volume(&mesh) < 0.0 {
            mesh.flip();
        }
        mesh
    }

    /// Reverse the winding of every face.
    pub fn flip(&mut self) {
        for f in &mut self.faces {
            f.swap(1, 2);
        }
    }

    pub fn edge_length(&self, e: &LabeledEdge) -> f64 {
        (self.vertices[e.a] - self.vertices[e.b]).norm()
    }

    pub fn face_normal(&self, f: usize) -> Vector3<f64> {
        let [a, b, c] = self.faces[f];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(&(pc - pa))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_normal(f).norm()
    }

    /// Check that every edge is shared by exactly two faces with opposite
    /// directions.
    pub fn check_closed(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::NonClosedMesh(format!("edge {a}->{b} used {count} times")));
            }
            if !directed.contains_key(&(b, a)) {
                return Err(Error::NonClosedMesh(format!("edge {a}-{b} is a boundary edge")));
            }
        }
        Ok(())
    }

    /// Map from a directed edge to the face containing it.
    fn directed_edge_faces(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::with_capacity(3 * self.faces.len());
        for (fi, f) in self.faces.iter().enumerate() {
            for k in 0..3 {
                map.insert((f[k], f[(k + 1) % 3]), fi);
            }
        }
        map
    }

    fn class_of(&self, a: usize, b: usize) -> EdgeClass {
        let key = (a.min(b), a.max(b));
        self.edges
            .iter()
            .find(|e| (e.a, e.b) == key)
            .map(|e| e.class)
            .unwrap_or(EdgeClass::Other)
    }
}

fn signed_volume(mesh: &Mesh) -> f64 {
    mesh.faces
        .iter()
        .map(|&[a, b, c]| {
            let (pa, pb, pc) = (mesh.vertices[a].coords, mesh.vertices[b].coords, mesh.vertices[c].coords);
            pa.dot(&pb.cross(&pc))
        })
        .sum::<f64>()
        / 6.0
}

/// Enclosed volume by the divergence theorem; positive for outward winding.
pub fn volume(mesh: &Mesh) -> Result<f64> {
    mesh.check_closed()?;
    Ok(signed_volume(mesh))
}

/// Fold direction of an edge relative to the mesh orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fold {
    /// Inside dihedral above `pi`.
    Mountain,
    /// Inside dihedral below `pi`.
    Valley,
    Flat,
}

impl Fold {
    pub fn from_angle(theta: f64) -> Self {
        if theta > PI + tol::DIHEDRAL {
            Fold::Mountain
        } else if theta < PI - tol::DIHEDRAL {
            Fold::Valley
        } else {
            Fold::Flat
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            Fold::Mountain => Fold::Valley,
            Fold::Valley => Fold::Mountain,
            Fold::Flat => Fold::Flat,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Fold::Mountain => "mountain",
            Fold::Valley => "valley",
            Fold::Flat => "flat",
        }
    }
}

/// Dihedral of one edge, measured inside the solid, in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dihedral {
    pub a: usize,
    pub b: usize,
    pub class: EdgeClass,
    /// `None` if one of the adjacent faces is degenerate.
    pub angle: Option<f64>,
}

impl Dihedral {
    pub fn fold(&self) -> Option<Fold> {
        self.angle.map(Fold::from_angle)
    }
}

/// Inside dihedral at edge `p -> q` between the face `(p, q, a)` and the face
/// `(q, p, b)`, both wound outward.
pub(crate) fn inside_dihedral(
    p: &Point3<f64>,
    q: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
) -> Option<f64> {
    let e = q - p;
    let len = e.norm();
    if len < tol::GEOMETRY {
        return None;
    }
    let e = e / len;
    let u1 = (a - p) - e * e.dot(&(a - p));
    let u2 = (b - p) - e * e.dot(&(b - p));
    let (n1, n2) = (u1.norm(), u2.norm());
    if n1 < tol::GEOMETRY || n2 < tol::GEOMETRY {
        return None;
    }
    let (u1, u2) = (u1 / n1, u2 / n2);
    let w1 = e.cross(&u1);
    let phi = u2.dot(&w1).atan2(u2.dot(&u1));
    Some(if phi <= 0.0 { -phi } else { TAU - phi })
}

/// Inside dihedral angle of every edge shared by two faces.
pub fn dihedral_angles(mesh: &Mesh) -> Vec<Dihedral> {
    let faces = mesh.directed_edge_faces();
    let mut out = Vec::new();
    let mut keys: Vec<_> = faces.keys().copied().filter(|&(p, q)| p < q).collect();
    keys.sort_unstable();
    for (p, q) in keys {
        let (Some(&f1), Some(&f2)) = (faces.get(&(p, q)), faces.get(&(q, p))) else {
            continue;
        };
        let apex = |f: usize, x: usize, y: usize| {
            *mesh.faces[f].iter().find(|&&v| v != x && v != y).expect("triangle has a third vertex")
        };
        let a = apex(f1, p, q);
        let b = apex(f2, p, q);
        let v = &mesh.vertices;
        let degenerate = mesh.face_area(f1) < tol::GEOMETRY || mesh.face_area(f2) < tol::GEOMETRY;
        let angle = if degenerate { None } else { inside_dihedral(&v[p], &v[q], &v[a], &v[b]) };
        out.push(Dihedral { a: p, b: q, class: mesh.class_of(p, q), angle });
    }
    out
}
