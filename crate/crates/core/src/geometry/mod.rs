//! Design data, the symmetric vertex model and metric queries.
//!
//! A sandglass consists of two regular unit-sided `n`-gons, the bottom cap
//! `A_0..A_{n-1}` at height `+H` and the top cap `B_0..B_{n-1}` at height
//! `-H` (twisted by `pi/n`), joined by a triangulated belt through the waist
//! rings `C_i` (height `+h`) and `D_i` (height `-h`) of signed radius `r`.
//! Every symmetric realization is described by the three numbers
//! `(H, h, r)`, see [`Coords`].

mod intersect;
mod mesh;

pub use intersect::{self_intersections, Contact, ContactKind};
pub use mesh::{dihedral_angles, volume, Dihedral, EdgeClass, Fold, LabeledEdge, Mesh};

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::tol;

/// Trigonometric constants of the antiprismatic skeleton of order `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Skeleton {
    pub n: usize,
    /// `cos(pi/n)`
    pub cos: f64,
    /// `sin(pi/n)`
    pub sin: f64,
    /// Circumradius of the unit-sided cap polygons, `1/(2 sin(pi/n))`.
    pub radius: f64,
}

impl Skeleton {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSpec(format!("n must be at least 3, got {n}")));
        }
        let angle = PI / n as f64;
        let (sin, cos) = angle.sin_cos();
        Ok(Skeleton { n, cos, sin, radius: 0.5 / sin })
    }
}

/// Intrinsic design data: the order `n` and the squared belt edge lengths.
///
/// `q[0]..q[3]` hold `Q1..Q4`. The skeleton edges have unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec {
    skeleton: Skeleton,
    q: [f64; 4],
    origami: bool,
}

impl DesignSpec {
    /// General design, no sandglass or developability assumption.
    pub fn new(n: usize, q: [f64; 4]) -> Result<Self> {
        let skeleton = Skeleton::new(n)?;
        for (i, &qi) in q.iter().enumerate() {
            if !(qi.is_finite() && qi > 0.0) {
                return Err(Error::InvalidSpec(format!("Q{} must be positive, got {qi}", i + 1)));
            }
        }
        Ok(DesignSpec { skeleton, q, origami: false })
    }

    /// Sandglass design, `Q4 = Q1`.
    pub fn sandglass(n: usize, q1: f64, q2: f64, q3: f64) -> Result<Self> {
        Self::new(n, [q1, q2, q3, q1])
    }

    /// Origami-valid sandglass: `Q3` follows from the developability condition.
    pub fn origami(n: usize, q1: f64, q2: f64) -> Result<Self> {
        let q3 = crate::origami::origami_q3(q1, q2)?;
        let mut spec = Self::sandglass(n, q1, q2, q3)?;
        spec.origami = true;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.skeleton.n
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn q(&self) -> [f64; 4] {
        self.q
    }

    pub fn q1(&self) -> f64 {
        self.q[0]
    }

    pub fn q2(&self) -> f64 {
        self.q[1]
    }

    pub fn q3(&self) -> f64 {
        self.q[2]
    }

    pub fn q4(&self) -> f64 {
        self.q[3]
    }

    /// The three squared lengths entering the symmetric realization problem.
    pub fn q123(&self) -> [f64; 3] {
        [self.q[0], self.q[1], self.q[2]]
    }

    /// Edge lengths `L1..L4`.
    pub fn lengths(&self) -> [f64; 4] {
        self.q.map(f64::sqrt)
    }

    /// `W = 4 Q1 - 1`.
    pub fn w(&self) -> f64 {
        4.0 * self.q[0] - 1.0
    }

    pub fn is_sandglass(&self) -> bool {
        self.q[0] == self.q[3]
    }

    pub fn is_origami(&self) -> bool {
        self.origami
    }
}

/// Shape coordinates of a symmetric embedding.
///
/// `cap_z` is `H` (the caps sit at `z = +H` and `z = -H`), `waist_z` is `h`
/// and `waist_r` the signed radial coordinate `r` of the waist vertices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coords {
    pub cap_z: f64,
    pub waist_z: f64,
    pub waist_r: f64,
}

impl Coords {
    pub fn new(cap_z: f64, waist_z: f64, waist_r: f64) -> Self {
        Coords { cap_z, waist_z, waist_r }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.cap_z, self.waist_z, self.waist_r)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Coords::new(v[0], v[1], v[2])
    }

    /// The reflection `z -> -z`, which describes the same shape.
    pub fn mirror(self) -> Self {
        Coords::new(-self.cap_z, -self.waist_z, self.waist_r)
    }

    /// Representative with `H >= 0` (and `h >= 0` when `H = 0`).
    pub fn canonical(self) -> Self {
        if self.cap_z < 0.0 || (self.cap_z == 0.0 && self.waist_z < 0.0) {
            self.mirror()
        } else {
            self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.cap_z.is_finite() && self.waist_z.is_finite() && self.waist_r.is_finite()
    }

    pub fn distance(&self, other: &Coords) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }
}

/// One symmetric embedding of a design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    pub spec: DesignSpec,
    pub coords: Coords,
}

impl Realization {
    pub fn new(spec: DesignSpec, coords: Coords) -> Self {
        Realization { spec, coords }
    }

    pub fn mirror(&self) -> Self {
        Realization::new(self.spec, self.coords.mirror())
    }

    pub fn squared_edge_lengths(&self) -> [f64; 3] {
        squared_edge_lengths(self.spec.skeleton(), &self.coords)
    }

    /// Residuals `q_k = Q_k - S_k` of the realization equations.
    pub fn residuals(&self) -> [f64; 3] {
        let s = self.squared_edge_lengths();
        let q = self.spec.q123();
        [q[0] - s[0], q[1] - s[1], q[2] - s[2]]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::sandglass(self.spec.skeleton(), &self.coords)
    }
}

/// Squared lengths `(S1, S2, S3)` of the edges `B0D0`, `B0C1` and `D0C1`.
pub fn squared_edge_lengths(sk: &Skeleton, x: &Coords) -> [f64; 3] {
    let (big_h, h, r) = (x.cap_z, x.waist_z, x.waist_r);
    let (c, rad) = (sk.cos, sk.radius);
    [
        rad * rad + r * r - 2.0 * rad * r * c + (big_h - h).powi(2),
        (rad - r).powi(2) + (big_h + h).powi(2),
        2.0 * r * r * (1.0 - c) + 4.0 * h * h,
    ]
}

/// Jacobian of [`squared_edge_lengths`] with respect to `(H, h, r)`; row `k`
/// is the gradient of `S_{k+1}`.
pub fn squared_edge_length_jacobian(sk: &Skeleton, x: &Coords) -> Matrix3<f64> {
    let (big_h, h, r) = (x.cap_z, x.waist_z, x.waist_r);
    let (c, rad) = (sk.cos, sk.radius);
    Matrix3::new(
        2.0 * (big_h - h),
        -2.0 * (big_h - h),
        2.0 * r - 2.0 * rad * c,
        2.0 * (big_h + h),
        2.0 * (big_h + h),
        -2.0 * (rad - r),
        0.0,
        8.0 * h,
        4.0 * r * (1.0 - c),
    )
}

/// Hessians of `S1`, `S2`, `S3` with respect to `(H, h, r)`. They are constant.
pub fn squared_edge_length_hessians(sk: &Skeleton) -> [Matrix3<f64>; 3] {
    [
        Matrix3::new(2.0, -2.0, 0.0, -2.0, 2.0, 0.0, 0.0, 0.0, 2.0),
        Matrix3::new(2.0, 2.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 2.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 8.0, 0.0, 0.0, 0.0, 4.0 * (1.0 - sk.cos)),
    ]
}

/// Degrees of freedom `6(n+1) - 8n` of the unconstrained belt.
pub fn dof_count(n: usize) -> i64 {
    let n = n as i64;
    6 * (n + 1) - 8 * n
}

/// Whether the symmetric realization problem is at a singular point, judged
/// by the determinant of the normalized Jacobian.
pub fn jacobian_is_singular(sk: &Skeleton, x: &Coords) -> bool {
    let mut j = squared_edge_length_jacobian(sk, x);
    for mut row in j.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    j.determinant().abs() < tol::RANK
}
