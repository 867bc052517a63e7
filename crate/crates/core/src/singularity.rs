//! Shaky (infinitesimally flexible) designs: the closed-form shakiness
//! condition on the origami surface, rigidity matrices, and the symmetric
//! infinitesimal flex.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Matrix4, Rotation3, SMatrix, Vector2, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::geometry::{
    squared_edge_length_jacobian, squared_edge_lengths, Coords, DesignSpec, Mesh, Realization,
    Skeleton,
};
use crate::origami::origami_q3;
use crate::realize::{polish, RQuartic};
use crate::tol;

/// Coefficients `w_0..w_4` of the shakiness condition
/// `w_4 c^4 + w_3 c^3 + w_2 c^2 + w_1 c + w_0 = 0`, where `c = cos(pi/n)`,
/// for origami sandglasses with squared lengths `Q1`, `Q2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShakinessCondition {
    pub q1: f64,
    pub q2: f64,
    /// `w_0..w_4`.
    pub w: [f64; 5],
}

impl ShakinessCondition {
    pub fn new(q1: f64, q2: f64) -> Result<Self> {
        let w = 4.0 * q1 - 1.0;
        if !(w > 0.0) {
            return Err(Error::Domain(format!("W = 4 Q1 - 1 must be positive, got {w}")));
        }
        if !(q2 > 0.0) {
            return Err(Error::Domain(format!("Q2 must be positive, got {q2}")));
        }
        let sw = w.sqrt();
        let sq = q2.sqrt();
        let p = |e: f64| q2.powf(e);
        let w4 = 128.0 * q1 * q1 * q2 * q2;
        let w3 = ((64.0 - 96.0 * q1) * p(2.5) - 96.0 * q1 * q1 * p(1.5)) * sw
            + 64.0 * q1 * (2.0 * q1 - 1.0) * q2 * q2;
        let w2 = 96.0
            * (q1.powi(3) + (2.0 * q2 + 5.0 / 16.0) * q1 * q1 + (q2 * q2 - 23.0 * q2 / 8.0) * q1
                - 13.0 * q2 * q2 / 48.0
                + q2 / 2.0)
            * q2
            - 48.0 * sw * q1 * (2.0 * q1 - 1.0) * p(1.5)
            - 24.0 * w.powf(1.5) * p(2.5);
        let w1 = 96.0
            * (q1.powi(3) + (2.0 * q2 - 0.75) * q1 * q1 + (q2 * q2 - q2 - 5.0 / 32.0) * q1
                - q2 * q2 / 4.0
                + 7.0 * q2 / 32.0)
            * q2
            - (8.0 * p(3.5) - (15.0 + 36.0 * q1 - 24.0 * q1 * q1) * p(1.5)
                + (24.0 * q1 + 38.0) * p(2.5)
                - (2.0 * q1 * q1 - 8.0 * q1.powi(3)) * sq)
                * sw;
        let w0 = (148.0 * q2 * q2 + 35.0 * q2) * q1 + 2.0 * q2.powi(3)
            - 37.0 * q2 * q2
            - q2
            - 70.0 * q1 * q1 * q2
            - (8.0 * p(3.5)
                + (24.0 * q1 * q1 - 12.0 * q1 + 24.0) * p(1.5)
                + 6.0 * w * p(2.5)
                + (8.0 * q1.powi(3) - 6.0 * q1 * q1 + q1) * sq)
                * sw;
        Ok(ShakinessCondition { q1, q2, w: [w0, w1, w2, w3, w4] })
    }

    pub fn residual(&self, c: f64) -> f64 {
        self.w.iter().rev().fold(0.0, |acc, &wk| acc * c + wk)
    }

    /// Residual divided by `sum |w_k c^k|`.
    pub fn normalized_residual(&self, c: f64) -> f64 {
        let scale: f64 = self.w.iter().enumerate().map(|(k, wk)| (wk * c.powi(k as i32)).abs()).sum();
        if scale == 0.0 {
            0.0
        } else {
            self.residual(c) / scale
        }
    }
}

/// Shakiness residual of the origami sandglass `(n, Q1, Q2)`.
pub fn shakiness_residual(n: usize, q1: f64, q2: f64) -> Result<f64> {
    let sk = Skeleton::new(n)?;
    Ok(ShakinessCondition::new(q1, q2)?.residual(sk.cos))
}

/// Lower end of the `Q2` bracket scan.
pub const SHAKY_Q2_MIN: f64 = 1e-8;
/// Upper end of the `Q2` bracket scan.
pub const SHAKY_Q2_MAX: f64 = 1e2;
const SHAKY_SCAN_POINTS: usize = 4000;

/// A shaky origami design with its singular realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ShakyDesign {
    pub spec: DesignSpec,
    /// The realization at which the realization equations are singular.
    pub realization: Realization,
    /// Other roots of the shakiness condition, in increasing order.
    pub alternates: Vec<f64>,
}

impl ShakyDesign {
    pub fn q2(&self) -> f64 {
        self.spec.q2()
    }
}

/// Roots of the shakiness condition in `[SHAKY_Q2_MIN, SHAKY_Q2_MAX]`,
/// ascending.
pub fn shakiness_roots(n: usize, q1: f64) -> Result<Vec<f64>> {
    let c = Skeleton::new(n)?.cos;
    let f = |q2: f64| ShakinessCondition::new(q1, q2).map(|s| s.residual(c));
    let (lo, hi) = (SHAKY_Q2_MIN.ln(), SHAKY_Q2_MAX.ln());
    let grid: Vec<f64> = (0..SHAKY_SCAN_POINTS)
        .map(|k| (lo + (hi - lo) * k as f64 / (SHAKY_SCAN_POINTS - 1) as f64).exp())
        .collect();
    let values = grid.iter().map(|&q| f(q)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for k in 0..grid.len() - 1 {
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            roots.push(grid[k]);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let (mut a, mut b, mut fa) = (grid[k], grid[k + 1], fa);
        while b - a > 1e-12 * b {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok(roots)
}

/// Smallest `Q2` making the origami sandglass `(n, Q1)` shaky with a real
/// singular realization.
pub fn solve_shaky_q2(n: usize, q1: f64) -> Result<ShakyDesign> {
    if !(q1 > 0.25) {
        return Err(Error::Domain(format!("Q1 must exceed 1/4, got {q1}")));
    }
    let roots = shakiness_roots(n, q1)?;
    for (k, &q2) in roots.iter().enumerate() {
        if let Some((spec, x)) = refine_shaky(n, q1, q2) {
            let alternates = roots.iter().enumerate().filter(|&(m, _)| m != k).map(|(_, &q)| q).collect();
            return Ok(ShakyDesign { spec, realization: Realization::new(spec, x), alternates });
        }
    }
    Err(Error::NoSolution(format!("no shaky design for n = {n}, Q1 = {q1}")))
}

fn det_jacobian(sk: &Skeleton, x: &Coords) -> f64 {
    squared_edge_length_jacobian(sk, x).determinant()
}

/// Seed realization near the double root of the quartic in `r`.
fn double_root_seed(sk: &Skeleton, q: [f64; 3]) -> Option<Coords> {
    let rq = RQuartic::new(sk, q);
    let roots = rq.quartic.complex_roots();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let gap = (roots[i] - roots[j]).norm();
            if best.map_or(true, |(g, _)| gap < g) {
                best = Some((gap, 0.5 * (roots[i].re + roots[j].re)));
            }
        }
    }
    let (gap, r) = best?;
    if gap > 1e-2 * (1.0 + r.abs()) {
        return None;
    }
    let h2 = rq.h2.eval(r);
    if !(h2 > 0.0) {
        return None;
    }
    let h = h2.sqrt();
    Some(Coords::new(rq.p.eval(r) / (4.0 * h), h, r))
}

/// Newton on `S(x) = Q(Q2)`, `det J(x) = 0` in the unknowns `(H, h, r, Q2)`.
fn refine_shaky(n: usize, q1: f64, q2: f64) -> Option<(DesignSpec, Coords)> {
    let sk = Skeleton::new(n).ok()?;
    let q3 = origami_q3(q1, q2).ok()?;
    let x0 = double_root_seed(&sk, [q1, q2, q3])?;
    let sw = (4.0 * q1 - 1.0).sqrt();
    let eval = |x: &Coords, q2: f64| -> Option<Vector4<f64>> {
        let q3 = origami_q3(q1, q2).ok()?;
        let s = squared_edge_lengths(&sk, x);
        Some(Vector4::new(s[0] - q1, s[1] - q2, s[2] - q3, det_jacobian(&sk, x)))
    };
    let mut x = x0;
    let mut q2v = q2;
    let mut f = eval(&x, q2v)?;
    for _ in 0..60 {
        if f.amax() < 1e-15 {
            break;
        }
        let j3: Matrix3<f64> = squared_edge_length_jacobian(&sk, &x);
        let mut jac = Matrix4::zeros();
        jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&j3);
        jac[(1, 3)] = -1.0;
        jac[(2, 3)] = -(1.0 - sw / (2.0 * q2v.sqrt()));
        let v = x.to_vector();
        for k in 0..3 {
            let step = 1e-7 * (1.0 + v[k].abs());
            let mut vp = v;
            let mut vm = v;
            vp[k] += step;
            vm[k] -= step;
            jac[(3, k)] = (det_jacobian(&sk, &Coords::from_vector(&vp))
                - det_jacobian(&sk, &Coords::from_vector(&vm)))
                / (2.0 * step);
        }
        let delta = jac.lu().solve(&f)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let nv = v - t * delta.fixed_rows::<3>(0);
            let nq2 = q2v - t * delta[3];
            if nq2 > 0.0 {
                let nx = Coords::from_vector(&nv);
                if let Some(nf) = eval(&nx, nq2) {
                    if nf.norm() < f.norm() {
                        x = nx;
                        q2v = nq2;
                        f = nf;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !(f.fixed_rows::<3>(0).amax() < 1e-12) || (q2v - q2).abs() > 1e-6 * q2 {
        return None;
    }
    let spec = DesignSpec::origami(n, q1, q2v).ok()?;
    let x = polish(&sk, spec.q123(), x).canonical();
    if Realization::new(spec, x).max_residual() >= tol::RESIDUAL {
        return None;
    }
    Some((spec, x))
}

/// Symmetric first-order motion: `A_i` moves by `(0, 0, z)`, `B_i` by
/// `(0, 0, -z)`, `D_i` by `Rot_i (u, 0, v)` and `C_{i+1}` by
/// `Rot_i (u c, u s, -v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfinitesimalFlex {
    pub u: f64,
    pub v: f64,
    pub z: f64,
}

impl InfinitesimalFlex {
    pub fn scaled(self, lambda: f64) -> Self {
        InfinitesimalFlex { u: lambda * self.u, v: lambda * self.v, z: lambda * self.z }
    }

    pub fn as_vector(self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.z)
    }

    /// Velocities of the `4n` material vertices and the cap centers, in mesh
    /// order.
    pub fn velocities(&self, sk: &Skeleton) -> Vec<Vector3<f64>> {
        let maps = velocity_maps(sk);
        let p = self.as_vector();
        let n = sk.n;
        let mut out = vec![Vector3::zeros(); 4 * n + 2];
        for i in 0..n {
            let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::TAU * i as f64 / n as f64);
            out[Mesh::a(n, i)] = maps.a * p;
            out[Mesh::b(n, i)] = maps.b * p;
            out[Mesh::d(n, i)] = rot * (maps.d0 * p);
            out[Mesh::c(n, i + 1)] = rot * (maps.c1 * p);
        }
        out[Mesh::center_a(n)] = maps.a * p;
        out[Mesh::center_b(n)] = maps.b * p;
        out
    }
}

/// Linear maps from `(u, v, z)` to the velocities of `A_0`, `B_0`, `D_0`,
/// `C_1`, `D_1`.
struct VelocityMaps {
    a: Matrix3<f64>,
    b: Matrix3<f64>,
    d0: Matrix3<f64>,
    c1: Matrix3<f64>,
    d1: Matrix3<f64>,
}

fn velocity_maps(sk: &Skeleton) -> VelocityMaps {
    let (c, s) = (sk.cos, sk.sin);
    let a = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    let d0 = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let c1 = Matrix3::new(c, 0.0, 0.0, s, 0.0, 0.0, 0.0, -1.0, 0.0);
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), 2.0 * std::f64::consts::PI / sk.n as f64);
    VelocityMaps { a, b: -a, d0, c1, d1: rot.matrix() * d0 }
}

/// The six symmetric edge-class representatives `B0D0`, `B0D1`, `A0D0`,
/// `B0C1`, `D0C1`, `C1D1`.
pub const REDUCED_EDGES: [&str; 6] = ["B0D0", "B0D1", "A0D0", "B0C1", "D0C1", "C1D1"];

/// First-order length constraints of the six edge representatives in the
/// symmetric unknowns `(u, v, z)`, rows scaled to unit length.
pub fn reduced_rigidity_matrix(real: &Realization) -> SMatrix<f64, 6, 3> {
    let sk = real.spec.skeleton();
    let n = sk.n;
    let v = Mesh::sandglass_vertices(sk, &real.coords);
    let maps = velocity_maps(sk);
    let (a0, b0, c1, d0, d1) = (
        v[Mesh::a(n, 0)],
        v[Mesh::b(n, 0)],
        v[Mesh::c(n, 1)],
        v[Mesh::d(n, 0)],
        v[Mesh::d(n, 1)],
    );
    let pairs = [
        (b0 - d0, maps.b - maps.d0),
        (b0 - d1, maps.b - maps.d1),
        (a0 - d0, maps.a - maps.d0),
        (b0 - c1, maps.b - maps.c1),
        (d0 - c1, maps.d0 - maps.c1),
        (c1 - d1, maps.c1 - maps.d1),
    ];
    let mut m = SMatrix::<f64, 6, 3>::zeros();
    for (k, (e, dv)) in pairs.iter().enumerate() {
        let row = e.transpose() * dv;
        let norm = row.norm();
        m.set_row(k, &if norm > 0.0 { row / norm } else { row });
    }
    m
}

/// Number of singular values above [`tol::RANK`].
pub fn numerical_rank(singular_values: &[f64]) -> usize {
    singular_values.iter().filter(|&&s| s > tol::RANK).count()
}

/// Rank of the reduced rigidity matrix; 2 at shaky realizations.
pub fn reduced_rank(real: &Realization) -> usize {
    let sv = reduced_rigidity_matrix(real).singular_values();
    numerical_rank(sv.as_slice())
}

pub fn reduced_min_singular_value(real: &Realization) -> f64 {
    reduced_rigidity_matrix(real).singular_values().min()
}

/// First-order length constraints of all `8n` belt edges without symmetry
/// assumptions. The cap `alpha` (ring `B`) is pinned; the unknowns are the
/// translation and angular velocity of the cap `beta` (ring `A`) followed by
/// the velocities of `C_0..C_{n-1}` and `D_0..D_{n-1}`. Rows are scaled to
/// unit length.
pub fn full_rigidity_matrix(real: &Realization) -> DMatrix<f64> {
    let sk = real.spec.skeleton();
    let n = sk.n;
    let v = Mesh::sandglass_vertices(sk, &real.coords);
    let cols = 6 + 6 * n;
    let col_c = |i: usize| 6 + 3 * (i % n);
    let col_d = |i: usize| 6 + 3 * n + 3 * (i % n);
    let mut m = DMatrix::zeros(8 * n, cols);
    let mut row = 0;
    #[derive(Clone, Copy)]
    enum Node {
        Pinned,
        Cap,
        /// Free vertex with its first column.
        Free(usize),
    }
    let mut add = |x: Node, y: Node, px: usize, py: usize| {
        let e = v[px] - v[py];
        let mut put = |node: Node, sign: f64, p: usize| match node {
            Node::Pinned => {}
            Node::Cap => {
                // velocity t + omega x p
                for k in 0..3 {
                    m[(row, k)] += sign * e[k];
                }
                let g = v[p].coords.cross(&e);
                for k in 0..3 {
                    m[(row, 3 + k)] += sign * g[k];
                }
            }
            Node::Free(col) => {
                for k in 0..3 {
                    m[(row, col + k)] += sign * e[k];
                }
            }
        };
        put(x, 1.0, px);
        put(y, -1.0, py);
        row += 1;
    };
    for i in 0..n {
        let j = i + 1;
        let (ai, aj, bi) = (Node::Cap, Node::Cap, Node::Pinned);
        let (di, dj, cj) = (Node::Free(col_d(i)), Node::Free(col_d(j)), Node::Free(col_c(j)));
        let (pai, paj, pbi) = (Mesh::a(n, i), Mesh::a(n, j), Mesh::b(n, i));
        let (pdi, pdj, pcj) = (Mesh::d(n, i), Mesh::d(n, j), Mesh::c(n, j));
        add(bi, di, pbi, pdi);
        add(bi, cj, pbi, pcj);
        add(bi, dj, pbi, pdj);
        add(di, cj, pdi, pcj);
        add(ai, di, pai, pdi);
        add(ai, cj, pai, pcj);
        add(aj, cj, paj, pcj);
        add(cj, dj, pcj, pdj);
    }
    for mut r in m.row_iter_mut() {
        let norm = r.norm();
        if norm > 0.0 {
            r /= norm;
        }
    }
    m
}

/// Kernel dimension of the full rigidity matrix and, when it is positive,
/// the unit kernel vector of the smallest singular value.
pub fn full_kernel(real: &Realization) -> (usize, Option<DVector<f64>>) {
    let m = full_rigidity_matrix(real);
    let cols = m.ncols();
    // work with the square normal matrix so that V is always complete
    let svd = (m.transpose() * &m).svd(false, true);
    let sv: Vec<f64> = svd.singular_values.iter().map(|s| s.max(0.0).sqrt()).collect();
    let rank = numerical_rank(&sv);
    let dim = cols - rank;
    let vt = svd.v_t.expect("right singular vectors");
    let (k, _) = sv
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bs), (k, &s)| if s < bs { (k, s) } else { (bk, bs) });
    let vec = (dim > 0).then(|| vt.row(k).transpose());
    (dim, vec)
}

/// The symmetric flex written in the unknowns of [`full_rigidity_matrix`]
/// (the velocity field shifted so that the cap `alpha` is at rest).
pub fn expand_symmetric_flex(real: &Realization, flex: &InfinitesimalFlex) -> DVector<f64> {
    let sk = real.spec.skeleton();
    let n = sk.n;
    let vel = flex.velocities(sk);
    let shift = Vector3::new(0.0, 0.0, flex.z);
    let mut out = DVector::zeros(6 + 6 * n);
    out[2] = 2.0 * flex.z;
    for i in 0..n {
        let c = vel[Mesh::c(n, i)] + shift;
        let d = vel[Mesh::d(n, i)] + shift;
        out.fixed_rows_mut::<3>(6 + 3 * i).copy_from(&c);
        out.fixed_rows_mut::<3>(6 + 3 * n + 3 * i).copy_from(&d);
    }
    out
}

/// Symmetric flex with cap speed `z`, from the constraints on the edges
/// `A_0 D_0` and `B_0 D_0`.
pub fn infinitesimal_flex(real: &Realization, z: f64) -> Result<InfinitesimalFlex> {
    if z == 0.0 {
        return Err(Error::ZeroFlex);
    }
    let sk = real.spec.skeleton();
    let n = sk.n;
    let v = Mesh::sandglass_vertices(sk, &real.coords);
    let d = v[Mesh::d(n, 0)] - v[Mesh::a(n, 0)];
    let e = v[Mesh::d(n, 0)] - v[Mesh::b(n, 0)];
    // (D0 - A0).((0,0,z) - (u,0,v)) = 0 and (D0 - B0).((0,0,-z) - (u,0,v)) = 0
    let m = Matrix2::new(d.x, d.z, e.x, e.z);
    let rhs = Vector2::new(d.z * z, -e.z * z);
    let scale = d.norm() * e.norm();
    if m.determinant().abs() <= 1e-12 * scale {
        return Err(Error::SingularSystem(format!(
            "flex equations are rank deficient (det {:e})",
            m.determinant()
        )));
    }
    let uv = m.lu().solve(&rhs).ok_or_else(|| Error::SingularSystem("flex equations".into()))?;
    Ok(InfinitesimalFlex { u: uv.x, v: uv.y, z })
}

/// First-order length change `(X - Y).(v(X) - v(Y))` of the six edge
/// representatives, in the order of [`REDUCED_EDGES`].
pub fn edge_rates(real: &Realization, flex: &InfinitesimalFlex) -> [f64; 6] {
    let sk = real.spec.skeleton();
    let n = sk.n;
    let v = Mesh::sandglass_vertices(sk, &real.coords);
    let vel = flex.velocities(sk);
    let pairs = [
        (Mesh::b(n, 0), Mesh::d(n, 0)),
        (Mesh::b(n, 0), Mesh::d(n, 1)),
        (Mesh::a(n, 0), Mesh::d(n, 0)),
        (Mesh::b(n, 0), Mesh::c(n, 1)),
        (Mesh::d(n, 0), Mesh::c(n, 1)),
        (Mesh::c(n, 1), Mesh::d(n, 1)),
    ];
    pairs.map(|(x, y)| (v[x] - v[y]).dot(&(vel[x] - vel[y])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_is_checked() {
        assert!(matches!(ShakinessCondition::new(0.25, 1.0), Err(Error::Domain(_))));
        assert!(matches!(ShakinessCondition::new(0.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn shaky_design_is_singular() {
        let design = solve_shaky_q2(3, 0.28).unwrap();
        let c = design.spec.skeleton().cos;
        let cond = ShakinessCondition::new(0.28, design.q2()).unwrap();
        assert!(cond.normalized_residual(c).abs() < 1e-8);
        assert_eq!(reduced_rank(&design.realization), 2);
        let (dim, _) = full_kernel(&design.realization);
        assert_eq!(dim, 1);
    }

    #[test]
    fn flex_satisfies_all_constraints_at_shaky_realization() {
        let design = solve_shaky_q2(4, 0.27).unwrap();
        let flex = infinitesimal_flex(&design.realization, 1.0).unwrap();
        for rate in edge_rates(&design.realization, &flex) {
            assert!(rate.abs() < 1e-8, "{rate}");
        }
        let (c, r, h) = (
            design.spec.skeleton().cos,
            design.realization.coords.waist_r,
            design.realization.coords.waist_z,
        );
        let d0c1 = flex.u * r * (2.0 - 2.0 * c) - 4.0 * h * flex.v;
        assert!(d0c1.abs() < 1e-8);
    }

    #[test]
    fn generic_design_is_rigid() {
        let spec = DesignSpec::origami(3, 1.0, 1.0).unwrap();
        let real = crate::realize::realize(&spec).unwrap().solutions[0].realization;
        assert_eq!(reduced_rank(&real), 3);
        assert_eq!(full_kernel(&real).0, 0);
        let flex = infinitesimal_flex(&real, 1.0).unwrap();
        let worst = edge_rates(&real, &flex).iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        assert!(worst > 1e-4);
    }

    #[test]
    fn first_two_rows_coincide() {
        let spec = DesignSpec::origami(5, 0.9, 0.7).unwrap();
        let real = Realization::new(spec, Coords::new(0.4, 0.1, 0.6));
        let m = reduced_rigidity_matrix(&real);
        assert!((m.row(0) - m.row(1)).amax() < 1e-12);
    }

    #[test]
    fn flex_is_linear_in_z() {
        let spec = DesignSpec::origami(3, 0.8, 0.5).unwrap();
        let real = Realization::new(spec, Coords::new(0.5, 0.2, 0.3));
        let a = infinitesimal_flex(&real, 1.0).unwrap();
        let b = infinitesimal_flex(&real, -2.5).unwrap();
        assert!((a.scaled(-2.5).as_vector() - b.as_vector()).amax() < 1e-12);
        let vel = a.velocities(spec.skeleton());
        let n = spec.n();
        assert_eq!(vel[Mesh::a(n, 1)], -vel[Mesh::b(n, 1)]);
    }
}
