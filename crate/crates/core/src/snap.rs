//! Snapping sandglasses: extremal designs, the strain-energy landscape of
//! the bar-joint model, the mountain pass between two realizations and the
//! snappability.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, FailureCode, Result};
use crate::geometry::{
    self_intersections, squared_edge_length_hessians, squared_edge_length_jacobian,
    squared_edge_lengths, volume, ContactKind, Coords, DesignSpec, Mesh, Realization, Skeleton,
};
use crate::origami::origami_q3;
use crate::poly::Poly;
use crate::realize::{r_quartic_discriminant, realize};
use crate::tol;

/// Normalized strain-energy density of the symmetric bar-joint model,
/// as a function of the shape `(H, h, r)`.
///
/// Each of the `4n`, `2n` and `2n` bars of the classes `L1`/`L4`, `L2` and
/// `L3` contributes `(Q - S)^2 / (8 L^3)`; the sum is divided by the total
/// undeformed bar length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLandscape {
    pub spec: DesignSpec,
    /// Per-class weights `m_k / (8 L_k^3 D)`.
    weights: [f64; 3],
}

impl EnergyLandscape {
    pub fn new(spec: DesignSpec) -> Self {
        let n = spec.n() as f64;
        let q = spec.q123();
        let m = [4.0 * n, 2.0 * n, 2.0 * n];
        let l = q.map(f64::sqrt);
        let denom: f64 = (0..3).map(|k| m[k] * l[k]).sum();
        let weights = [0, 1, 2].map(|k| m[k] / (8.0 * l[k].powi(3) * denom));
        EnergyLandscape { spec, weights }
    }

    /// Energy as a function of the squared lengths `S`.
    pub fn energy_of_lengths(&self, s: [f64; 3]) -> f64 {
        let q = self.spec.q123();
        (0..3).map(|k| self.weights[k] * (q[k] - s[k]).powi(2)).sum()
    }

    pub fn energy(&self, x: &Coords) -> f64 {
        self.energy_of_lengths(squared_edge_lengths(self.spec.skeleton(), x))
    }

    pub fn gradient(&self, x: &Coords) -> Vector3<f64> {
        let sk = self.spec.skeleton();
        let s = squared_edge_lengths(sk, x);
        let q = self.spec.q123();
        let j = squared_edge_length_jacobian(sk, x);
        let lambda = Vector3::from_fn(|k, _| 2.0 * self.weights[k] * (s[k] - q[k]));
        j.transpose() * lambda
    }

    pub fn hessian(&self, x: &Coords) -> Matrix3<f64> {
        let sk = self.spec.skeleton();
        let s = squared_edge_lengths(sk, x);
        let q = self.spec.q123();
        let j = squared_edge_length_jacobian(sk, x);
        let hs = squared_edge_length_hessians(sk);
        let mut out = Matrix3::zeros();
        for k in 0..3 {
            let g = j.row(k).transpose();
            out += 2.0 * self.weights[k] * (g * g.transpose() + hs[k] * (s[k] - q[k]));
        }
        out
    }
}

/// Left-hand side of the extremal-snap condition as a function of `Q1`, `Q2`
/// and `c = cos(pi/n)`.
pub fn extremal_residual(c: f64, q1: f64, q2: f64) -> f64 {
    let w = 4.0 * q1 - 1.0;
    let (sw, sq) = (w.sqrt(), q2.sqrt());
    4.0 * c * q2 * q1 - 2.0 * c * q2 * q2 - 2.0 * q1 * q1 - 28.0 * q2 * q1 - 2.0 * q2 * q2
        + q1
        + 5.0 * q2
        - 2.0 * c * q1 * q1
        + w.powf(1.5) * sq
        + 8.0 * q2.powf(1.5) * sw
        + 4.0 * q1 * sq * sw
}

/// The extremal-snap condition as a quartic in `y = sqrt(Q2)`.
pub fn extremal_quartic(c: f64, q1: f64) -> Poly {
    let w = 4.0 * q1 - 1.0;
    let sw = w.sqrt();
    Poly::from_descending(&[
        -2.0 * c - 2.0,
        8.0 * sw,
        4.0 * c * q1 - 28.0 * q1 + 5.0,
        w.powf(1.5) + 4.0 * q1 * sw,
        q1 - 2.0 * q1 * q1 - 2.0 * c * q1 * q1,
    ])
}

/// All `Q2 > 0` satisfying the extremal-snap condition, ascending.
pub fn extremal_q2_candidates(n: usize, q1: f64) -> Result<Vec<f64>> {
    if !(q1 > 0.25) {
        return Err(Error::Domain(format!("Q1 must exceed 1/4, got {q1}")));
    }
    let c = Skeleton::new(n)?.cos;
    let quartic = extremal_quartic(c, q1);
    let mut out: Vec<f64> = quartic
        .complex_roots()
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.re.abs()))
        .map(|z| quartic.polish(z.re))
        .filter(|&y| y > 0.0)
        .map(|y| y * y)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * b.abs());
    Ok(out)
}

/// Smallest `Q2` satisfying the extremal-snap condition.
pub fn extremal_q2(n: usize, q1: f64) -> Result<f64> {
    extremal_q2_candidates(n, q1)?
        .first()
        .copied()
        .ok_or_else(|| Error::NoSolution(format!("no extremal Q2 for n = {n}, Q1 = {q1}")))
}

/// Which factor of the coplanarity condition of `A0, B0, D0, C1` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedKind {
    /// `2Hrs + h = 0`: the faces at `D0 C1` are folded flat onto each other.
    FoldedFlat,
    /// `2rs - 1 = 0`: the dihedral at `D0 C1` is straight.
    Straight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedStateReport {
    /// Signed volume of the tetrahedron `A0 B0 D0 C1`.
    pub tetra_volume: f64,
    /// `2Hrs + h`.
    pub fold_factor: f64,
    /// `2rs - 1`.
    pub straight_factor: f64,
    pub kind: Option<ClosedKind>,
}

impl ClosedStateReport {
    /// Closed in the sense of the extremal snap: coplanar with the faces
    /// folded flat.
    pub fn is_closed(&self) -> bool {
        self.kind == Some(ClosedKind::FoldedFlat)
    }
}

pub fn closed_state_check(real: &Realization) -> ClosedStateReport {
    let sk = real.spec.skeleton();
    let n = sk.n;
    let v = Mesh::sandglass_vertices(sk, &real.coords);
    let (a0, b0, d0, c1) = (v[Mesh::a(n, 0)], v[Mesh::b(n, 0)], v[Mesh::d(n, 0)], v[Mesh::c(n, 1)]);
    let tetra_volume = (b0 - a0).dot(&(d0 - a0).cross(&(c1 - a0))) / 6.0;
    let Coords { cap_z, waist_z, waist_r } = real.coords;
    let fold_factor = 2.0 * cap_z * waist_r * sk.sin + waist_z;
    let straight_factor = 2.0 * waist_r * sk.sin - 1.0;
    let kind = if tetra_volume.abs() >= tol::CLOSED_STATE {
        None
    } else if fold_factor.abs() < tol::CLOSED_STATE {
        Some(ClosedKind::FoldedFlat)
    } else if straight_factor.abs() < tol::CLOSED_STATE {
        Some(ClosedKind::Straight)
    } else {
        None
    };
    ClosedStateReport { tetra_volume, fold_factor, straight_factor, kind }
}

/// Parameters of the saddle search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleOptions {
    pub nodes: usize,
    pub max_iterations: usize,
    pub newton_tolerance: f64,
    pub newton_max_iterations: usize,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        SaddleOptions { nodes: 64, max_iterations: 20_000, newton_tolerance: 1e-12, newton_max_iterations: 200 }
    }
}

/// Mountain pass between two realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct Saddle {
    pub coords: Coords,
    /// Squared lengths `(S1, S2, S3)` at the saddle.
    pub lengths: [f64; 3],
    /// Snappability: the energy at the saddle.
    pub sigma: f64,
    pub gradient_norm: f64,
    /// Hessian eigenvalues, ascending.
    pub eigenvalues: [f64; 3],
    /// Normalized discriminant of the quartic in `r` for the saddle lengths.
    pub discriminant: f64,
    /// Refined path from the first to the second endpoint; contains the saddle.
    pub path: Vec<Coords>,
}

impl Saddle {
    pub fn negative_eigenvalues(&self) -> usize {
        self.eigenvalues.iter().filter(|&&e| e < 0.0).count()
    }

    pub fn saddle_index(&self) -> usize {
        self.path.iter().position(|x| *x == self.coords).unwrap_or(0)
    }
}

fn reparametrize(path: &mut [Vector3<f64>]) {
    let m = path.len();
    let mut s = vec![0.0; m];
    for k in 1..m {
        s[k] = s[k - 1] + (path[k] - path[k - 1]).norm();
    }
    let total = s[m - 1];
    if total == 0.0 {
        return;
    }
    let old = path.to_vec();
    let mut seg = 0;
    for k in 1..m - 1 {
        let t = total * k as f64 / (m - 1) as f64;
        while seg < m - 2 && s[seg + 1] < t {
            seg += 1;
        }
        let span = s[seg + 1] - s[seg];
        let w = if span > 0.0 { (t - s[seg]) / span } else { 0.0 };
        path[k] = old[seg] + (old[seg + 1] - old[seg]) * w;
    }
}

fn sorted_eigenvalues(h: Matrix3<f64>) -> [f64; 3] {
    let mut ev: [f64; 3] = SymmetricEigen::new(h).eigenvalues.into();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Mountain pass of `landscape` between the zero-energy shapes `a` and `b`:
/// a string of nodes relaxed by steepest descent with arc-length
/// reparametrization, a climbing phase for the highest node, and Newton
/// refinement on the gradient.
pub fn find_saddle(
    landscape: &EnergyLandscape,
    a: &Coords,
    b: &Coords,
    opts: &SaddleOptions,
) -> Result<Saddle> {
    let (a, b) = (a.canonical(), b.canonical());
    if a.distance(&b) < 1e-9 {
        return Err(Error::NoPathConvergence("endpoints coincide".into()));
    }
    let m = opts.nodes.max(3);
    let (va, vb) = (a.to_vector(), b.to_vector());
    let mut path: Vec<Vector3<f64>> =
        (0..m).map(|k| va + (vb - va) * (k as f64 / (m - 1) as f64)).collect();
    let grad = |v: &Vector3<f64>| landscape.gradient(&Coords::from_vector(v));
    let lambda_max = path
        .iter()
        .map(|v| {
            let ev = sorted_eigenvalues(landscape.hessian(&Coords::from_vector(v)));
            ev[0].abs().max(ev[2].abs())
        })
        .fold(0.0_f64, f64::max);
    if !(lambda_max > 0.0) {
        return Err(Error::NoPathConvergence("flat landscape".into()));
    }
    let dt = 0.5 / lambda_max;
    let scale = va.norm().max(vb.norm()).max(1.0);

    for _ in 0..opts.max_iterations {
        let mut moved = 0.0_f64;
        for v in path.iter_mut().take(m - 1).skip(1) {
            let step = dt * grad(v);
            moved = moved.max(step.norm());
            *v -= step;
        }
        reparametrize(&mut path);
        if path.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(Error::NoPathConvergence("string diverged".into()));
        }
        if moved < 1e-12 * scale {
            break;
        }
    }
    climb_and_refine(landscape, path, dt, opts)
}

/// Interior node of highest energy.
fn highest_node(landscape: &EnergyLandscape, path: &[Vector3<f64>]) -> usize {
    let energy = |k: usize| landscape.energy(&Coords::from_vector(&path[k]));
    (1..path.len() - 1).max_by(|&i, &j| energy(i).total_cmp(&energy(j))).unwrap_or(1)
}

/// Move the highest node uphill along the path and downhill across it.
fn climb_and_refine(
    landscape: &EnergyLandscape,
    mut path: Vec<Vector3<f64>>,
    dt: f64,
    opts: &SaddleOptions,
) -> Result<Saddle> {
    let top = highest_node(landscape, &path);
    for _ in 0..opts.max_iterations {
        let g = landscape.gradient(&Coords::from_vector(&path[top]));
        let tau = (path[top + 1] - path[top - 1]).normalize();
        let step = dt * (g - 2.0 * g.dot(&tau) * tau);
        path[top] -= step;
        if step.norm() < 1e-15 {
            break;
        }
    }
    refine(landscape, path, opts)
}

fn refine(landscape: &EnergyLandscape, mut path: Vec<Vector3<f64>>, opts: &SaddleOptions) -> Result<Saddle> {
    let top = highest_node(landscape, &path);
    let mut x = path[top];
    let mut g = landscape.gradient(&Coords::from_vector(&x));
    let mut converged = g.norm() < opts.newton_tolerance;
    for _ in 0..opts.newton_max_iterations {
        if converged {
            break;
        }
        let h = landscape.hessian(&Coords::from_vector(&x));
        let Some(step) = h.lu().solve(&g) else { break };
        let len = step.norm();
        let step = if len > 0.1 { step * (0.1 / len) } else { step };
        x -= step;
        g = landscape.gradient(&Coords::from_vector(&x));
        converged = g.norm() < opts.newton_tolerance;
    }
    if !converged || !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NoPathConvergence(format!("gradient norm {:e} after Newton", g.norm())));
    }
    path[top] = x;
    let coords = Coords::from_vector(&x);
    let sk = landscape.spec.skeleton();
    let lengths = squared_edge_lengths(sk, &coords);
    let eigenvalues = sorted_eigenvalues(landscape.hessian(&coords));
    let discriminant = r_quartic_discriminant(sk, lengths);
    let path: Vec<Coords> = path.iter().map(Coords::from_vector).collect();
    let saddle = Saddle {
        coords,
        lengths,
        sigma: landscape.energy(&coords),
        gradient_norm: g.norm(),
        eigenvalues,
        discriminant,
        path,
    };
    if saddle.discriminant.abs() >= tol::SADDLE_SHAKY {
        return Err(Error::SaddleNotShaky(saddle.discriminant));
    }
    Ok(saddle)
}

/// Outcome of one extremal `Q2` branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub q2: f64,
    pub failure: Option<FailureCode>,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapFlags {
    pub open_intersection_free: bool,
    pub closed_coplanar: bool,
    /// The closed state has boundary (touching) face contacts.
    pub closed_touching: bool,
    pub saddle_shaky: bool,
}

/// A verified snapping pair of an extremal design.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapResult {
    pub spec: DesignSpec,
    pub open: Realization,
    pub closed: Realization,
    pub closed_report: ClosedStateReport,
    pub saddle: Saddle,
    pub flags: SnapFlags,
    pub volume_open: f64,
    pub volume_closed: f64,
    /// All extremal branches, ascending in `Q2`.
    pub branches: Vec<BranchOutcome>,
}

impl SnapResult {
    pub fn sigma(&self) -> f64 {
        self.saddle.sigma
    }

    pub fn relative_volume_change(&self) -> f64 {
        (self.volume_open - self.volume_closed) / self.volume_closed
    }

    /// Change of the total height `2H`, relative to the circumradius of the caps.
    pub fn relative_height_change(&self) -> f64 {
        2.0 * (self.open.coords.cap_z - self.closed.coords.cap_z) / self.spec.skeleton().radius
    }

    /// Change of the waist radius `|r|`, relative to the circumradius of the caps.
    pub fn relative_waist_change(&self) -> f64 {
        (self.open.coords.waist_r.abs() - self.closed.coords.waist_r.abs()) / self.spec.skeleton().radius
    }

    /// Path from the open to the closed state through the saddle.
    pub fn path(&self) -> &[Coords] {
        &self.saddle.path
    }
}

/// The snapping pair of one extremal design `spec`, if any.
pub fn snap_design(spec: &DesignSpec, opts: &SaddleOptions) -> Result<SnapResult> {
    let set = realize(spec).map_err(|_| Error::VerificationFailed(FailureCode::NoRealization))?;
    let reals: Vec<Realization> = set.realizations().collect();
    let (closed_idx, closed_report) = reals
        .iter()
        .enumerate()
        .map(|(k, r)| (k, closed_state_check(r)))
        .filter(|(_, rep)| rep.is_closed())
        .min_by(|a, b| a.1.fold_factor.abs().total_cmp(&b.1.fold_factor.abs()))
        .ok_or(Error::VerificationFailed(FailureCode::NoRealization))?;
    let closed = reals[closed_idx];
    let closed_contacts = self_intersections(&closed.mesh(), tol::INTERSECTION_EPS);
    if closed_contacts.iter().any(|c| c.kind == ContactKind::Crossing) {
        return Err(Error::VerificationFailed(FailureCode::SelfIntersecting));
    }
    let mut opens: Vec<Realization> = reals
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != closed_idx)
        .map(|(_, r)| *r)
        .collect();
    if opens.is_empty() {
        return Err(Error::VerificationFailed(FailureCode::NoRealization));
    }
    opens.retain(|r| self_intersections(&r.mesh(), tol::INTERSECTION_EPS).is_empty());
    opens.sort_by(|a, b| a.coords.distance(&closed.coords).total_cmp(&b.coords.distance(&closed.coords)));
    let open = *opens.first().ok_or(Error::VerificationFailed(FailureCode::SelfIntersecting))?;

    let landscape = EnergyLandscape::new(*spec);
    let saddle = find_saddle(&landscape, &open.coords, &closed.coords, opts)?;
    let volume_open = volume(&open.mesh())?;
    let volume_closed = volume(&closed.mesh())?;
    Ok(SnapResult {
        spec: *spec,
        open,
        closed,
        closed_report,
        flags: SnapFlags {
            open_intersection_free: true,
            closed_coplanar: true,
            closed_touching: closed_contacts.iter().any(|c| c.kind == ContactKind::Touching),
            saddle_shaky: true,
        },
        saddle,
        volume_open,
        volume_closed,
        branches: Vec::new(),
    })
}

/// Snapping pair of the extremal design `(n, Q1)` on the lowest `Q2` branch
/// that admits one. Every branch is evaluated and reported.
pub fn snap_pair(n: usize, q1: f64, opts: &SaddleOptions) -> Result<SnapResult> {
    let candidates = extremal_q2_candidates(n, q1)?;
    if candidates.is_empty() {
        return Err(Error::VerificationFailed(FailureCode::NoExtremalQ2));
    }
    let mut branches = Vec::new();
    let mut best: Option<SnapResult> = None;
    let mut first_failure = None;
    for q2 in candidates {
        let outcome = origami_q3(q1, q2)
            .map_err(|_| Error::VerificationFailed(FailureCode::NoRealization))
            .and_then(|_| DesignSpec::origami(n, q1, q2))
            .and_then(|spec| snap_design(&spec, opts));
        match outcome {
            Ok(res) => {
                branches.push(BranchOutcome { q2, failure: None, sigma: Some(res.sigma()) });
                if best.is_none() {
                    best = Some(res);
                }
            }
            Err(e) => {
                let code = e.failure_code().unwrap_or(FailureCode::NoRealization);
                branches.push(BranchOutcome { q2, failure: Some(code), sigma: None });
                first_failure.get_or_insert(code);
            }
        }
    }
    match best {
        Some(mut res) => {
            res.branches = branches;
            Ok(res)
        }
        None => Err(Error::VerificationFailed(first_failure.unwrap_or(FailureCode::NoRealization))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_derivatives_match_finite_differences() {
        let spec = DesignSpec::origami(4, 0.7, 0.4).unwrap();
        let land = EnergyLandscape::new(spec);
        let x = Coords::new(0.3, -0.1, 0.5);
        let g = land.gradient(&x);
        let h = land.hessian(&x);
        let e = 1e-6;
        for k in 0..3 {
            let mut p = x.to_vector();
            let mut m = x.to_vector();
            p[k] += e;
            m[k] -= e;
            let (xp, xm) = (Coords::from_vector(&p), Coords::from_vector(&m));
            let fd = (land.energy(&xp) - land.energy(&xm)) / (2.0 * e);
            assert!((fd - g[k]).abs() < 1e-7 * (1.0 + g[k].abs()));
            let fdh = (land.gradient(&xp) - land.gradient(&xm)) / (2.0 * e);
            assert!((fdh - h.column(k)).amax() < 1e-6 * (1.0 + h.amax()));
        }
    }

    #[test]
    fn energy_vanishes_at_realizations() {
        let spec = DesignSpec::origami(3, 1.0, 1.0).unwrap();
        let land = EnergyLandscape::new(spec);
        for r in realize(&spec).unwrap().realizations() {
            assert!(land.energy(&r.coords) < 1e-12);
        }
    }

    #[test]
    fn extremal_roots_satisfy_printed_condition() {
        for n in 3..7 {
            let c = Skeleton::new(n).unwrap().cos;
            for q1 in [0.3, 0.5, 1.0, 3.0] {
                for q2 in extremal_q2_candidates(n, q1).unwrap() {
                    assert!(extremal_residual(c, q1, q2).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn straight_factor_is_detected() {
        let spec = DesignSpec::origami(3, 1.0, 1.0).unwrap();
        let sk = spec.skeleton();
        let r = 1.0 / (2.0 * sk.sin);
        let rep = closed_state_check(&Realization::new(spec, Coords::new(0.4, 0.2, r)));
        assert_eq!(rep.kind, Some(ClosedKind::Straight));
        assert!(!rep.is_closed());
    }

    #[test]
    fn snap_pair_n3() {
        let res = snap_pair(3, 0.6, &SaddleOptions::default()).unwrap();
        assert!(res.sigma() > 0.0);
        assert!(res.saddle.gradient_norm < 1e-10);
        assert_eq!(res.saddle.negative_eigenvalues(), 1);
        assert!(res.closed_report.is_closed());
        assert!(res.volume_open != res.volume_closed);
    }
}
