//! Enumeration of the symmetric realizations of a design.
//!
//! Subtracting and adding the equations for `S1` and `S2` gives
//! `4Hh = P(r)` and `H^2 + h^2 = K(r)`, while `S3` fixes `h^2(r)`. Eliminating
//! `H` leaves the quartic `P^2 + 16 h^4 - 16 h^2 K = 0` in `r`; each admissible
//! root (with `h^2 >= 0`) lifts back to one shape up to the mirror `z -> -z`.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{
    squared_edge_length_jacobian, squared_edge_lengths, Coords, DesignSpec, Realization, Skeleton,
};
use crate::poly::{quartic_discriminant_normalized, Poly};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Simple,
    /// Two roots of the quartic coincide; the realization is shaky.
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub realization: Realization,
    pub multiplicity: Multiplicity,
    /// Largest absolute residual of the three realization equations.
    pub residual: f64,
    /// Some belt or cap face has (numerically) zero area.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationSet {
    pub spec: DesignSpec,
    /// Canonical shapes ordered by increasing `r`.
    pub solutions: Vec<Solution>,
    /// Normalized discriminant of the quartic in `r`.
    pub discriminant: f64,
}

impl RealizationSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn realizations(&self) -> impl Iterator<Item = Realization> + '_ {
        self.solutions.iter().map(|s| s.realization)
    }
}

/// The polynomials of the elimination.
#[derive(Debug, Clone)]
pub struct RQuartic {
    /// `P(r) = Q2 - Q1 + 2Rr(1 - c)`, equal to `4Hh`.
    pub p: Poly,
    /// `h^2(r) = (Q3 - 2(1 - c) r^2) / 4`.
    pub h2: Poly,
    /// `K(r) = (Q1 + Q2)/2 - R^2 - r^2 + Rr(1 + c)`, equal to `H^2 + h^2`.
    pub k: Poly,
    pub quartic: Poly,
}

impl RQuartic {
    pub fn new(sk: &Skeleton, q: [f64; 3]) -> Self {
        let (c, rad) = (sk.cos, sk.radius);
        let [q1, q2, q3] = q;
        let p = Poly::new(vec![q2 - q1, 2.0 * rad * (1.0 - c)]);
        let h2 = Poly::new(vec![q3 / 4.0, 0.0, -(1.0 - c) / 2.0]);
        let k = Poly::new(vec![(q1 + q2) / 2.0 - rad * rad, rad * (1.0 + c), -1.0]);
        let quartic = &(&(&p * &p) + &(&h2 * &h2).scale(16.0)) - &(&h2 * &k).scale(16.0);
        RQuartic { p, h2, k, quartic }
    }

    pub fn descending(&self) -> [f64; 5] {
        let mut d = self.quartic.descending();
        d.resize(5, 0.0);
        d.try_into().expect("five coefficients")
    }
}

/// Coefficients of the quartic in `r`, highest degree first.
pub fn r_quartic_coefficients(spec: &DesignSpec) -> [f64; 5] {
    RQuartic::new(spec.skeleton(), spec.q123()).descending()
}

/// Normalized discriminant of the quartic in `r` for squared lengths `q`.
pub fn r_quartic_discriminant(sk: &Skeleton, q: [f64; 3]) -> f64 {
    quartic_discriminant_normalized(RQuartic::new(sk, q).descending())
}

fn residual_norm(sk: &Skeleton, q: [f64; 3], x: &Coords) -> f64 {
    let s = squared_edge_lengths(sk, x);
    (0..3).fold(0.0_f64, |m, k| m.max((q[k] - s[k]).abs()))
}

/// Newton refinement of `S(x) = q`, accepting only improving steps.
pub fn polish(sk: &Skeleton, q: [f64; 3], mut x: Coords) -> Coords {
    let mut best = residual_norm(sk, q, &x);
    for _ in 0..20 {
        if best < 1e-15 {
            break;
        }
        let s = squared_edge_lengths(sk, &x);
        let f = Vector3::new(s[0] - q[0], s[1] - q[1], s[2] - q[2]);
        let j: Matrix3<f64> = squared_edge_length_jacobian(sk, &x);
        let Some(step) = j.lu().solve(&f) else { break };
        let next = Coords::from_vector(&(x.to_vector() - step));
        let r = residual_norm(sk, q, &next);
        if !(r < best) {
            break;
        }
        x = next;
        best = r;
    }
    x
}

/// All symmetric realizations of `spec`.
pub fn realize(spec: &DesignSpec) -> Result<RealizationSet> {
    let sk = spec.skeleton();
    let q = spec.q123();
    let rq = RQuartic::new(sk, q);
    let discriminant = quartic_discriminant_normalized(rq.descending());

    let mut roots: Vec<f64> = rq
        .quartic
        .complex_roots()
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-5 * (1.0 + z.re.abs()))
        .map(|z| rq.quartic.polish(z.re))
        .collect();
    roots.sort_by(f64::total_cmp);

    // merge coincident roots
    let mut merged: Vec<(f64, Multiplicity)> = Vec::new();
    for r in roots {
        match merged.last_mut() {
            Some((prev, mult)) if (r - *prev).abs() < 1e-6 * (1.0 + r.abs()) => {
                *prev = 0.5 * (*prev + r);
                *mult = Multiplicity::Double;
            }
            _ => merged.push((r, Multiplicity::Simple)),
        }
    }

    let mut solutions: Vec<Solution> = Vec::new();
    for (r, multiplicity) in merged {
        let h2 = rq.h2.eval(r);
        let scale = q[2].max(1e-300);
        let seed = if h2 > 1e-14 * scale {
            let h = h2.sqrt();
            Coords::new(rq.p.eval(r) / (4.0 * h), h, r)
        } else if h2 > -1e-10 * scale {
            // waist in the equatorial plane
            let k = rq.k.eval(r);
            if k < -1e-10 {
                continue;
            }
            Coords::new(k.max(0.0).sqrt(), 0.0, r)
        } else {
            continue;
        };
        let x = polish(sk, q, seed).canonical();
        let residual = residual_norm(sk, q, &x);
        if !(residual < tol::RESIDUAL) {
            continue;
        }
        if solutions.iter().any(|s| s.realization.coords.distance(&x) < 1e-7) {
            continue;
        }
        let realization = Realization::new(*spec, x);
        let mesh = realization.mesh();
        let degenerate = (0..mesh.faces.len()).any(|f| mesh.face_area(f) < tol::GEOMETRY);
        solutions.push(Solution { realization, multiplicity, residual, degenerate });
    }

    if solutions.is_empty() {
        return Err(Error::EmptySet);
    }
    solutions.sort_by(|a, b| a.realization.coords.waist_r.total_cmp(&b.realization.coords.waist_r));
    Ok(RealizationSet { spec: *spec, solutions, discriminant })
}
