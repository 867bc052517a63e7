//! Oracles shared by several test targets.
#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sandglass::geometry::{squared_edge_lengths, Coords, DesignSpec, Skeleton};
use sandglass::origami::origami_q3;

/// Newton on the raw equations with a finite-difference Jacobian.
pub fn newton(sk: &Skeleton, q: [f64; 3], mut x: Vector3<f64>) -> Vector3<f64> {
    let f = |x: &Vector3<f64>| {
        let s = squared_edge_lengths(sk, &Coords::from_vector(x));
        Vector3::new(s[0] - q[0], s[1] - q[1], s[2] - q[2])
    };
    for _ in 0..50 {
        let fx = f(&x);
        if fx.amax() < 1e-15 {
            break;
        }
        let mut j = Matrix3::zeros();
        for k in 0..3 {
            let mut e = Vector3::zeros();
            e[k] = 1e-7;
            j.set_column(k, &((f(&(x + e)) - f(&(x - e))) / 2e-7));
        }
        match j.lu().solve(&fx) {
            Some(dx) => x -= dx,
            None => break,
        }
    }
    x
}

/// Realizations found by scanning the ellipse `S3 = Q3` in the `(r, h)`
/// plane by angle; `H` follows from `S1 - S2 = 2Rr(1 - c) - 4Hh` and sign
/// changes of `S2 - Q2` are bisected and polished.
pub fn scan_realizations(spec: &DesignSpec) -> Vec<Coords> {
    let sk = spec.skeleton();
    let q = spec.q123();
    let (c, rad) = (sk.cos, sk.radius);
    let (ar, ah) = ((q[2] / (2.0 * (1.0 - c))).sqrt(), q[2].sqrt() / 2.0);
    let point = |psi: f64| {
        let (r, h) = (ar * psi.cos(), ah * psi.sin());
        let big_h = (q[1] - q[0] + 2.0 * rad * r * (1.0 - c)) / (4.0 * h);
        Coords::new(big_h, h, r)
    };
    let g = |psi: f64| squared_edge_lengths(sk, &point(psi))[1] - q[1];
    let steps = 200_000;
    let tau = std::f64::consts::TAU;
    let mut found: Vec<Coords> = Vec::new();
    for k in 0..steps {
        let (a, b) = (tau * k as f64 / steps as f64, tau * (k + 1) as f64 / steps as f64);
        let (fa, fb) = (g(a), g(b));
        if !(fa.is_finite() && fb.is_finite()) || (fa.signum() == fb.signum() && fa != 0.0) {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (a, b, fa);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let fm = g(mid);
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let x = Coords::from_vector(&newton(sk, q, point(0.5 * (lo + hi)).to_vector())).canonical();
        let s = squared_edge_lengths(sk, &x);
        if (0..3).all(|k| (s[k] - q[k]).abs() < 1e-10) && !found.iter().any(|y| y.distance(&x) < 1e-7) {
            found.push(x);
        }
    }
    found.sort_by(|a, b| a.waist_r.total_cmp(&b.waist_r));
    found
}

pub fn random_spec(rng: &mut ChaCha8Rng) -> DesignSpec {
    loop {
        let n = rng.gen_range(3..=6);
        let q1 = rng.gen_range(0.3..3.0);
        let q2 = rng.gen_range(0.1..3.0);
        let q3 = if rng.gen_bool(0.5) { origami_q3(q1, q2).unwrap_or(-1.0) } else { rng.gen_range(0.1..3.0) };
        if let Ok(spec) = DesignSpec::sandglass(n, q1, q2, q3) {
            return spec;
        }
    }
}

