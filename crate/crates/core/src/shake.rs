//! Shakeability: curvature of the snappability along the direction of a
//! normalized infinitesimal flex.

use rayon::prelude::*;

use crate::error::{Error, FailureCode, Result};
use crate::geometry::{DesignSpec, Mesh, Realization};
use crate::singularity::{infinitesimal_flex, solve_shaky_q2, InfinitesimalFlex};
use crate::snap::EnergyLandscape;
use crate::sweep::{grid, with_pool};

/// Squared velocity differences `d1 = |v(B0) - v(D0)|^2`,
/// `d2 = |v(B0) - v(C1)|^2`, `d3 = |v(D0) - v(C1)|^2`.
pub fn velocity_differences(real: &Realization, flex: &InfinitesimalFlex) -> [f64; 3] {
    let n = real.spec.n();
    let vel = flex.velocities(real.spec.skeleton());
    let (b0, c1, d0) = (vel[Mesh::b(n, 0)], vel[Mesh::c(n, 1)], vel[Mesh::d(n, 0)]);
    [(b0 - d0).norm_squared(), (b0 - c1).norm_squared(), (d0 - c1).norm_squared()]
}

/// How the scale of an infinitesimal flex is fixed.
pub trait FlexNormalization: Sync {
    fn id(&self) -> &'static str;
    /// The quantity that must equal 1; it is homogeneous of degree 2 in the
    /// flex, i.e. of degree 1 in `d`.
    fn measure(&self, spec: &DesignSpec, d: [f64; 3]) -> f64;
}

/// The mean over all belt bars of the relative instantaneous change of the
/// squared length equals 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanRelativeChange;

impl FlexNormalization for MeanRelativeChange {
    fn id(&self) -> &'static str {
        "mean-relative-change"
    }

    fn measure(&self, spec: &DesignSpec, d: [f64; 3]) -> f64 {
        let n = spec.n() as f64;
        let q = spec.q123();
        (4.0 * n * d[0] / q[0] + 2.0 * n * d[1] / q[1] + 2.0 * n * d[2] / q[2]) / (8.0 * n)
    }
}

/// Rescale `flex` by the positive factor that makes the normalization
/// measure equal to 1.
pub fn normalize_flex(
    real: &Realization,
    flex: &InfinitesimalFlex,
    norm: &dyn FlexNormalization,
) -> Result<InfinitesimalFlex> {
    let m = norm.measure(&real.spec, velocity_differences(real, flex));
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::ZeroFlex);
    }
    Ok(flex.scaled(1.0 / m.sqrt()))
}

/// Snappability along the curve `S_i(t) = Q_i + t d_i`.
pub fn snappability_along(spec: &DesignSpec, d: [f64; 3], t: f64) -> f64 {
    let q = spec.q123();
    EnergyLandscape::new(*spec).energy_of_lengths([0, 1, 2].map(|k| q[k] + t * d[k]))
}

/// Second derivative at `t = 0` of [`snappability_along`]; the first
/// derivative vanishes there.
pub fn shakeability(spec: &DesignSpec, d: [f64; 3]) -> f64 {
    2.0 * snappability_along(spec, d, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShakeResult {
    pub realization: Realization,
    /// Normalized flex.
    pub flex: InfinitesimalFlex,
    pub d: [f64; 3],
    pub kappa: f64,
    pub normalization: &'static str,
}

impl ShakeResult {
    pub fn spec(&self) -> &DesignSpec {
        &self.realization.spec
    }
}

/// Shakeability of the shaky realization `real`.
pub fn shake_realization(real: &Realization, norm: &dyn FlexNormalization) -> Result<ShakeResult> {
    let flex = normalize_flex(real, &infinitesimal_flex(real, 1.0)?, norm)?;
    let d = velocity_differences(real, &flex);
    Ok(ShakeResult {
        realization: *real,
        flex,
        d,
        kappa: shakeability(&real.spec, d),
        normalization: norm.id(),
    })
}

/// Shakeability of the shaky origami design `(n, Q1)` with the smallest `Q2`.
pub fn shake(n: usize, q1: f64) -> Result<ShakeResult> {
    let design = solve_shaky_q2(n, q1)?;
    shake_realization(&design.realization, &MeanRelativeChange)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShakeRow {
    pub n: usize,
    pub q1: f64,
    pub result: std::result::Result<ShakeResult, FailureCode>,
}

/// Shakeability over the grid `q1_min < Q1 <= q1_max` in steps of `step`.
pub fn sweep_shake(n: usize, q1_min: f64, q1_max: f64, step: f64) -> Result<Vec<ShakeRow>> {
    let q1s = grid(q1_min, q1_max, step)?;
    Ok(with_pool(|| {
        q1s.par_iter()
            .map(|&q1| ShakeRow {
                n,
                q1,
                result: shake(n, q1).map_err(|e| e.failure_code().unwrap_or(FailureCode::NoShakyQ2)),
            })
            .collect()
    }))
}
