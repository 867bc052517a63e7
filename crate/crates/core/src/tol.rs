//! Numerical tolerances shared across the crate.

/// Geometric equality of lengths and coordinates.
pub const GEOMETRY: f64 = 1e-12;
/// Residual of the realization equations.
pub const RESIDUAL: f64 = 1e-9;
/// Default distance tolerance for self-intersection tests.
pub const INTERSECTION_EPS: f64 = 1e-8;
/// Singular-value threshold for rank decisions on row-normalized matrices.
pub const RANK: f64 = 1e-7;
/// Normalized discriminant below which a quartic is treated as having a
/// double root.
pub const DOUBLE_ROOT: f64 = 1e-10;
/// Normalized discriminant accepted at a snapping saddle.
pub const SADDLE_SHAKY: f64 = 1e-6;
/// Angular tolerance for folded-flat and straight dihedrals.
pub const DIHEDRAL: f64 = 1e-6;
/// Coplanarity of the closed state, both for the tetrahedron volume and
/// the vanishing factor.
pub const CLOSED_STATE: f64 = 1e-9;
