//! Origami-like sandglass quasi-mechanisms on antiprismatic skeletons.
//!
//! A sandglass is a closed triangulated surface: two regular unit-sided
//! `n`-gons joined by a belt of `6n` triangles through a waist. This crate
//! computes its symmetric realizations, the origami condition and crease
//! patterns, shaky (infinitesimally flexible) designs, the snappability of
//! snapping pairs and the shakeability of shaky ones, and runs the sweeps
//! that chart them.
//!
//! ```
//! use sandglass::snap::{snap_pair, SaddleOptions};
//!
//! let res = snap_pair(4, 0.67, &SaddleOptions::default()).unwrap();
//! assert!(res.sigma() > 1e-5);
//! ```

pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod poly;
pub mod realize;
pub mod tol;
pub mod origami;
pub mod singularity;
pub mod snap;
pub mod shake;
pub mod sweep;

pub use error::{Error, FailureCode, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/designs.md")]
    mod designs {}
    #[doc = include_str!("../../../book/src/origami.md")]
    mod origami {}
    #[doc = include_str!("../../../book/src/snapping.md")]
    mod snapping {}
    #[doc = include_str!("../../../book/src/shaky.md")]
    mod shaky {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
