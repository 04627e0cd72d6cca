//! Hyperbolic-surface geodesic census toolkit.
//!
//! Exact-formula upper half-plane geometry, concrete Fuchsian surface
//! presentations (the Bolza surface with two shipped marked-curve
//! configurations), enumeration of oriented conjugacy classes by translation
//! length, geometric intersection numbers via axis linking in the universal
//! cover, the boundary scattering map with its billiard correspondence, and
//! the count-table / growth-fit / equidistribution analysis layer.
//!
//! The crate is `no_std`-compatible (with `alloc`); all state is immutable
//! and every operation is pure, so everything can be called concurrently.
//! Enumeration entry points expose prefix-subtree variants whose outputs
//! merge deterministically, which is how the companion crate parallelizes.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analyze;
pub mod census;
pub mod error;
pub mod geom;
pub mod intersect;
mod math;
pub mod scatter;
pub mod surface;
pub mod word;

pub use error::Error;
pub use geom::{BoundaryPoint, GeodesicLine, Isometry, PlanePoint};
pub use surface::{CutDecomposition, MarkedCurve, SurfacePresentation};
pub use word::{Letter, Word};
