//! Geometry defined by a world function alone.
//!
//! The crate evaluates the world function `sigma(P, Q)` of a geometry and
//! builds everything else from it: scalar products, Gram determinants, the
//! Euclideaness conditions, skeleton-envelope objects and a chain simulator
//! for a distorted space-time.

pub mod checker;
pub mod envelope;
pub mod error;
pub mod sigma_algebra;
pub mod solve;
pub mod spacetime;
pub mod worldfunc;

pub use error::{Error, Result};
pub use sigma_algebra::{PointVector, Skeleton};
pub use worldfunc::{Distance, Geometry, Point, WorldFunction};
