//! Intrinsic geometry on closed convex polyhedral surfaces.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximation;
pub mod chart;
pub mod dc;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod geodesic;
pub mod geom;
pub mod hull;
pub mod levelset;
pub mod mesh;
pub mod off;
pub mod svg;

pub use error::{Error, Result};
pub use exec::Exec;
pub use geom::{Vec2, Vec3};
pub use mesh::{validate_convex, ConvexSurfaceMesh, ConvexityReport, SurfacePoint};
pub use off::load_mesh;
