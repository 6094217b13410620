//! Adaptive ratio-of-uniforms sampling.
//!
//! A uniform point `(v, u)` of `A_ρ = {0 ≤ u ≤ p(v/u^ρ)^{1/(ρ+1)}}` maps to a
//! draw `x = v/u^ρ` from `p`. The region is covered by triangles with apex at
//! the origin, one per angular cone, each containing the circle sector whose
//! radius bounds the region inside the cone.

mod cover;
mod geometry;
mod rectangle;
mod sampler;

pub use cover::{TriangleCover, COVERAGE_SLACK};
pub use geometry::{
    build_triangle, cone_radius, sample_uniform_triangle, triangle_point, Point2, Triangle, MIN_APERTURE,
};
pub use rectangle::{bounding_rectangle, RectangleSampler};
pub use sampler::{
    adaptive_rou_sample, probe_abscissae, rou_accept, rou_accept_standard, RegionDump, RouSampler,
};
