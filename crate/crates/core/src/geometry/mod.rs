//! Riemannian geometry of the unit disk: metrics, geodesics, transport and
//! convexity checks.

mod convexity;
mod geodesic;
mod metric;

pub use convexity::{convexity_margin, covariant_hessian, disk_grid, SmoothFunction};
pub use geodesic::{
    integrate_frame, parallel_transport, trace_geodesic, trace_to_exit, FrameState, GeodesicPath,
    PathSample, BOUNDARY_TOL, TRAPPING_CAP,
};
pub use metric::{Christoffel, MetricFamily, MetricField, UnitTangent};
