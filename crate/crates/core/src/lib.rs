//! Matrix-weighted geodesic X-ray transform on the Riemannian unit disk.
//!
//! The crate covers the whole pipeline for piecewise constant, vector-valued
//! functions on a triangulated disk:
//!
//! * [`geometry`]: conformal metric families, geodesic tracing, parallel
//!   transport and convexity certificates.
//! * [`tiling`]: conforming triangulations, point location, tangent fans at
//!   vertices and clipping of geodesics against triangles.
//! * [`weight`]: continuous matrix weights `W(x, v)` and their injectivity margin.
//! * [`transform`]: the forward transform, the boundary fan family `γ_v^h`
//!   and its tangent-plane limit.
//! * [`recovery`]: local sector-value recovery, layer-stripping
//!   reconstruction along a convex foliation and operator spectra.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod recovery;
pub mod tiling;
pub mod transform;
pub mod weight;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use geometry::{
    convexity_margin, parallel_transport, trace_geodesic, GeodesicPath, MetricFamily, MetricField,
    PathSample, UnitTangent,
};
pub use linalg::{CMatrix, CVector, Point, C64};
pub use recovery::{
    assemble_operator, order_frontier, reconstruct, recover_fan_values, singular_spectrum,
    ChordDescriptor, DataOracle, FoliationFamily, FoliationFunction, LayerPlan,
    ReconstructionReport,
};
pub use tiling::{
    clip_path, tangent_fan, Location, PiecewiseConstantField, SectorFan, Tiling, ValidTiling,
    ValidationReport,
};
pub use transform::{
    fan_geodesic, forward, frozen_limit, scaled_fan_integral, tangent_line_integral, FanGeodesic,
};
pub use weight::{injectivity_margin, WeightField};
