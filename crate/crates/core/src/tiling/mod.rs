//! Conforming triangulations of the disk and piecewise constant fields on them.

mod clip;
mod fan;
mod field;
mod mesh;
mod validate;

pub use clip::{clip_path, ClipInterval, ClipResult, Region, TANGENCY_WARNING_LENGTH};
pub use fan::{tangent_fan, Sector, SectorFan};
pub use field::PiecewiseConstantField;
pub use mesh::{Location, Tiling, Triangle, BARYCENTRIC_TOL};
pub use validate::{ValidTiling, ValidationReport};
