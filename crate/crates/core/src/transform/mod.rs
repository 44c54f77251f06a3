//! The weighted transform `I_W f`, the boundary fan family `γ_v^h` and the
//! tangent-plane functional it converges to.

mod fan;
mod forward;

pub use fan::{
    fan_geodesic, frozen_limit, scaled_fan_integral, sector_chord_length, tangent_line_integral,
    FanGeodesic, TangentLine, CUT_TOL,
};
pub use forward::{forward, triangle_blocks, TriangleBlock};
