use crate::geometry::SmoothFunction;
use crate::tiling::Tiling;

use super::foliation::FoliationFunction;

/// Levels closer than this are treated as the same leaf.
pub const LEVEL_TIE_TOL: f64 = 1e-9;

/// Triangles first met by the same leaf `{φ = level}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub level: f64,
    pub triangles: Vec<usize>,
}

/// `max φ` over a triangle. A convex function attains its maximum over a
/// triangle at a vertex.
pub fn contact_level(tiling: &Tiling, phi: &FoliationFunction, tri: usize) -> f64 {
    tiling
        .corners(tri)
        .iter()
        .map(|p| phi.value(p))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Groups the triangles by decreasing contact level: the order in which the
/// sweep `{φ ≥ c}`, `c` decreasing, reaches them.
pub fn order_frontier(tiling: &Tiling, phi: &FoliationFunction) -> Vec<Batch> {
    let mut levels: Vec<(f64, usize)> = (0..tiling.len())
        .map(|t| (contact_level(tiling, phi, t), t))
        .collect();
    levels.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut batches: Vec<Batch> = Vec::new();
    for (level, tri) in levels {
        match batches.last_mut() {
            Some(b) if b.level - level <= LEVEL_TIE_TOL => b.triangles.push(tri),
            _ => batches.push(Batch {
                level,
                triangles: vec![tri],
            }),
        }
    }
    batches
}
