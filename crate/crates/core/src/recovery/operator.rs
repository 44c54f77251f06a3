use rayon::prelude::*;

use crate::geometry::{GeodesicPath, MetricField};
use crate::linalg::{singular_values, CMatrix};
use crate::tiling::ValidTiling;
use crate::transform::triangle_blocks;
use crate::weight::WeightField;

/// The discretized transform: one block row of height `m` per geodesic and
/// one block column of width `k` per triangle, holding `∫_{γ∩Δ} W dt`.
pub fn assemble_operator(
    metric: &MetricField,
    weight: &WeightField,
    tiling: &ValidTiling,
    plan: &[GeodesicPath],
) -> CMatrix {
    let (k, m) = weight.dims();
    let mut a = CMatrix::zeros(plan.len() * m, tiling.len() * k);
    let rows: Vec<_> = plan
        .par_iter()
        .map(|p| triangle_blocks(metric, weight, tiling, p))
        .collect();
    for (r, blocks) in rows.iter().enumerate() {
        for b in blocks {
            a.view_mut((r * m, b.triangle * k), (m, k))
                .copy_from(&b.matrix);
        }
    }
    a
}

/// Singular values in decreasing order.
pub fn singular_spectrum(operator: &CMatrix) -> Vec<f64> {
    singular_values(operator)
}

/// `σ_min / σ_max`, counting missing singular values of a wide operator as 0.
pub fn spectral_ratio(operator: &CMatrix, spectrum: &[f64]) -> f64 {
    match spectrum.first() {
        Some(&max) if max > 0.0 && spectrum.len() >= operator.ncols() => {
            spectrum[spectrum.len() - 1] / max
        }
        _ => 0.0,
    }
}
