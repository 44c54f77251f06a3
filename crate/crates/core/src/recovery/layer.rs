use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{MetricField, SmoothFunction};
use crate::linalg::{least_squares, CMatrix, CVector};
use crate::tiling::{PiecewiseConstantField, ValidTiling};
use crate::transform::{triangle_blocks, TriangleBlock};
use crate::weight::{injectivity_margin, sphere_bundle_samples, WeightField};

use super::foliation::FoliationFunction;
use super::frontier::{order_frontier, Batch};
use super::local::{CONDITION_LIMIT, INJECTIVITY_TOL};
use super::oracle::DataOracle;
use super::plan::{trace_plan, ChordDescriptor};

#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub field: PiecewiseConstantField,
    /// Largest data misfit over the chords used for each triangle.
    pub residuals: Vec<f64>,
    pub batches: Vec<Batch>,
    /// Condition number of each batch solve.
    pub conditions: Vec<f64>,
    /// Number of chords used by each batch solve.
    pub chords_used: Vec<usize>,
    /// Triangles in processing order.
    pub order: Vec<usize>,
}

struct Chord {
    data: Option<CVector>,
    blocks: Vec<TriangleBlock>,
    /// `min φ` along the chord: the leaf it is tangent to.
    depth: f64,
}

/// Layer-stripping reconstruction of a piecewise constant field.
///
/// Batches are processed by decreasing contact level. A chord belongs to the
/// layer between two consecutive batch levels that contains its deepest
/// leaf. It is used for the batch above that layer when it meets at least one
/// batch triangle and otherwise only triangles recovered before; the
/// contributions of the recovered ones are subtracted and the batch values
/// are solved by least squares.
pub fn reconstruct(
    metric: &MetricField,
    weight: &WeightField,
    tiling: &ValidTiling,
    oracle: &DataOracle,
    phi: &FoliationFunction,
    plan: &[ChordDescriptor],
    step: f64,
) -> Result<ReconstructionReport> {
    phi.certify(metric)?;
    let margin = injectivity_margin(metric, weight, &sphere_bundle_samples(metric, 9, 8))?;
    if margin <= INJECTIVITY_TOL {
        return Err(Error::NonInjectiveWeight { margin });
    }
    let (k, m) = weight.dims();
    let paths = trace_plan(metric, plan, step)?;
    let pairs: Vec<_> = plan.iter().copied().zip(paths.iter()).collect();
    let data = oracle.query(metric, tiling, &pairs)?;
    let chords: Vec<Chord> = paths
        .par_iter()
        .zip(data)
        .map(|(path, data)| Chord {
            data,
            blocks: triangle_blocks(metric, weight, tiling, path),
            depth: path
                .samples()
                .iter()
                .map(|s| phi.value(&s.x))
                .fold(f64::INFINITY, f64::min),
        })
        .collect();

    let batches = order_frontier(tiling, phi);
    let mut field = PiecewiseConstantField::zeros(k, tiling.len());
    let mut known = vec![false; tiling.len()];
    let mut residuals = vec![0.0; tiling.len()];
    let mut conditions = Vec::with_capacity(batches.len());
    let mut chords_used = Vec::with_capacity(batches.len());
    let mut order = Vec::with_capacity(tiling.len());

    let floor = phi.min_on_disk();
    for (b, batch) in batches.iter().enumerate() {
        let next = batches.get(b + 1).map_or(floor, |n| n.level);
        let members: BTreeSet<usize> = batch.triangles.iter().copied().collect();
        let column = |tri: usize| batch.triangles.iter().position(|&t| t == tri);
        let admissible: Vec<&Chord> = chords
            .iter()
            .filter(|c| c.data.is_some())
            .filter(|c| c.depth > next && c.depth <= batch.level)
            .filter(|c| c.blocks.iter().any(|blk| members.contains(&blk.triangle)))
            .filter(|c| {
                c.blocks
                    .iter()
                    .all(|blk| known[blk.triangle] || members.contains(&blk.triangle))
            })
            .collect();
        if admissible.is_empty() {
            return Err(Error::Coverage {
                batch: b,
                reason: "no admissible chord".into(),
            });
        }
        let mut met = BTreeSet::new();
        for c in &admissible {
            met.extend(
                c.blocks
                    .iter()
                    .map(|blk| blk.triangle)
                    .filter(|t| members.contains(t)),
            );
        }
        if let Some(missed) = members.difference(&met).next() {
            return Err(Error::Coverage {
                batch: b,
                reason: format!("triangle {missed} is met by no admissible chord"),
            });
        }
        let rows = admissible.len() * m;
        let cols = members.len() * k;
        if rows < cols {
            return Err(Error::Coverage {
                batch: b,
                reason: format!("{rows} equations for {cols} unknowns"),
            });
        }
        let mut a = CMatrix::zeros(rows, cols);
        let mut rhs = CVector::zeros(rows);
        for (r, c) in admissible.iter().enumerate() {
            let mut y = c.data.clone().expect("filtered");
            for blk in &c.blocks {
                match column(blk.triangle) {
                    Some(j) => a.view_mut((r * m, j * k), (m, k)).copy_from(&blk.matrix),
                    None => y -= &blk.matrix * field.value(blk.triangle),
                }
            }
            rhs.rows_mut(r * m, m).copy_from(&y);
        }
        let ls = least_squares(&a, &rhs);
        if !(ls.condition <= CONDITION_LIMIT) {
            return Err(Error::IllPosedStep {
                batch: b,
                condition: ls.condition,
                limit: CONDITION_LIMIT,
            });
        }
        for (j, &tri) in batch.triangles.iter().enumerate() {
            field.set(tri, ls.solution.rows(j * k, k).into_owned());
            known[tri] = true;
            order.push(tri);
        }
        for (r, c) in admissible.iter().enumerate() {
            let misfit = ls.residual.rows(r * m, m).norm();
            for blk in &c.blocks {
                if members.contains(&blk.triangle) {
                    residuals[blk.triangle] = f64::max(residuals[blk.triangle], misfit);
                }
            }
        }
        conditions.push(ls.condition);
        chords_used.push(admissible.len());
    }

    Ok(ReconstructionReport {
        field,
        residuals,
        batches,
        conditions,
        chords_used,
        order,
    })
}
