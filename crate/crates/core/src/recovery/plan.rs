use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{trace_geodesic, GeodesicPath, MetricField, SmoothFunction, UnitTangent};
use crate::linalg::Point;
use crate::tiling::Tiling;

use super::foliation::FoliationFunction;
use super::frontier::order_frontier;

/// A maximal geodesic identified by its entry point `(cos a, sin a)` on the
/// boundary circle and the frame angle of its entry direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordDescriptor {
    pub boundary_angle: f64,
    pub direction_angle: f64,
}

impl ChordDescriptor {
    pub fn new(boundary_angle: f64, direction_angle: f64) -> Self {
        Self {
            boundary_angle,
            direction_angle,
        }
    }

    /// Entry at boundary angle `a`, turned by `offset` from the inward normal.
    pub fn from_offset(boundary_angle: f64, offset: f64) -> Self {
        Self::new(boundary_angle, boundary_angle + PI + offset)
    }

    pub fn from_path(metric: &MetricField, path: &GeodesicPath) -> Self {
        let s = path.start();
        Self::new(s.x[1].atan2(s.x[0]), metric.frame_angle(&s.x, &s.v))
    }

    pub fn start(&self, metric: &MetricField) -> Result<UnitTangent> {
        let p = Point::new(self.boundary_angle.cos(), self.boundary_angle.sin());
        UnitTangent::from_angle(metric, p, self.direction_angle)
    }

    pub fn trace(&self, metric: &MetricField, step: f64) -> Result<GeodesicPath> {
        trace_geodesic(metric, &self.start(metric)?, step)
    }

    /// Both angles agree modulo `2π` within `tol`.
    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        let close = |a: f64, b: f64| ((a - b + PI).rem_euclid(TAU) - PI).abs() <= tol;
        close(self.boundary_angle, other.boundary_angle)
            && close(self.direction_angle, other.direction_angle)
    }
}

/// Traces every chord of a plan, in parallel.
pub fn trace_plan(
    metric: &MetricField,
    plan: &[ChordDescriptor],
    step: f64,
) -> Result<Vec<GeodesicPath>> {
    plan.par_iter().map(|c| c.trace(metric, step)).collect()
}

/// Chords tangent to the leaves of a foliation just inside each batch level.
///
/// For a batch at level `t` followed by level `t'`, the tangency levels are
/// `t' + q (t − t')` for every fraction `q`, and on each level the tangency
/// points are `rotations` equally spaced directions around the leaf. A
/// geodesic tangent to the leaf `{φ = s}` stays in `{φ ≥ s}`, so it meets no
/// triangle of a later batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerPlan {
    pub fractions: Vec<f64>,
    pub rotations: usize,
    /// Batches whose chords are left out.
    #[serde(default)]
    pub omit_batches: Vec<usize>,
}

impl Default for LayerPlan {
    fn default() -> Self {
        Self {
            fractions: vec![0.2, 0.4, 0.6, 0.8],
            rotations: 48,
            omit_batches: Vec::new(),
        }
    }
}

impl LayerPlan {
    pub fn check(&self) -> Result<()> {
        if self.fractions.is_empty() || self.rotations == 0 {
            return Err(Error::Config(
                "layer plan needs fractions and rotations".into(),
            ));
        }
        if let Some(q) = self.fractions.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(Error::Config(format!(
                "layer fraction {q} is not in (0, 1)"
            )));
        }
        Ok(())
    }
}

/// Builds the layered plan for `tiling` and `phi`.
pub fn layered_plan(
    metric: &MetricField,
    tiling: &Tiling,
    phi: &FoliationFunction,
    plan: &LayerPlan,
    step: f64,
) -> Result<Vec<ChordDescriptor>> {
    plan.check()?;
    let batches = order_frontier(tiling, phi);
    let floor = phi.min_on_disk();
    let mut starts = Vec::new();
    for (b, batch) in batches.iter().enumerate() {
        if plan.omit_batches.contains(&b) {
            continue;
        }
        let next = batches.get(b + 1).map_or(floor, |n| n.level);
        for (qi, q) in plan.fractions.iter().enumerate() {
            let level = next + q * (batch.level - next);
            let shift = (qi as f64 + 1.0) / (plan.fractions.len() as f64 + 1.0);
            for j in 0..plan.rotations {
                let angle = TAU * (j as f64 + shift) / plan.rotations as f64;
                let p = phi.leaf_point(level, angle);
                if p.norm() >= 1.0 - 1e-9 {
                    continue;
                }
                let g = phi.gradient(&p);
                if g.norm() == 0.0 {
                    continue;
                }
                starts.push(UnitTangent::new(metric, p, metric.quarter_turn(&p, &g))?);
            }
        }
    }
    starts
        .par_iter()
        .map(|s| {
            Ok(ChordDescriptor::from_path(
                metric,
                &trace_geodesic(metric, s, step)?,
            ))
        })
        .collect()
}

/// `sources` equally spaced entry points, each emitting chords at the given
/// offsets from the inward normal.
pub fn fan_beam_plan(sources: usize, offsets: &[f64]) -> Vec<ChordDescriptor> {
    let mut out = Vec::with_capacity(sources * offsets.len());
    for i in 0..sources {
        let a = TAU * i as f64 / sources as f64;
        out.extend(offsets.iter().map(|&o| ChordDescriptor::from_offset(a, o)));
    }
    out
}

/// `count` chords with uniform entry angle and offset in `(−max_offset, max_offset)`.
pub fn random_plan(count: usize, max_offset: f64, seed: u64) -> Vec<ChordDescriptor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.gen_range(0.0..TAU);
            let o = rng.gen_range(-max_offset..max_offset);
            ChordDescriptor::from_offset(a, o)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::frontier::contact_level;
    use crate::tiling::clip_path;
    use approx::assert_abs_diff_eq;

    #[test]
    fn descriptor_round_trip() {
        let m = MetricField::conformal_radial(0.05);
        let c = ChordDescriptor::from_offset(0.7, 0.4);
        let path = c.trace(&m, 1e-2).unwrap();
        let back = ChordDescriptor::from_path(&m, &path);
        assert!(back.matches(&c, 1e-12));
        assert!(c.matches(
            &ChordDescriptor::new(0.7 + TAU, c.direction_angle - TAU),
            1e-12
        ));
    }

    #[test]
    fn layered_chords_stay_outside_their_leaf() {
        for m in [
            MetricField::euclidean(),
            MetricField::conformal_radial(0.05),
        ] {
            let t = Tiling::polygon_fan(6, 0.0).unwrap().refine().unwrap();
            let phi = FoliationFunction::radial_square();
            let plan = LayerPlan {
                fractions: vec![0.5],
                rotations: 12,
                omit_batches: vec![],
            };
            let chords = layered_plan(&m, &t, &phi, &plan, 1e-2).unwrap();
            // levels 0.875, 0.5, 0.125
            assert_eq!(chords.len(), 36);
            for (i, c) in chords.iter().enumerate() {
                let level = [0.875, 0.5, 0.125][i / 12];
                let path = c.trace(&m, 1e-2).unwrap();
                let lowest = path
                    .samples()
                    .iter()
                    .map(|s| phi.value(&s.x))
                    .fold(f64::INFINITY, f64::min);
                assert!(lowest >= level - 1e-6, "{lowest} < {level}");
                assert_abs_diff_eq!(lowest, level, epsilon = 1e-3);
                for (tri, _) in clip_path(&t, &path).triangle_intervals() {
                    assert!(contact_level(&t, &phi, tri) > level);
                }
            }
        }
    }

    #[test]
    fn omitted_batches_have_no_chords() {
        let m = MetricField::euclidean();
        let t = Tiling::polygon_fan(6, 0.0).unwrap().refine().unwrap();
        let phi = FoliationFunction::radial_square();
        let plan = LayerPlan {
            fractions: vec![0.3, 0.6],
            rotations: 10,
            omit_batches: vec![1],
        };
        assert_eq!(layered_plan(&m, &t, &phi, &plan, 1e-2).unwrap().len(), 40);
        let bad = LayerPlan {
            fractions: vec![1.0],
            ..plan
        };
        assert!(layered_plan(&m, &t, &phi, &bad, 1e-2).is_err());
    }

    #[test]
    fn generated_plans_have_requested_size() {
        assert_eq!(fan_beam_plan(20, &[-0.5, 0.0, 0.5]).len(), 60);
        let r = random_plan(50, 1.4, 3);
        assert_eq!(r.len(), 50);
        assert_eq!(r, random_plan(50, 1.4, 3));
    }
}
