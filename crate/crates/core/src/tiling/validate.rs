use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::Point;

use super::mesh::{Location, Tiling, MIN_AREA};

/// Outcome of checking a tiling for disjointness and conformity.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub degenerate: Vec<usize>,
    pub vertices_outside_disk: Vec<usize>,
    pub overlapping: Vec<(usize, usize)>,
    /// `(vertex, triangle)`: the vertex lies in the triangle without being
    /// one of its corners, so its depth differs between the two.
    pub depth_mismatches: Vec<(usize, usize)>,
    /// Edges shared by more than two triangles.
    pub non_manifold_edges: Vec<(usize, usize)>,
    /// Disk area not covered by triangles.
    pub coverage_defect: f64,
    /// Smallest interior angle in radians.
    pub min_angle: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.degenerate.is_empty()
            && self.vertices_outside_disk.is_empty()
            && self.overlapping.is_empty()
            && self.depth_mismatches.is_empty()
            && self.non_manifold_edges.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.degenerate.is_empty() {
            parts.push(format!("degenerate triangles {:?}", self.degenerate));
        }
        if !self.vertices_outside_disk.is_empty() {
            parts.push(format!(
                "vertices outside disk {:?}",
                self.vertices_outside_disk
            ));
        }
        if !self.overlapping.is_empty() {
            parts.push(format!("overlapping interiors {:?}", self.overlapping));
        }
        if !self.depth_mismatches.is_empty() {
            parts.push(format!(
                "depth mismatch (vertex, triangle) {:?}",
                self.depth_mismatches
            ));
        }
        if !self.non_manifold_edges.is_empty() {
            parts.push(format!(
                "edges with >2 triangles {:?}",
                self.non_manifold_edges
            ));
        }
        if parts.is_empty() {
            "conforming".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Separating-axis test on the six edge normals; touching counts as disjoint.
fn interiors_overlap(a: &[Point; 3], b: &[Point; 3]) -> bool {
    let scale = a.iter().chain(b).map(|p| p.amax()).fold(1.0, f64::max);
    let eps = 1e-12 * scale;
    for tri in [a, b] {
        for i in 0..3 {
            let e = tri[(i + 1) % 3] - tri[i];
            let n = Point::new(-e[1], e[0]);
            let norm = n.norm();
            if norm == 0.0 {
                continue;
            }
            let n = n / norm;
            let (amin, amax) = project(a, &n);
            let (bmin, bmax) = project(b, &n);
            if amax <= bmin + eps || bmax <= amin + eps {
                return false;
            }
        }
    }
    true
}

fn project(t: &[Point; 3], n: &Point) -> (f64, f64) {
    t.iter()
        .map(|p| p.dot(n))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        })
}

fn angles(t: &[Point; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let u = t[(i + 1) % 3] - t[i];
        let v = t[(i + 2) % 3] - t[i];
        *o = u.perp(&v).abs().atan2(u.dot(&v));
    }
    out
}

impl Tiling {
    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        let degenerate: Vec<usize> = (0..n).filter(|&i| self.area(i).abs() < MIN_AREA).collect();
        let vertices_outside_disk = self
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.norm() > 1.0 + 1e-9)
            .map(|(i, _)| i)
            .collect();
        let corners: Vec<[Point; 3]> = (0..n).map(|i| self.corners(i)).collect();
        let mut overlapping = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if interiors_overlap(&corners[i], &corners[j]) {
                    overlapping.push((i, j));
                }
            }
        }
        let mut depth_mismatches = Vec::new();
        for (v, p) in self.vertices().iter().enumerate() {
            for (t, tri) in self.triangles().iter().enumerate() {
                if tri.vertices.contains(&v) {
                    continue;
                }
                match self.classify_in(t, p) {
                    Some(Location::Outside) | None => {}
                    Some(_) => depth_mismatches.push((v, t)),
                }
            }
        }
        let non_manifold_edges = self
            .edges()
            .iter()
            .filter(|(_, ts)| ts.len() > 2)
            .map(|(e, _)| *e)
            .collect();
        let covered: f64 = (0..n).map(|i| self.area(i).abs()).sum();
        let min_angle = corners
            .iter()
            .flat_map(angles)
            .fold(std::f64::consts::PI, f64::min);
        ValidationReport {
            degenerate,
            vertices_outside_disk,
            overlapping,
            depth_mismatches,
            non_manifold_edges,
            coverage_defect: std::f64::consts::PI - covered,
            min_angle,
        }
    }

    /// Validates and wraps the tiling; downstream operations only accept
    /// [`ValidTiling`].
    pub fn validated(self) -> Result<ValidTiling> {
        let report = self.validate();
        if report.is_valid() {
            Ok(ValidTiling {
                tiling: self,
                report,
            })
        } else {
            Err(Error::InvalidTiling(report.summary()))
        }
    }
}

/// A tiling that passed [`Tiling::validate`].
#[derive(Clone, Debug)]
pub struct ValidTiling {
    tiling: Tiling,
    report: ValidationReport,
}

impl ValidTiling {
    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn into_inner(self) -> Tiling {
        self.tiling
    }
}

impl Deref for ValidTiling {
    type Target = Tiling;

    fn deref(&self) -> &Tiling {
        &self.tiling
    }
}
