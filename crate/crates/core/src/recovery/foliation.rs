use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convexity_margin, disk_grid, MetricField, SmoothFunction};
use crate::linalg::Point;

/// Grid resolution used to certify a foliation before a reconstruction.
pub const CERTIFICATION_GRID: usize = 41;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoliationFamily {
    /// `φ(x) = |x|²`
    RadialSquare,
    /// `φ(x) = |x − c|²`
    OffsetRadial,
}

impl FoliationFamily {
    pub fn name(self) -> &'static str {
        match self {
            FoliationFamily::RadialSquare => "radial-square",
            FoliationFamily::OffsetRadial => "offset-radial",
        }
    }
}

/// A strictly convex exhaustion function whose superlevel sets `{φ ≥ c}`
/// sweep the disk from the boundary inwards.
#[derive(Clone, Debug, PartialEq)]
pub struct FoliationFunction {
    family: FoliationFamily,
    center: Point,
}

impl FoliationFunction {
    pub fn new(family: FoliationFamily, params: &[f64]) -> Result<Self> {
        let center = match (family, params) {
            (FoliationFamily::RadialSquare, []) => Point::zeros(),
            (FoliationFamily::OffsetRadial, [cx, cy]) if cx.is_finite() && cy.is_finite() => {
                Point::new(*cx, *cy)
            }
            _ => {
                return Err(Error::Config(format!(
                    "foliation {} does not take parameters {params:?}",
                    family.name()
                )))
            }
        };
        Ok(Self { family, center })
    }

    pub fn radial_square() -> Self {
        Self {
            family: FoliationFamily::RadialSquare,
            center: Point::zeros(),
        }
    }

    pub fn family(&self) -> FoliationFamily {
        self.family
    }

    pub fn center(&self) -> Point {
        self.center
    }

    /// `min φ` over the closed unit disk.
    pub fn min_on_disk(&self) -> f64 {
        let r = self.center.norm();
        if r <= 1.0 {
            0.0
        } else {
            (r - 1.0) * (r - 1.0)
        }
    }

    /// The point of the leaf `{φ = level}` in direction `angle` from the center.
    pub fn leaf_point(&self, level: f64, angle: f64) -> Point {
        self.center + Point::new(angle.cos(), angle.sin()) * level.max(0.0).sqrt()
    }

    /// Checks strict convexity on a disk grid and returns the margin.
    pub fn certify(&self, metric: &MetricField) -> Result<f64> {
        let margin = convexity_margin(metric, self, &disk_grid(CERTIFICATION_GRID));
        if margin > 0.0 {
            Ok(margin)
        } else {
            Err(Error::NotConvex { margin })
        }
    }
}

impl SmoothFunction for FoliationFunction {
    fn value(&self, x: &Point) -> f64 {
        (x - self.center).norm_squared()
    }

    fn gradient(&self, x: &Point) -> Point {
        (x - self.center) * 2.0
    }

    fn hessian(&self, _x: &Point) -> Matrix2<f64> {
        Matrix2::identity() * 2.0
    }
}
