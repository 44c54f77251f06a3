use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::MetricField;
use crate::linalg::{CVector, Point};

use super::field::PiecewiseConstantField;
use super::mesh::{Tiling, MIN_AREA};

/// An angular sector `[start, end]` of the tangent plane carrying a constant
/// value. Angles are frame angles; `start ∈ [0, 2π)` and `end > start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub start: f64,
    pub end: f64,
    pub value: CVector,
}

impl Sector {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Tangent cones of the triangles at a vertex together with the values the
/// tangent function takes on them. Directions outside every sector carry 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorFan {
    pub vertex: Point,
    pub k: usize,
    pub sectors: Vec<Sector>,
}

impl SectorFan {
    pub fn new(vertex: Point, k: usize, mut sectors: Vec<Sector>) -> Result<Self> {
        for s in &mut sectors {
            if !(s.end > s.start) || s.width() > TAU {
                return Err(Error::Config(format!(
                    "sector [{}, {}] has invalid width",
                    s.start, s.end
                )));
            }
            if s.value.len() != k {
                return Err(Error::Config("sector value has wrong dimension".into()));
            }
            let shift = s.start.rem_euclid(TAU) - s.start;
            s.start += shift;
            s.end += shift;
        }
        sectors.sort_by(|a, b| a.start.total_cmp(&b.start));
        Ok(Self { vertex, k, sectors })
    }

    pub fn total_width(&self) -> f64 {
        self.sectors.iter().map(Sector::width).sum()
    }

    /// Value of the tangent function in direction `angle`.
    pub fn value_at(&self, angle: f64) -> CVector {
        for s in &self.sectors {
            let rel = (angle - s.start).rem_euclid(TAU);
            if rel > 0.0 && rel < s.width() {
                return s.value.clone();
            }
        }
        CVector::zeros(self.k)
    }
}

/// The tangent function of `field` at tiling vertex `vertex`.
pub fn tangent_fan(
    tiling: &Tiling,
    field: &PiecewiseConstantField,
    vertex: usize,
    metric: &MetricField,
) -> Result<SectorFan> {
    if vertex >= tiling.vertices().len() {
        return Err(Error::Config(format!("vertex {vertex} does not exist")));
    }
    if field.len() != tiling.len() {
        return Err(Error::Config(format!(
            "field has {} values for {} triangles",
            field.len(),
            tiling.len()
        )));
    }
    let x = tiling.vertices()[vertex];
    let mut sectors = Vec::new();
    for tri in tiling.incident_triangles(vertex) {
        if tiling.area(tri).abs() < MIN_AREA {
            return Err(Error::DegenerateTriangle(tri));
        }
        let vs = tiling.triangles()[tri].vertices;
        let pos = vs.iter().position(|&v| v == vertex).expect("incident");
        // counter-clockwise orientation: the cone sweeps from the next corner to the one after
        let p = tiling.vertices()[vs[(pos + 1) % 3]] - x;
        let q = tiling.vertices()[vs[(pos + 2) % 3]] - x;
        let start = metric.frame_angle(&x, &p);
        let width = (metric.frame_angle(&x, &q) - start).rem_euclid(TAU);
        sectors.push(Sector {
            start,
            end: start + width,
            value: field.value(tri).clone(),
        });
    }
    SectorFan::new(x, field.k(), sectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn field_of(t: &Tiling) -> PiecewiseConstantField {
        let vals = (0..t.len())
            .map(|i| CVector::from_element(1, C64::new(i as f64 + 1.0, 0.0)))
            .collect();
        PiecewiseConstantField::new(1, vals).unwrap()
    }

    #[test]
    fn four_right_triangles_give_quarter_sectors() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(0.0, 0.5),
            Point::new(-0.5, 0.0),
            Point::new(0.0, -0.5),
        ];
        let t = Tiling::new(v, vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]]).unwrap();
        let fan = tangent_fan(&t, &field_of(&t), 0, &MetricField::euclidean()).unwrap();
        assert_eq!(fan.sectors.len(), 4);
        for s in &fan.sectors {
            assert!((s.width() - FRAC_PI_2).abs() < 1e-12);
        }
        assert!((fan.total_width() - 2.0 * PI).abs() < 1e-9);
        assert_eq!(fan.value_at(0.3)[0].re, 1.0);
        assert_eq!(fan.value_at(PI + 0.3)[0].re, 3.0);
    }

    #[test]
    fn boundary_vertex_single_sector() {
        let theta = 0.4_f64;
        let x = Point::new(1.0, 0.0);
        let a = x + Point::new((PI - theta / 2.0).cos(), (PI - theta / 2.0).sin()) * 0.5;
        let b = x + Point::new((PI + theta / 2.0).cos(), (PI + theta / 2.0).sin()) * 0.5;
        let t = Tiling::new(vec![x, a, b], vec![[0, 1, 2]]).unwrap();
        let fan = tangent_fan(&t, &field_of(&t), 0, &MetricField::euclidean()).unwrap();
        assert_eq!(fan.sectors.len(), 1);
        assert!((fan.sectors[0].width() - theta).abs() < 1e-12);
        assert_eq!(fan.value_at(0.0)[0], C64::new(0.0, 0.0));
        assert_eq!(fan.value_at(PI)[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn conformal_metric_preserves_sector_widths() {
        let t = Tiling::polygon_fan(7, 0.3).unwrap().refine().unwrap();
        let f = field_of(&t);
        let flat = MetricField::euclidean();
        let conf = MetricField::conformal_radial(0.1);
        for v in 0..t.vertices().len() {
            let a = tangent_fan(&t, &f, v, &flat).unwrap();
            let b = tangent_fan(&t, &f, v, &conf).unwrap();
            for (sa, sb) in a.sectors.iter().zip(&b.sectors) {
                assert!((sa.width() - sb.width()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn interior_vertices_have_complete_fans() {
        let t = Tiling::polygon_fan(6, 0.0).unwrap().refine().unwrap();
        let f = field_of(&t);
        for (v, p) in t.vertices().iter().enumerate() {
            if p.norm() < 0.8 {
                let fan = tangent_fan(&t, &f, v, &MetricField::euclidean()).unwrap();
                assert!((fan.total_width() - TAU).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_incident_triangle_is_an_error() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(0.25, 0.0),
        ];
        let t = Tiling::new(v, vec![[0, 1, 2]]).unwrap();
        assert!(matches!(
            tangent_fan(&t, &field_of(&t), 0, &MetricField::euclidean()),
            Err(Error::DegenerateTriangle(0))
        ));
    }
}
