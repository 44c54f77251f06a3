//! Oracles shared by the unit tests.

use crate::geometry::{trace_geodesic, GeodesicPath, MetricField, UnitTangent};
use crate::linalg::Point;

/// Geodesic entering at boundary angle `angle`, turned by `offset` from the
/// inward normal.
pub fn chord(metric: &MetricField, angle: f64, offset: f64, step: f64) -> GeodesicPath {
    let p = Point::new(angle.cos(), angle.sin());
    let start = UnitTangent::from_angle(metric, p, angle + std::f64::consts::PI + offset).unwrap();
    trace_geodesic(metric, &start, step).unwrap()
}

/// Liang–Barsky clipping of a straight segment against a CCW triangle.
pub fn segment_triangle_length(p: Point, d: Point, len: f64, tri: [Point; 3]) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, len);
    for i in 0..3 {
        let e = tri[(i + 1) % 3] - tri[i];
        let inward = Point::new(-e[1], e[0]);
        let num = inward.dot(&(p - tri[i]));
        let den = inward.dot(&d);
        if den.abs() < 1e-300 {
            if num < 0.0 {
                return 0.0;
            }
        } else {
            let t = -num / den;
            if den > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
    }
    (hi - lo).max(0.0)
}
