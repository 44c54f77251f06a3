use nalgebra::Matrix2;

use crate::linalg::Point;

use super::metric::MetricField;

/// A scalar function with closed-form first and second derivatives.
pub trait SmoothFunction {
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Point;
    fn hessian(&self, x: &Point) -> Matrix2<f64>;
}

/// Covariant Hessian `∇²φ_ij = ∂_ij φ − Γ^k_ij ∂_k φ` in coordinates.
pub fn covariant_hessian<F: SmoothFunction + ?Sized>(
    metric: &MetricField,
    phi: &F,
    x: &Point,
) -> Matrix2<f64> {
    let gamma = metric.christoffel_unchecked(x);
    let grad = phi.gradient(x);
    let mut h = phi.hessian(x);
    for i in 0..2 {
        for j in 0..2 {
            h[(i, j)] -= gamma.get(0, i, j) * grad[0] + gamma.get(1, i, j) * grad[1];
        }
    }
    h
}

/// Grid points `(−1 + 2i/(n−1), −1 + 2j/(n−1))` that lie in the closed disk.
pub fn disk_grid(n: usize) -> Vec<Point> {
    let n = n.max(2);
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = Point::new(
                -1.0 + 2.0 * i as f64 / (n - 1) as f64,
                -1.0 + 2.0 * j as f64 / (n - 1) as f64,
            );
            if x.norm() <= 1.0 {
                pts.push(x);
            }
        }
    }
    pts
}

/// Minimum over `region` of the smallest eigenvalue of `∇²φ`, measured in a
/// g-orthonormal frame. A positive value certifies strict convexity at the
/// sampled resolution.
pub fn convexity_margin<F: SmoothFunction + ?Sized>(
    metric: &MetricField,
    phi: &F,
    region: &[Point],
) -> f64 {
    region
        .iter()
        .map(|x| {
            let scale = (-2.0 * metric.log_factor(x)).exp();
            let h = covariant_hessian(metric, phi, x) * scale;
            smallest_symmetric_eigenvalue(&h)
        })
        .fold(f64::INFINITY, f64::min)
}

fn smallest_symmetric_eigenvalue(h: &Matrix2<f64>) -> f64 {
    let a = h[(0, 0)];
    let d = h[(1, 1)];
    let b = 0.5 * (h[(0, 1)] + h[(1, 0)]);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    mean - radius
}
