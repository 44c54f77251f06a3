use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Point;
use nalgebra::Matrix2;

/// Points with `|x| ≤ 1 + DOMAIN_SLACK` count as inside the closed chart disk.
const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFamily {
    Euclidean,
    ConformalRadial,
    ConformalGaussian,
}

impl MetricFamily {
    pub fn name(self) -> &'static str {
        match self {
            MetricFamily::Euclidean => "euclidean",
            MetricFamily::ConformalRadial => "conformal-radial",
            MetricFamily::ConformalGaussian => "conformal-gaussian",
        }
    }
}

/// Log conformal factor `λ`, so that `g = e^{2λ} δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum LogFactor {
    Zero,
    /// `λ = α |x|²`
    Radial {
        alpha: f64,
    },
    /// `λ = a exp(−|x − c|² / (2 s²))`
    Gaussian {
        amplitude: f64,
        center: Point,
        width: f64,
    },
}

/// A conformal metric `g = e^{2λ(x)} δ` on the closed unit disk.
///
/// All families are closed form, so `λ`, its gradient and its Hessian are
/// exact and the Christoffel symbols carry no differentiation error.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    family: MetricFamily,
    params: Vec<f64>,
    factor: LogFactor,
}

/// Christoffel symbols `Γ^i_{jk}` stored as `[i][j][k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel(pub [[[f64; 2]; 2]; 2]);

impl Christoffel {
    /// `Γ^i_{jk} a^j b^k`
    pub fn contract(&self, a: &Point, b: &Point) -> Point {
        let g = &self.0;
        let mut out = Point::zeros();
        for i in 0..2 {
            let mut s = 0.0;
            for j in 0..2 {
                for k in 0..2 {
                    s += g[i][j][k] * a[j] * b[k];
                }
            }
            out[i] = s;
        }
        out
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0[i][j][k]
    }
}

impl MetricField {
    pub fn new(family: MetricFamily, params: &[f64]) -> Result<Self> {
        let bad = |msg: &str| Err(Error::Config(format!("{}: {msg}", family.name())));
        if params.iter().any(|p| !p.is_finite()) {
            return bad("parameters must be finite");
        }
        let factor = match family {
            MetricFamily::Euclidean => {
                if !params.is_empty() {
                    return bad("takes no parameters");
                }
                LogFactor::Zero
            }
            MetricFamily::ConformalRadial => match params {
                [alpha] => LogFactor::Radial { alpha: *alpha },
                _ => return bad("expects [alpha]"),
            },
            MetricFamily::ConformalGaussian => match params {
                [amplitude, cx, cy, width] => {
                    if *width <= 0.0 {
                        return bad("width must be positive");
                    }
                    LogFactor::Gaussian {
                        amplitude: *amplitude,
                        center: Point::new(*cx, *cy),
                        width: *width,
                    }
                }
                _ => return bad("expects [amplitude, cx, cy, width]"),
            },
        };
        Ok(Self {
            family,
            params: params.to_vec(),
            factor,
        })
    }

    pub fn euclidean() -> Self {
        Self::new(MetricFamily::Euclidean, &[]).expect("euclidean metric")
    }

    pub fn conformal_radial(alpha: f64) -> Self {
        Self::new(MetricFamily::ConformalRadial, &[alpha]).expect("finite alpha")
    }

    pub fn family(&self) -> MetricFamily {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.norm() <= 1.0 + DOMAIN_SLACK
    }

    fn check_domain(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { x: x[0], y: x[1] })
        }
    }

    /// `λ(x)`
    pub fn log_factor(&self, x: &Point) -> f64 {
        match self.factor {
            LogFactor::Zero => 0.0,
            LogFactor::Radial { alpha } => alpha * x.norm_squared(),
            LogFactor::Gaussian {
                amplitude,
                center,
                width,
            } => amplitude * (-(x - center).norm_squared() / (2.0 * width * width)).exp(),
        }
    }

    /// `∇λ(x)`
    pub fn log_factor_gradient(&self, x: &Point) -> Point {
        match self.factor {
            LogFactor::Zero => Point::zeros(),
            LogFactor::Radial { alpha } => x * (2.0 * alpha),
            LogFactor::Gaussian { width, center, .. } => {
                let lam = self.log_factor(x);
                (x - center) * (-lam / (width * width))
            }
        }
    }

    /// `∂_i ∂_j λ(x)`
    pub fn log_factor_hessian(&self, x: &Point) -> Matrix2<f64> {
        match self.factor {
            LogFactor::Zero => Matrix2::zeros(),
            LogFactor::Radial { alpha } => Matrix2::identity() * (2.0 * alpha),
            LogFactor::Gaussian { width, center, .. } => {
                let lam = self.log_factor(x);
                let s2 = width * width;
                let d = x - center;
                (d * d.transpose() / (s2 * s2) - Matrix2::identity() / s2) * lam
            }
        }
    }

    /// The metric tensor `g_ij(x)`.
    pub fn tensor(&self, x: &Point) -> Matrix2<f64> {
        Matrix2::identity() * (2.0 * self.log_factor(x)).exp()
    }

    pub fn inner(&self, x: &Point, a: &Point, b: &Point) -> f64 {
        (2.0 * self.log_factor(x)).exp() * a.dot(b)
    }

    pub fn norm(&self, x: &Point, a: &Point) -> f64 {
        self.inner(x, a, a).sqrt()
    }

    /// Christoffel symbols at `x`; errors outside the closed disk.
    pub fn christoffel(&self, x: &Point) -> Result<Christoffel> {
        self.check_domain(x)?;
        Ok(self.christoffel_unchecked(x))
    }

    /// `Γ^i_{jk} = δ^i_j ∂_k λ + δ^i_k ∂_j λ − δ_{jk} ∂_i λ` for `g = e^{2λ} δ`.
    ///
    /// Used inside integrators whose stage points may step just past the
    /// boundary; every family is defined on the whole plane.
    pub(crate) fn christoffel_unchecked(&self, x: &Point) -> Christoffel {
        let d = self.log_factor_gradient(x);
        let mut g = [[[0.0; 2]; 2]; 2];
        for (i, gi) in g.iter_mut().enumerate() {
            for (j, gij) in gi.iter_mut().enumerate() {
                for (k, gijk) in gij.iter_mut().enumerate() {
                    let mut s = 0.0;
                    if i == j {
                        s += d[k];
                    }
                    if i == k {
                        s += d[j];
                    }
                    if j == k {
                        s -= d[i];
                    }
                    *gijk = s;
                }
            }
        }
        Christoffel(g)
    }

    /// Geodesic acceleration `−Γ(v, v)`.
    pub(crate) fn acceleration(&self, x: &Point, v: &Point) -> Point {
        let d = self.log_factor_gradient(x);
        // −(2 (∇λ·v) v − |v|² ∇λ)
        d * v.norm_squared() - v * (2.0 * d.dot(v))
    }

    /// Transport rate `−Γ(v, w)` for a vector `w` carried along velocity `v`.
    pub(crate) fn transport_rate(&self, x: &Point, v: &Point, w: &Point) -> Point {
        let d = self.log_factor_gradient(x);
        // −(v (∇λ·w) + w (∇λ·v) − (v·w) ∇λ)
        d * v.dot(w) - v * d.dot(w) - w * d.dot(v)
    }

    /// Rotates `v` by `+π/2` in a g-orthonormal frame at `x`.
    ///
    /// Every family is conformal, so the coordinate rotation already is the
    /// g-rotation.
    pub fn quarter_turn(&self, _x: &Point, v: &Point) -> Point {
        Point::new(-v[1], v[0])
    }

    /// Angle of `v` in the g-orthonormal frame `e^{−λ} ∂_i` at `x`.
    pub fn frame_angle(&self, _x: &Point, v: &Point) -> f64 {
        v[1].atan2(v[0])
    }

    /// The g-unit vector at `x` with frame angle `angle`.
    pub fn unit_from_angle(&self, x: &Point, angle: f64) -> Point {
        Point::new(angle.cos(), angle.sin()) * (-self.log_factor(x)).exp()
    }

    /// Inward g-unit normal at a boundary point.
    pub fn inward_normal(&self, x: &Point) -> Point {
        let n = -x / x.norm();
        n / self.norm(x, &n)
    }
}

/// A point of the unit sphere bundle: base point plus a g-unit direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitTangent {
    pub point: Point,
    pub direction: Point,
}

impl UnitTangent {
    /// Normalizes `direction` to unit g-length at `point`.
    pub fn new(metric: &MetricField, point: Point, direction: Point) -> Result<Self> {
        metric.check_domain(&point)?;
        let n = metric.norm(&point, &direction);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Config("zero tangent direction".into()));
        }
        Ok(Self {
            point,
            direction: direction / n,
        })
    }

    pub fn from_angle(metric: &MetricField, point: Point, angle: f64) -> Result<Self> {
        metric.check_domain(&point)?;
        Ok(Self {
            point,
            direction: metric.unit_from_angle(&point, angle),
        })
    }

    /// `(x, ν)` for a point on the boundary circle.
    pub fn inward_normal(metric: &MetricField, boundary_point: Point) -> Result<Self> {
        if (boundary_point.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "({}, {}) is not on the boundary circle",
                boundary_point[0], boundary_point[1]
            )));
        }
        Ok(Self {
            point: boundary_point,
            direction: metric.inward_normal(&boundary_point),
        })
    }

    pub fn speed_defect(&self, metric: &MetricField) -> f64 {
        (metric.inner(&self.point, &self.direction, &self.direction) - 1.0).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Christoffels from central differences of `g_ij`, independent of the
    /// conformal formula.
    fn christoffel_fd(metric: &MetricField, x: &Point) -> [[[f64; 2]; 2]; 2] {
        let eps = 1e-5;
        let mut dg = [Matrix2::zeros(); 2];
        for (l, dgl) in dg.iter_mut().enumerate() {
            let mut e = Point::zeros();
            e[l] = eps;
            *dgl = (metric.tensor(&(x + e)) - metric.tensor(&(x - e))) / (2.0 * eps);
        }
        let ginv = metric.tensor(x).try_inverse().unwrap();
        let mut out = [[[0.0; 2]; 2]; 2];
        for (i, oi) in out.iter_mut().enumerate() {
            for j in 0..2 {
                for k in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += 0.5 * ginv[(i, l)] * (dg[k][(l, j)] + dg[j][(l, k)] - dg[l][(j, k)]);
                    }
                    oi[j][k] = s;
                }
            }
        }
        out
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let m = MetricField::euclidean();
        let c = m.christoffel(&Point::new(0.3, 0.1)).unwrap();
        assert!(c.0.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn radial_christoffels_vanish_at_origin() {
        let m = MetricField::conformal_radial(0.1);
        let c = m.christoffel(&Point::zeros()).unwrap();
        assert!(c.0.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn radial_christoffels_match_finite_differences() {
        let m = MetricField::conformal_radial(0.1);
        let x = Point::new(0.5, 0.0);
        let c = m.christoffel(&x).unwrap();
        let fd = christoffel_fd(&m, &x);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_abs_diff_eq!(c.get(i, j, k), fd[i][j][k], epsilon = 1e-8);
                    assert_eq!(c.get(i, j, k), c.get(i, k, j));
                }
            }
        }
        // ∂λ = 2·0.1·(0.5, 0) = (0.1, 0)
        assert_abs_diff_eq!(c.get(0, 0, 0), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(0, 1, 1), -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(1, 0, 1), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let m = MetricField::new(MetricFamily::ConformalGaussian, &[0.3, 0.2, -0.1, 0.4]).unwrap();
        let x = Point::new(-0.35, 0.4);
        let fd = christoffel_fd(&m, &x);
        let c = m.christoffel(&x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_abs_diff_eq!(c.get(i, j, k), fd[i][j][k], epsilon = 1e-8);
                }
            }
        }
        let eps = 1e-5;
        let h = m.log_factor_hessian(&x);
        for j in 0..2 {
            let mut e = Point::zeros();
            e[j] = eps;
            let col =
                (m.log_factor_gradient(&(x + e)) - m.log_factor_gradient(&(x - e))) / (2.0 * eps);
            assert_abs_diff_eq!(h[(0, j)], col[0], epsilon = 1e-8);
            assert_abs_diff_eq!(h[(1, j)], col[1], epsilon = 1e-8);
        }
    }

    #[test]
    fn outside_domain_is_an_error() {
        let m = MetricField::euclidean();
        assert!(matches!(
            m.christoffel(&Point::new(2.0, 0.0)),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn metric_is_positive_definite_on_sampled_disk() {
        let fams = [
            MetricField::euclidean(),
            MetricField::conformal_radial(0.05),
            MetricField::conformal_radial(-0.3),
            MetricField::new(MetricFamily::ConformalGaussian, &[0.5, 0.0, 0.0, 0.3]).unwrap(),
        ];
        for m in &fams {
            for i in 0..21 {
                for j in 0..21 {
                    let x = Point::new(-1.0 + 0.1 * i as f64, -1.0 + 0.1 * j as f64);
                    if x.norm() > 1.0 {
                        continue;
                    }
                    let g = m.tensor(&x);
                    let eig = g.symmetric_eigenvalues();
                    assert!(eig.min() > 0.0);
                }
            }
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(MetricField::new(MetricFamily::ConformalRadial, &[]).is_err());
        assert!(MetricField::new(MetricFamily::Euclidean, &[1.0]).is_err());
        assert!(MetricField::new(MetricFamily::ConformalGaussian, &[1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(MetricField::new(MetricFamily::ConformalRadial, &[f64::NAN]).is_err());
    }

    #[test]
    fn unit_tangent_is_normalized() {
        let m = MetricField::conformal_radial(0.1);
        let t = UnitTangent::new(&m, Point::new(0.3, 0.4), Point::new(2.0, 1.0)).unwrap();
        assert!(t.speed_defect(&m) < 1e-12);
        let n = UnitTangent::inward_normal(&m, Point::new(0.0, 1.0)).unwrap();
        assert!(n.speed_defect(&m) < 1e-12);
        assert!(n.direction[1] < 0.0);
    }
}
