//! Continuous matrix weights `W(x, v) ∈ Lin(ℂ^k, ℂ^m)`.

use crate::error::{Error, Result};
use crate::geometry::{disk_grid, trace_to_exit, GeodesicPath, MetricField, UnitTangent};
use crate::linalg::{smallest_singular_value, CMatrix, Point, C64};

/// Step used when a weight has to trace a geodesic to evaluate itself at a
/// single point of the sphere bundle.
pub const POINT_EVALUATION_STEP: f64 = 1e-3;

/// Attenuation coefficient `a(x) ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum AttenuationCoefficient {
    Constant(f64),
    /// `strength · exp(−|x − center|² / (2 width²))`
    Gaussian {
        strength: f64,
        center: Point,
        width: f64,
    },
}

impl AttenuationCoefficient {
    pub fn at(&self, x: &Point) -> f64 {
        match self {
            AttenuationCoefficient::Constant(a) => *a,
            AttenuationCoefficient::Gaussian {
                strength,
                center,
                width,
            } => strength * (-(x - center).norm_squared() / (2.0 * width * width)).exp(),
        }
    }

    /// Upper bound of `a` on the disk.
    pub fn sup(&self) -> f64 {
        match self {
            AttenuationCoefficient::Constant(a) => *a,
            AttenuationCoefficient::Gaussian { strength, .. } => strength.max(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightField {
    /// `I_k`
    Identity { k: usize },
    /// The same `m × k` matrix everywhere.
    Constant { matrix: CMatrix },
    /// Scalar `exp(−∫_0^{τ(x,v)} a(γ_{x,v}(s)) ds)`: attenuation along the
    /// remaining geodesic up to its exit point.
    Attenuation { coefficient: AttenuationCoefficient },
    /// `I_k + ε U(n θ(v) + κ |x|²)` with `U` unitary: 2×2 rotation blocks and
    /// a trailing `e^{iφ}` when `k` is odd.
    Angular {
        k: usize,
        order: f64,
        amplitude: f64,
        spatial: f64,
    },
    /// `left · inner(x, v)`
    Product {
        left: CMatrix,
        inner: Box<WeightField>,
    },
}

impl WeightField {
    pub fn identity(k: usize) -> Self {
        WeightField::Identity { k }
    }

    pub fn constant(matrix: CMatrix) -> Self {
        WeightField::Constant { matrix }
    }

    /// `(k, m)`: input and output dimensions.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            WeightField::Identity { k } => (*k, *k),
            WeightField::Constant { matrix } => (matrix.ncols(), matrix.nrows()),
            WeightField::Attenuation { .. } => (1, 1),
            WeightField::Angular { k, .. } => (*k, *k),
            WeightField::Product { left, inner } => (inner.dims().0, left.nrows()),
        }
    }

    /// Checks internal consistency and the dimensions a scene expects.
    pub fn check(&self, k: usize, m: Option<usize>) -> Result<()> {
        self.check_internal()?;
        let (wk, wm) = self.dims();
        if wk != k {
            return Err(Error::Config(format!(
                "weight acts on ℂ^{wk} but the field has k = {k}"
            )));
        }
        if let Some(m) = m {
            if m != wm {
                return Err(Error::Config(format!(
                    "weight maps into ℂ^{wm} but m = {m} was declared"
                )));
            }
        }
        Ok(())
    }

    fn check_internal(&self) -> Result<()> {
        match self {
            WeightField::Identity { k } | WeightField::Angular { k, .. } if *k == 0 => {
                Err(Error::Config("weight dimension must be positive".into()))
            }
            WeightField::Constant { matrix } if matrix.is_empty() => {
                Err(Error::Config("constant weight matrix is empty".into()))
            }
            WeightField::Attenuation {
                coefficient: AttenuationCoefficient::Gaussian { width, .. },
            } if *width <= 0.0 => Err(Error::Config("attenuation width must be positive".into())),
            WeightField::Product { left, inner } => {
                inner.check_internal()?;
                if left.ncols() != inner.dims().1 {
                    Err(Error::Config(format!(
                        "product weight: left factor has {} columns, inner weight has {} rows",
                        left.ncols(),
                        inner.dims().1
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn attenuation(&self) -> Option<&AttenuationCoefficient> {
        match self {
            WeightField::Attenuation { coefficient } => Some(coefficient),
            WeightField::Product { inner, .. } => inner.attenuation(),
            _ => None,
        }
    }

    /// Evaluation given the attenuation exponent `∫ a` along the rest of the
    /// geodesic (ignored by the local families).
    fn eval_with(&self, metric: &MetricField, x: &Point, v: &Point, exponent: f64) -> CMatrix {
        match self {
            WeightField::Identity { k } => CMatrix::identity(*k, *k),
            WeightField::Constant { matrix } => matrix.clone(),
            WeightField::Attenuation { .. } => {
                CMatrix::from_element(1, 1, C64::new((-exponent).exp(), 0.0))
            }
            WeightField::Angular {
                k,
                order,
                amplitude,
                spatial,
            } => {
                let phase = order * metric.frame_angle(x, v) + spatial * x.norm_squared();
                let mut w = CMatrix::identity(*k, *k);
                let (s, c) = phase.sin_cos();
                let mut i = 0;
                while i + 1 < *k {
                    w[(i, i)] += C64::new(amplitude * c, 0.0);
                    w[(i, i + 1)] += C64::new(-amplitude * s, 0.0);
                    w[(i + 1, i)] += C64::new(amplitude * s, 0.0);
                    w[(i + 1, i + 1)] += C64::new(amplitude * c, 0.0);
                    i += 2;
                }
                if i < *k {
                    w[(i, i)] += C64::from_polar(*amplitude, phase);
                }
                w
            }
            WeightField::Product { left, inner } => left * inner.eval_with(metric, x, v, exponent),
        }
    }

    /// `W(x, v)`. The attenuation family traces `γ_{x,v}` to its exit point.
    pub fn evaluate(&self, metric: &MetricField, at: &UnitTangent) -> Result<CMatrix> {
        let exponent = match self.attenuation() {
            Some(coef) => {
                let path = trace_to_exit(metric, at, POINT_EVALUATION_STEP)?;
                let cumulative = remaining_integrals(coef, &path);
                cumulative[0]
            }
            None => 0.0,
        };
        Ok(self.eval_with(metric, &at.point, &at.direction, exponent))
    }

    /// Precomputes the weight along a traced geodesic for quadrature.
    pub fn profile<'a>(
        &'a self,
        metric: &'a MetricField,
        path: &'a GeodesicPath,
    ) -> WeightProfile<'a> {
        let remaining = self
            .attenuation()
            .map(|c| remaining_integrals(c, path))
            .unwrap_or_default();
        let at_samples = path
            .samples()
            .iter()
            .enumerate()
            .map(|(n, s)| {
                let e = remaining.get(n).copied().unwrap_or(0.0);
                self.eval_with(metric, &s.x, &s.v, e)
            })
            .collect();
        WeightProfile {
            field: self,
            metric,
            path,
            remaining,
            at_samples,
        }
    }
}

/// `∫_{t_n}^τ a(γ(s)) ds` at every sample by cumulative trapezoid from the exit.
fn remaining_integrals(coef: &AttenuationCoefficient, path: &GeodesicPath) -> Vec<f64> {
    let samples = path.samples();
    let mut out = vec![0.0; samples.len()];
    for n in (0..samples.len().saturating_sub(1)).rev() {
        let (a, b) = (&samples[n], &samples[n + 1]);
        out[n] = out[n + 1] + 0.5 * (b.t - a.t) * (coef.at(&a.x) + coef.at(&b.x));
    }
    out
}

/// A weight sampled along one geodesic.
pub struct WeightProfile<'a> {
    field: &'a WeightField,
    metric: &'a MetricField,
    path: &'a GeodesicPath,
    remaining: Vec<f64>,
    at_samples: Vec<CMatrix>,
}

impl WeightProfile<'_> {
    /// `W(γ(t), γ̇(t))` from the Hermite-interpolated state.
    pub fn at(&self, t: f64) -> CMatrix {
        let n = self.path.segment_of(t);
        self.at_on(n, t)
    }

    fn at_on(&self, n: usize, t: f64) -> CMatrix {
        let (x, v) = self.path.interpolate_on(n, t);
        let exponent = match self.field.attenuation() {
            Some(coef) => {
                let samples = self.path.samples();
                let b = &samples[(n + 1).min(samples.len() - 1)];
                self.remaining[(n + 1).min(samples.len() - 1)]
                    + 0.5 * (b.t - t) * (coef.at(&x) + coef.at(&b.x))
            }
            None => 0.0,
        };
        self.field.eval_with(self.metric, &x, &v, exponent)
    }

    /// `∫_{t0}^{t1} W(γ(t), γ̇(t)) dt` by the trapezoid rule on the path
    /// samples inside the interval plus both interpolated endpoints.
    pub fn integrate(&self, t0: f64, t1: f64) -> CMatrix {
        let (k, m) = self.field.dims();
        let mut acc = CMatrix::zeros(m, k);
        if t1 <= t0 {
            return acc;
        }
        let samples = self.path.samples();
        let first = samples.partition_point(|s| s.t <= t0);
        let last = samples.partition_point(|s| s.t < t1);
        let n0 = self.path.segment_of(t0);
        let mut prev_t = t0;
        let mut prev_w = self.at_on(n0, t0);
        for n in first..last {
            let w = &self.at_samples[n];
            acc += (&prev_w + w) * C64::new(0.5 * (samples[n].t - prev_t), 0.0);
            prev_t = samples[n].t;
            prev_w = w.clone();
        }
        let end_w = self.at_on(self.path.segment_of(t1), t1);
        acc += (&prev_w + &end_w) * C64::new(0.5 * (t1 - prev_t), 0.0);
        acc
    }
}

/// Minimum of `σ_min(W(x, v))` over `samples`; positive certifies that `W`
/// is injective at the sampled points.
pub fn injectivity_margin(
    metric: &MetricField,
    weight: &WeightField,
    samples: &[UnitTangent],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Config("injectivity margin needs samples".into()));
    }
    let mut margin = f64::INFINITY;
    for s in samples {
        margin = margin.min(smallest_singular_value(&weight.evaluate(metric, s)?));
    }
    Ok(margin)
}

/// Points of a `grid × grid` lattice in the disk, each with `directions`
/// equally spaced unit directions.
pub fn sphere_bundle_samples(
    metric: &MetricField,
    grid: usize,
    directions: usize,
) -> Vec<UnitTangent> {
    let mut out = Vec::new();
    for x in disk_grid(grid) {
        for j in 0..directions {
            let a = std::f64::consts::TAU * (j as f64 + 0.5) / directions as f64;
            let dir = metric.unit_from_angle(&x, a);
            // outward directions at rim points are not in the bundle's trace domain
            if x.norm() > 1.0 - 1e-12 && x.dot(&dir) > 0.0 {
                continue;
            }
            out.push(UnitTangent {
                point: x,
                direction: dir,
            });
        }
    }
    out
}
