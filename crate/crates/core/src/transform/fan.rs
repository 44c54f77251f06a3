use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{
    integrate_frame, trace_geodesic, FrameState, GeodesicPath, MetricField, UnitTangent,
};
use crate::linalg::{CVector, Point, C64};
use crate::tiling::{PiecewiseConstantField, SectorFan, ValidTiling};
use crate::weight::WeightField;

use super::forward::forward;

/// Distance in angle from the line direction `β ± π/2` below which a sector
/// edge makes the tangent chord blow up.
pub const CUT_TOL: f64 = 1e-9;

/// The geodesic `γ_v^h`: it leaves `γ_{x,v}(h)` in the direction of the
/// parallel-transported normal `w(h)`.
#[derive(Clone, Debug)]
pub struct FanGeodesic {
    pub anchor: UnitTangent,
    pub offset: f64,
    /// `+1` for `w = v` rotated by `+π/2`, `−1` for the opposite normal.
    pub sign: f64,
    /// `γ_{x,v}(h)`
    pub base: Point,
    /// `γ̇_{x,v}(h)`
    pub base_velocity: Point,
    pub transported_normal: Point,
    pub path: GeodesicPath,
}

impl FanGeodesic {
    /// `|⟨w(h), γ̇_{x,v}(h)⟩_g|`
    pub fn orthogonality_defect(&self, metric: &MetricField) -> f64 {
        metric
            .inner(&self.base, &self.transported_normal, &self.base_velocity)
            .abs()
    }
}

/// Builds `γ_v^h` from the boundary point `x` and inward direction `v`.
///
/// The path is traced with step `min(step, h/8)` so that short chords near
/// the boundary are still resolved.
pub fn fan_geodesic(
    metric: &MetricField,
    x: Point,
    v: Point,
    h: f64,
    sign: f64,
    step: f64,
) -> Result<FanGeodesic> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("offset h must be positive, got {h}")));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::Config(format!("normal sign must be ±1, got {sign}")));
    }
    let anchor = UnitTangent::new(metric, x, v)?;
    if anchor.point.dot(&anchor.direction) > 0.0 {
        return Err(Error::Config("fan direction points out of the disk".into()));
    }
    let step = step.min(h / 8.0);
    let w0 = metric.quarter_turn(&anchor.point, &anchor.direction) * sign;
    let frame = integrate_frame(
        metric,
        FrameState {
            x: anchor.point,
            v: anchor.direction,
            w: w0,
        },
        h,
        step,
    )?;
    let start = UnitTangent::new(metric, frame.x, frame.w)?;
    let path = trace_geodesic(metric, &start, step)?;
    Ok(FanGeodesic {
        anchor,
        offset: h,
        sign,
        base: frame.x,
        base_velocity: frame.v,
        transported_normal: frame.w,
        path,
    })
}

/// `(1/h) ∫_{γ_v^h} W f ds`
pub fn scaled_fan_integral(
    metric: &MetricField,
    weight: &WeightField,
    tiling: &ValidTiling,
    field: &PiecewiseConstantField,
    fan: &FanGeodesic,
) -> Result<CVector> {
    Ok(forward(metric, weight, tiling, field, &fan.path)? / C64::new(fan.offset, 0.0))
}

/// The line `σ_v^1 = {v + t w}` in the tangent plane, with `w` the direction
/// `v` rotated by `+π/2`. Its point at parameter `t` has direction angle
/// `β + arctan t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentLine {
    pub beta: f64,
}

impl TangentLine {
    pub fn new(beta: f64) -> Self {
        Self { beta }
    }

    pub fn point(&self, t: f64) -> Point {
        let (s, c) = self.beta.sin_cos();
        Point::new(c - t * s, s + t * c)
    }

    /// Parameter of the point with direction angle `β + rel`, `|rel| < π/2`.
    pub fn parameter(&self, rel: f64) -> f64 {
        rel.tan()
    }
}

/// Length of `σ_v^1` inside the sector `[start, end]` for `v` at angle `beta`.
///
/// Fails when a sector edge is within [`CUT_TOL`] of `β ± π/2` or the sector
/// contains a direction parallel to the line, where the length is unbounded.
pub fn sector_chord_length(start: f64, end: f64, beta: f64) -> Result<f64> {
    let width = end - start;
    let a = (start - beta + PI).rem_euclid(TAU) - PI;
    let mut total = 0.0;
    for shift in [0.0, -TAU] {
        let (lo, hi) = (a + shift, a + width + shift);
        for cut in [-FRAC_PI_2, FRAC_PI_2] {
            let near = |e: f64| (e - cut).abs() < CUT_TOL;
            if near(lo) || near(hi) || (lo < cut && cut < hi) {
                return Err(Error::NearInfiniteChord { angle: beta + cut });
            }
        }
        let lo = lo.max(-FRAC_PI_2);
        let hi = hi.min(FRAC_PI_2);
        if hi > lo {
            total += hi.tan() - lo.tan();
        }
    }
    Ok(total)
}

/// `∫_{σ_v^1} T_x f ds` for the tangent function `fan` and `v` at angle `beta`.
///
/// Sectors carrying the zero value are skipped, so only cones that actually
/// contribute can trigger the near-infinite-chord error.
pub fn tangent_line_integral(fan: &SectorFan, beta: f64) -> Result<CVector> {
    let mut out = CVector::zeros(fan.k);
    for s in &fan.sectors {
        if s.value.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let len = sector_chord_length(s.start, s.end, beta)?;
        out += &s.value * C64::new(len, 0.0);
    }
    Ok(out)
}

/// `W(x, v^⊥) ∫_{σ_v^1} T_x f ds`: the limit of [`scaled_fan_integral`] as
/// `h → 0`, with `v^⊥` the direction `v` rotated by `+π/2`.
pub fn frozen_limit(
    metric: &MetricField,
    weight: &WeightField,
    x: Point,
    v: Point,
    fan: &SectorFan,
) -> Result<CVector> {
    let (k, _) = weight.dims();
    if fan.k != k {
        return Err(Error::Config(format!(
            "fan has k = {} but the weight acts on ℂ^{k}",
            fan.k
        )));
    }
    let beta = metric.frame_angle(&x, &v);
    let line = tangent_line_integral(fan, beta)?;
    let perp = UnitTangent::new(metric, x, metric.quarter_turn(&x, &v))?;
    Ok(weight.evaluate(metric, &perp)? * line)
}
