use crate::error::{Error, Result};
use crate::linalg::Point;

use super::metric::{MetricField, UnitTangent};

/// Arclength cap for a single maximal geodesic: 100 × the chart diameter.
pub const TRAPPING_CAP: f64 = 200.0;

/// Points within this distance of the unit circle count as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Position, velocity and a transported vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameState {
    pub x: Point,
    pub v: Point,
    pub w: Point,
}

impl FrameState {
    fn axpy(&self, h: f64, d: &FrameState) -> FrameState {
        FrameState {
            x: self.x + d.x * h,
            v: self.v + d.v * h,
            w: self.w + d.w * h,
        }
    }
}

fn derivative(metric: &MetricField, s: &FrameState) -> FrameState {
    FrameState {
        x: s.v,
        v: metric.acceleration(&s.x, &s.v),
        w: metric.transport_rate(&s.x, &s.v, &s.w),
    }
}

/// One classical Runge–Kutta step of the joint geodesic/transport system.
fn rk4_step(metric: &MetricField, s: &FrameState, h: f64) -> FrameState {
    let k1 = derivative(metric, s);
    let k2 = derivative(metric, &s.axpy(0.5 * h, &k1));
    let k3 = derivative(metric, &s.axpy(0.5 * h, &k2));
    let k4 = derivative(metric, &s.axpy(h, &k3));
    FrameState {
        x: s.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0),
        v: s.v + (k1.v + k2.v * 2.0 + k3.v * 2.0 + k4.v) * (h / 6.0),
        w: s.w + (k1.w + k2.w * 2.0 + k3.w * 2.0 + k4.w) * (h / 6.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub x: Point,
    pub v: Point,
}

/// A sampled maximal unit-speed geodesic `γ: [0, τ] → M`.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    samples: Vec<PathSample>,
    exit_time: f64,
    endpoints_on_boundary: bool,
    step: f64,
}

impl GeodesicPath {
    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    /// `τ`
    pub fn exit_time(&self) -> f64 {
        self.exit_time
    }

    pub fn endpoints_on_boundary(&self) -> bool {
        self.endpoints_on_boundary
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("paths have at least one sample")
    }

    /// Index `n` of the segment `[t_n, t_{n+1}]` containing `t`.
    pub fn segment_of(&self, t: f64) -> usize {
        let n = self.samples.partition_point(|s| s.t <= t);
        n.saturating_sub(1)
            .min(self.samples.len().saturating_sub(2))
    }

    /// Cubic Hermite interpolation of position and velocity on segment `n`.
    pub fn interpolate_on(&self, n: usize, t: f64) -> (Point, Point) {
        if self.samples.len() == 1 {
            let s = &self.samples[0];
            return (s.x, s.v);
        }
        let a = &self.samples[n];
        let b = &self.samples[n + 1];
        let h = b.t - a.t;
        if h <= 0.0 {
            return (a.x, a.v);
        }
        let s = ((t - a.t) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let x = a.x * h00 + a.v * (h10 * h) + b.x * h01 + b.v * (h11 * h);
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        let v = a.x * d00 + a.v * d10 + b.x * d01 + b.v * d11;
        (x, v)
    }

    pub fn interpolate(&self, t: f64) -> (Point, Point) {
        self.interpolate_on(self.segment_of(t), t)
    }

    pub fn max_speed_defect(&self, metric: &MetricField) -> f64 {
        self.samples
            .iter()
            .map(|s| (metric.inner(&s.x, &s.v, &s.v) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Integrates forward from `start` until the path leaves the closed disk.
///
/// Returns samples with `t` measured from the start; the last sample lies on
/// the boundary circle.
fn march(metric: &MetricField, start: FrameState, step: f64) -> Result<Vec<FrameSample>> {
    let mut out = vec![FrameSample { t: 0.0, s: start }];
    let mut steps = 0usize;
    let mut cur = start;
    loop {
        let next = rk4_step(metric, &cur, step);
        if next.x.norm() > 1.0 {
            let (dt, state) = locate_exit(metric, &cur, step);
            out.push(FrameSample {
                t: steps as f64 * step + dt,
                s: state,
            });
            return Ok(out);
        }
        steps += 1;
        let t = steps as f64 * step;
        if t > TRAPPING_CAP {
            return Err(Error::TrappingSuspected { cap: TRAPPING_CAP });
        }
        out.push(FrameSample { t, s: next });
        cur = next;
    }
}

#[derive(Clone, Copy, Debug)]
struct FrameSample {
    t: f64,
    s: FrameState,
}

/// Bisection on the sub-step length for the sign change of `|x| − 1`.
///
/// Runs until the bracket stops shrinking, which is well below the 1e-10
/// tolerance the boundary event needs.
fn locate_exit(metric: &MetricField, from: &FrameState, step: f64) -> (f64, FrameState) {
    let mut lo = 0.0;
    let mut hi = step;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rk4_step(metric, from, mid).x.norm() > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let dt = 0.5 * (lo + hi);
    (dt, rk4_step(metric, from, dt))
}

/// Traces the maximal geodesic through `start`.
///
/// Interior starts are extended backwards to the entry point, so the returned
/// path always runs from boundary to boundary with `t = 0` at the entry.
pub fn trace_geodesic(
    metric: &MetricField,
    start: &UnitTangent,
    step: f64,
) -> Result<GeodesicPath> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let x0 = start.point;
    let r0 = x0.norm();
    if r0 > 1.0 + 1e-9 {
        return Err(Error::OutsideDomain { x: x0[0], y: x0[1] });
    }
    let on_boundary = r0 >= 1.0 - BOUNDARY_TOL;
    let v0 = start.direction;
    if on_boundary && x0.dot(&v0) > 1e-12 * v0.norm() {
        return Err(Error::Config(
            "boundary start point with outward direction".into(),
        ));
    }
    let forward = march(
        metric,
        FrameState {
            x: x0,
            v: v0,
            w: Point::zeros(),
        },
        step,
    )?;
    let mut samples = Vec::with_capacity(forward.len() * 2);
    let mut offset = 0.0;
    if !on_boundary {
        let backward = march(
            metric,
            FrameState {
                x: x0,
                v: -v0,
                w: Point::zeros(),
            },
            step,
        )?;
        offset = backward.last().map(|s| s.t).unwrap_or(0.0);
        if offset + forward.last().map(|s| s.t).unwrap_or(0.0) > TRAPPING_CAP {
            return Err(Error::TrappingSuspected { cap: TRAPPING_CAP });
        }
        samples.extend(backward.iter().rev().map(|fs| PathSample {
            t: offset - fs.t,
            x: fs.s.x,
            v: -fs.s.v,
        }));
        // the start point appears in both halves
        samples.pop();
    }
    samples.extend(forward.iter().map(|fs| PathSample {
        t: offset + fs.t,
        x: fs.s.x,
        v: fs.s.v,
    }));
    let exit_time = samples.last().map(|s| s.t).unwrap_or(0.0);
    Ok(GeodesicPath {
        samples,
        exit_time,
        endpoints_on_boundary: true,
        step,
    })
}

/// Traces `γ_{x,v}` from `start` forward until it leaves the disk.
///
/// Unlike [`trace_geodesic`] the path starts at `start` even when it is an
/// interior point.
pub fn trace_to_exit(metric: &MetricField, start: &UnitTangent, step: f64) -> Result<GeodesicPath> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let x0 = start.point;
    if x0.norm() > 1.0 + 1e-9 {
        return Err(Error::OutsideDomain { x: x0[0], y: x0[1] });
    }
    let on_boundary = x0.norm() >= 1.0 - BOUNDARY_TOL;
    let forward = march(
        metric,
        FrameState {
            x: x0,
            v: start.direction,
            w: Point::zeros(),
        },
        step,
    )?;
    let samples: Vec<PathSample> = forward
        .iter()
        .map(|fs| PathSample {
            t: fs.t,
            x: fs.s.x,
            v: fs.s.v,
        })
        .collect();
    Ok(GeodesicPath {
        exit_time: samples.last().map(|s| s.t).unwrap_or(0.0),
        samples,
        endpoints_on_boundary: on_boundary,
        step,
    })
}

/// Parallel transport of `w0` along `path`, one vector per sample.
///
/// Each segment is re-integrated jointly with the geodesic from the stored
/// sample, so the transport shares the path's fourth-order accuracy.
pub fn parallel_transport(metric: &MetricField, path: &GeodesicPath, w0: Point) -> Vec<Point> {
    let samples = path.samples();
    let mut out = Vec::with_capacity(samples.len());
    let mut w = w0;
    out.push(w);
    for pair in samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let state = FrameState { x: a.x, v: a.v, w };
        w = rk4_step(metric, &state, b.t - a.t).w;
        out.push(w);
    }
    out
}

/// Follows `γ_{x,v}` for arclength `length` while transporting `w`.
///
/// Uses `ceil(length / step)` equal steps and fails if the geodesic leaves
/// the disk first.
pub fn integrate_frame(
    metric: &MetricField,
    start: FrameState,
    length: f64,
    step: f64,
) -> Result<FrameState> {
    let n = (length / step).ceil().max(1.0) as usize;
    let h = length / n as f64;
    let mut s = start;
    for i in 0..n {
        let next = rk4_step(metric, &s, h);
        if next.x.norm() > 1.0 + 1e-12 {
            let (dt, _) = locate_exit(metric, &s, h);
            return Err(Error::ExitBeforeOffset {
                exit: i as f64 * h + dt,
                offset: length,
            });
        }
        s = next;
    }
    Ok(s)
}
