use crate::geometry::GeodesicPath;
use crate::linalg::Point;

use super::mesh::{Location, Tiling};

/// Skeleton runs longer than this flag the path as tangent to an edge.
pub const TANGENCY_WARNING_LENGTH: f64 = 1e-6;

/// Edge-line values below this count as zero when looking for sign changes.
const SIGN_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Triangle(usize),
    Skeleton,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClipInterval {
    pub region: Region,
    pub t0: f64,
    pub t1: f64,
}

impl ClipInterval {
    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// Partition of `[0, τ]` into maximal runs inside one region.
#[derive(Clone, Debug, PartialEq)]
pub struct ClipResult {
    pub intervals: Vec<ClipInterval>,
    /// Total arclength spent sliding along edges or through vertices.
    pub skeleton_length: f64,
}

impl ClipResult {
    pub fn tangency_warning(&self) -> bool {
        self.skeleton_length > TANGENCY_WARNING_LENGTH
    }

    pub fn triangle_intervals(&self) -> impl Iterator<Item = (usize, &ClipInterval)> {
        self.intervals.iter().filter_map(|iv| match iv.region {
            Region::Triangle(t) => Some((t, iv)),
            _ => None,
        })
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(ClipInterval::length).sum()
    }
}

struct EdgeLine {
    origin: Point,
    normal: Point,
    lo: Point,
    hi: Point,
}

impl EdgeLine {
    fn eval(&self, x: &Point) -> f64 {
        self.normal.dot(&(x - self.origin))
    }
}

fn snap(s: f64) -> f64 {
    if s.abs() <= SIGN_TOL {
        0.0
    } else {
        s
    }
}

/// Splits a traced geodesic at every crossing of a tiling edge line and
/// classifies the pieces by locating their midpoints.
///
/// Crossings are bracketed per path segment and refined by bisection on the
/// cubic Hermite interpolant until the bracket collapses.
pub fn clip_path(tiling: &Tiling, path: &GeodesicPath) -> ClipResult {
    let verts = tiling.vertices();
    let lines: Vec<EdgeLine> = tiling
        .edges()
        .keys()
        .map(|&(a, b)| {
            let (p, q) = (verts[a], verts[b]);
            let d = q - p;
            EdgeLine {
                origin: p,
                normal: Point::new(-d[1], d[0]) / d.norm(),
                lo: p.inf(&q),
                hi: p.sup(&q),
            }
        })
        .collect();
    let samples = path.samples();
    let tau = path.exit_time();
    let mut cuts = vec![0.0, tau];
    for (n, pair) in samples.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let bulge = 0.25 * (b.x - a.x).norm() + 1e-12;
        let seg_lo = a.x.inf(&b.x).add_scalar(-bulge);
        let seg_hi = a.x.sup(&b.x).add_scalar(bulge);
        for line in &lines {
            if line.hi[0] < seg_lo[0]
                || line.lo[0] > seg_hi[0]
                || line.hi[1] < seg_lo[1]
                || line.lo[1] > seg_hi[1]
            {
                continue;
            }
            let sa = snap(line.eval(&a.x));
            let sb = snap(line.eval(&b.x));
            if sa == 0.0 {
                cuts.push(a.t);
            }
            if sb == 0.0 {
                cuts.push(b.t);
            }
            if sa * sb < 0.0 {
                cuts.push(bisect_crossing(path, n, line, a.t, b.t, sa));
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut intervals: Vec<ClipInterval> = Vec::new();
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let mid = 0.5 * (t0 + t1);
        let (x, _) = path.interpolate(mid);
        let region = match tiling.locate(&x) {
            Location::Interior(t) => Region::Triangle(t),
            Location::Edge | Location::Vertex => Region::Skeleton,
            Location::Outside => Region::Outside,
        };
        match intervals.last_mut() {
            Some(last) if last.region == region => last.t1 = t1,
            _ => intervals.push(ClipInterval { region, t0, t1 }),
        }
    }
    let skeleton_length = intervals
        .iter()
        .filter(|iv| iv.region == Region::Skeleton)
        .map(ClipInterval::length)
        .sum();
    ClipResult {
        intervals,
        skeleton_length,
    }
}

fn bisect_crossing(
    path: &GeodesicPath,
    segment: usize,
    line: &EdgeLine,
    mut lo: f64,
    mut hi: f64,
    s_lo: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (x, _) = path.interpolate_on(segment, mid);
        let s = line.eval(&x);
        if s == 0.0 {
            return mid;
        }
        if (s > 0.0) == (s_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
