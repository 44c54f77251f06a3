use std::collections::BTreeMap;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::linalg::Point;

/// Barycentric tolerance for snapping a point onto the skeleton.
pub const BARYCENTRIC_TOL: f64 = 1e-12;

/// Triangles with `|area|` below this are degenerate.
pub(crate) const MIN_AREA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
}

/// Where a point sits relative to a tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Open interior of a triangle (depth 0).
    Interior(usize),
    /// Open edge (depth 1).
    Edge,
    /// A tiling vertex (depth 2).
    Vertex,
    Outside,
}

impl Location {
    pub fn depth(&self) -> Option<u8> {
        match self {
            Location::Interior(_) => Some(0),
            Location::Edge => Some(1),
            Location::Vertex => Some(2),
            Location::Outside => None,
        }
    }

    pub fn triangle(&self) -> Option<usize> {
        match self {
            Location::Interior(t) => Some(*t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
struct Frame {
    origin: Point,
    /// maps `x − origin` to the barycentric weights of vertices 1 and 2
    inverse: Option<Matrix2<f64>>,
}

/// Straight triangles in chart coordinates, oriented counter-clockwise.
#[derive(Clone, Debug)]
pub struct Tiling {
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    edges: BTreeMap<(usize, usize), Vec<usize>>,
    frames: Vec<Frame>,
}

fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b - a).perp(&(c - a)))
}

impl Tiling {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut tris = Vec::with_capacity(triangles.len());
        for (id, mut t) in triangles.into_iter().enumerate() {
            if let Some(bad) = t.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Config(format!(
                    "triangle {id} references missing vertex {bad}"
                )));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Config(format!("triangle {id} repeats a vertex")));
            }
            if signed_area(&vertices[t[0]], &vertices[t[1]], &vertices[t[2]]) < 0.0 {
                t.swap(1, 2);
            }
            tris.push(Triangle { vertices: t });
        }
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (id, t) in tris.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t.vertices[i], t.vertices[(i + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push(id);
            }
        }
        let frames = tris
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices.map(|i| vertices[i]);
                let m = Matrix2::from_columns(&[b - a, c - a]);
                let inverse = if signed_area(&a, &b, &c).abs() < MIN_AREA {
                    None
                } else {
                    m.try_inverse()
                };
                Frame { origin: a, inverse }
            })
            .collect();
        Ok(Self {
            vertices,
            triangles: tris,
            edges,
            frames,
        })
    }

    /// Fan triangulation of the inscribed regular polygon with `sides`
    /// vertices, the first at angle `phase`.
    pub fn polygon_fan(sides: usize, phase: f64) -> Result<Self> {
        if sides < 3 {
            return Err(Error::Config(format!(
                "polygon needs at least 3 sides, got {sides}"
            )));
        }
        let mut vertices = vec![Point::zeros()];
        for j in 0..sides {
            let a = phase + std::f64::consts::TAU * j as f64 / sides as f64;
            vertices.push(Point::new(a.cos(), a.sin()));
        }
        let triangles = (0..sides)
            .map(|j| [0, 1 + j, 1 + (j + 1) % sides])
            .collect();
        Self::new(vertices, triangles)
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn refine(&self) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut mid = |a: usize, b: usize, vs: &mut Vec<Point>| -> usize {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vs.push((vs[a] + vs[b]) * 0.5);
                vs.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for t in &self.triangles {
            let [a, b, c] = t.vertices;
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        Self::new(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn corners(&self, tri: usize) -> [Point; 3] {
        self.triangles[tri].vertices.map(|i| self.vertices[i])
    }

    pub fn area(&self, tri: usize) -> f64 {
        let [a, b, c] = self.corners(tri);
        signed_area(&a, &b, &c)
    }

    /// Edges keyed by sorted vertex pair, with their incident triangles.
    pub fn edges(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.edges
    }

    pub fn incident_triangles(&self, vertex: usize) -> Vec<usize> {
        self.triangles
            .iter()
            .enumerate()
            .filter(|(_, t)| t.vertices.contains(&vertex))
            .map(|(i, _)| i)
            .collect()
    }

    /// Barycentric coordinates of `x` in triangle `tri`, `None` if degenerate.
    pub fn barycentric(&self, tri: usize, x: &Point) -> Option<[f64; 3]> {
        let f = &self.frames[tri];
        let inv = f.inverse?;
        let l = inv * (x - f.origin);
        Some([1.0 - l[0] - l[1], l[0], l[1]])
    }

    pub(crate) fn classify_in(&self, tri: usize, x: &Point) -> Option<Location> {
        let b = self.barycentric(tri, x)?;
        if b.iter().any(|&w| w < -BARYCENTRIC_TOL) {
            return None;
        }
        let on = b.iter().filter(|w| w.abs() <= BARYCENTRIC_TOL).count();
        Some(match on {
            0 => Location::Interior(tri),
            1 => Location::Edge,
            _ => Location::Vertex,
        })
    }

    /// Depth-classified location of `x`.
    pub fn locate(&self, x: &Point) -> Location {
        let mut best = Location::Outside;
        for tri in 0..self.triangles.len() {
            match self.classify_in(tri, x) {
                Some(l @ Location::Interior(_)) => return l,
                Some(Location::Vertex) => best = Location::Vertex,
                Some(Location::Edge) if best != Location::Vertex => best = Location::Edge,
                _ => {}
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_fan_has_expected_shape() {
        let t = Tiling::polygon_fan(6, 0.0).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.vertices().len(), 7);
        assert!((0..6).all(|i| t.area(i) > 0.0));
        let r = t.refine().unwrap();
        assert_eq!(r.len(), 24);
        // 7 + 6 spoke midpoints + 6 rim midpoints
        assert_eq!(r.vertices().len(), 19);
        let total: f64 = (0..24).map(|i| r.area(i)).sum();
        let orig: f64 = (0..6).map(|i| t.area(i)).sum();
        assert!((total - orig).abs() < 1e-14);
    }

    #[test]
    fn locate_reports_depth() {
        let t = Tiling::polygon_fan(6, 0.0).unwrap();
        let [a, b, c] = t.corners(2);
        assert_eq!(t.locate(&((a + b + c) / 3.0)), Location::Interior(2));
        // shared spoke between triangles 0 and 1
        let mid = (t.vertices()[0] + t.vertices()[2]) * 0.5;
        assert_eq!(t.locate(&mid), Location::Edge);
        assert_eq!(t.locate(&mid).depth(), Some(1));
        assert_eq!(t.locate(&t.vertices()[3]), Location::Vertex);
        assert_eq!(t.locate(&Point::new(0.99, 0.5)), Location::Outside);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(0.0, 0.5),
        ];
        let t = Tiling::new(v, vec![[0, 2, 1]]).unwrap();
        assert!(t.area(0) > 0.0);
    }

    #[test]
    fn bad_indices_are_rejected() {
        let v = vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0)];
        assert!(Tiling::new(v.clone(), vec![[0, 1, 2]]).is_err());
        assert!(Tiling::new(v, vec![[0, 1, 1]]).is_err());
    }
}
