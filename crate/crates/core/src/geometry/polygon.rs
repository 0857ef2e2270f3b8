use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two vertices closer than this are considered identical.
pub const VERTEX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    #[inline]
    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    #[inline]
    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Twice the signed shoelace area of a closed vertex ring.
pub(crate) fn signed_area2(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc
}

/// A closed polygon with at least three vertices, stored counter-clockwise
/// (positive shoelace area).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Vec<[f64; 2]>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Builds a polygon, dropping consecutive duplicate vertices and
    /// reorienting to counter-clockwise.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite vertex".into()));
        }
        let mut vs: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if vs.last().is_none_or(|q| q.dist(p) > VERTEX_EPS) {
                vs.push(p);
            }
        }
        while vs.len() > 1 && vs[0].dist(vs[vs.len() - 1]) <= VERTEX_EPS {
            vs.pop();
        }
        if vs.len() < 3 {
            return Err(Error::InvalidGeometry(format!(
                "polygon needs at least 3 distinct vertices, got {}",
                vs.len()
            )));
        }
        if signed_area2(&vs) < 0.0 {
            vs.reverse();
        }
        Ok(Self { vertices: vs })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| c.into()).collect())
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::from_coords(&[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Iterates the edges `(v[i], v[i+1])` including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area2(&self.vertices).abs() * 0.5
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    /// Area centroid; falls back to the vertex mean for zero-area rings.
    pub fn centroid(&self) -> Point {
        let a2 = signed_area2(&self.vertices);
        if a2.abs() < 1e-12 {
            let n = self.vertices.len() as f64;
            let s = self
                .vertices
                .iter()
                .fold(Point::default(), |acc, &p| acc.add(p));
            return s.scale(1.0 / n);
        }
        let (mut cx, mut cy) = (0.0, 0.0);
        for (a, b) in self.edges() {
            let c = a.cross(b);
            cx += (a.x + b.x) * c;
            cy += (a.y + b.y) * c;
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        }
    }

    /// Scales every vertex about `center` by `k > 0`.
    pub fn scale_about(&self, center: Point, k: f64) -> Result<Polygon> {
        Polygon::new(
            self.vertices
                .iter()
                .map(|&p| center.add(p.sub(center).scale(k)))
                .collect(),
        )
    }

    /// Merges vertices whose neighbours are collinear with them (distance to
    /// the chord within `tol`) and pointing the same way. Returns `self`
    /// unchanged if merging would leave fewer than three vertices.
    pub fn merge_collinear(&self, tol: f64) -> Polygon {
        let mut vs = self.vertices.clone();
        loop {
            let n = vs.len();
            if n <= 3 {
                break;
            }
            let mut keep = Vec::with_capacity(n);
            let mut changed = false;
            for i in 0..n {
                let prev = if keep.is_empty() {
                    vs[(i + n - 1) % n]
                } else {
                    *keep.last().unwrap()
                };
                let cur = vs[i];
                let next = vs[(i + 1) % n];
                let chord = next.sub(prev);
                let len = chord.norm();
                let dev = if len > 0.0 {
                    chord.cross(cur.sub(prev)).abs() / len
                } else {
                    f64::INFINITY
                };
                let forward = cur.sub(prev).dot(next.sub(cur)) > 0.0;
                if dev <= tol && forward && keep.len() + (n - i - 1) >= 3 {
                    changed = true;
                } else {
                    keep.push(cur);
                }
            }
            vs = keep;
            if !changed {
                break;
            }
        }
        Polygon::new(vs).unwrap_or_else(|_| self.clone())
    }
}

impl From<Polygon> for Vec<[f64; 2]> {
    fn from(p: Polygon) -> Self {
        p.vertices.iter().map(|v| [v.x, v.y]).collect()
    }
}

impl<'de> Deserialize<'de> for Polygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Polygon::new(raw.into_iter().map(|[x, y]| Point::new(x, y)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Shoelace area of `p`.
pub fn polygon_area(p: &Polygon) -> f64 {
    p.area()
}

/// Edge-length sum of `p`, closing edge included.
pub fn polygon_perimeter(p: &Polygon) -> f64 {
    p.perimeter()
}
