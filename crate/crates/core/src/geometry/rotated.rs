//! Convex hull and minimum-area enclosing rectangle (rotating calipers).

use super::polygon::{Point, Polygon};
use crate::error::Result;

/// Rectangle given by one corner, the unit direction of its first side and
/// the two side lengths. `height` may be zero for collinear input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedRect {
    pub origin: Point,
    pub axis: Point,
    pub width: f64,
    pub height: f64,
}

impl RotatedRect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Corners in counter-clockwise order starting at `origin`.
    pub fn corners(&self) -> [Point; 4] {
        let u = self.axis;
        let v = Point::new(-u.y, u.x);
        let o = self.origin;
        [
            o,
            o.add(u.scale(self.width)),
            o.add(u.scale(self.width)).add(v.scale(self.height)),
            o.add(v.scale(self.height)),
        ]
    }

    /// Fails for the zero-width rectangle of collinear input.
    pub fn to_polygon(&self) -> Result<Polygon> {
        Polygon::new(self.corners().to_vec())
    }
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.dist(*b) <= 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| a.sub(o).cross(b.sub(o));
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Minimum-area rectangle enclosing `p`.
pub fn min_area_rect(p: &Polygon) -> RotatedRect {
    min_area_rect_points(p.vertices())
}

/// Minimum-area rectangle enclosing a point set. Collinear input yields a
/// zero-height rectangle along the segment; an empty set yields a zero
/// rectangle at the origin.
pub fn min_area_rect_points(points: &[Point]) -> RotatedRect {
    let hull = convex_hull(points);
    match hull.len() {
        0 => {
            return RotatedRect {
                origin: Point::default(),
                axis: Point::new(1.0, 0.0),
                width: 0.0,
                height: 0.0,
            }
        }
        1 => {
            return RotatedRect {
                origin: hull[0],
                axis: Point::new(1.0, 0.0),
                width: 0.0,
                height: 0.0,
            }
        }
        2 => {
            let d = hull[1].sub(hull[0]);
            let len = d.norm();
            return RotatedRect {
                origin: hull[0],
                axis: d.scale(1.0 / len),
                width: len,
                height: 0.0,
            };
        }
        _ => {}
    }

    let n = hull.len();
    let at = |i: usize| hull[i % n];
    let (mut right, mut top, mut left) = (1usize, 1usize, 1usize);
    let mut best: Option<RotatedRect> = None;

    for i in 0..n {
        let base = at(i);
        let u = at(i + 1).sub(base).scale(1.0 / at(i + 1).dist(base));
        let v = Point::new(-u.y, u.x);

        if right < i + 1 {
            right = i + 1;
        }
        while at(right + 1).sub(at(right)).dot(u) > 0.0 {
            right += 1;
        }
        if top < right {
            top = right;
        }
        while at(top + 1).sub(at(top)).dot(v) > 0.0 {
            top += 1;
        }
        if left < top {
            left = top;
        }
        while at(left + 1).sub(at(left)).dot(u) < 0.0 {
            left += 1;
        }

        let max_u = at(right).sub(base).dot(u);
        let min_u = at(left).sub(base).dot(u);
        let height = at(top).sub(base).dot(v);
        let rect = RotatedRect {
            origin: base.add(u.scale(min_u)),
            axis: u,
            width: max_u - min_u,
            height,
        };
        if best.is_none_or(|b| rect.area() < b.area()) {
            best = Some(rect);
        }
    }
    best.expect("hull has at least three edges")
}
