//! Polygon offsetting by edge translation and join construction, followed by
//! a positive-winding cleanup of the raw (possibly self-intersecting) path.
//!
//! Outward offsets (`delta > 0`) use round joins sampled at no more than 15
//! degrees per step. Inward offsets (`delta < 0`) use miter joins with a
//! miter limit of 2, falling back to a bevel beyond it.

use std::collections::HashMap;

use super::polygon::{signed_area2, Point, Polygon};
use crate::error::{Error, Result};

pub const ARC_STEP_RAD: f64 = 15.0 * std::f64::consts::PI / 180.0;
pub const MITER_LIMIT: f64 = 2.0;

/// Snap grid for path vertices and intersection nodes (2^-24 px).
const SNAP: f64 = 16_777_216.0;

/// Offsets `p` by `delta` px: outward for positive, inward for negative.
///
/// Inward offsets may split the polygon into several pieces or collapse it
/// entirely, in which case the result is empty. Pieces are returned in
/// decreasing order of area. Holes that an outward offset might enclose are
/// filled.
pub fn offset_polygon(p: &Polygon, delta: f64) -> Result<Vec<Polygon>> {
    if !delta.is_finite() {
        return Err(Error::InvalidGeometry(format!("non-finite offset {delta}")));
    }
    if delta == 0.0 {
        return Ok(vec![p.clone()]);
    }
    let raw = raw_offset_path(p, delta);
    let scale = raw
        .iter()
        .fold(1.0f64, |m, q| m.max(q.x.abs()).max(q.y.abs()));
    let min_area = 1e-9 * scale;
    let mut out: Vec<Polygon> = positive_fill(&raw)
        .into_iter()
        .filter(|ring| signed_area2(ring) * 0.5 > min_area)
        .filter_map(|ring| Polygon::new(ring).ok())
        .map(|poly| poly.merge_collinear(1e-9))
        .collect();
    out.sort_by(|a, b| b.area().total_cmp(&a.area()));
    Ok(out)
}

fn outward_normal(a: Point, b: Point) -> Point {
    let d = b.sub(a);
    let len = d.norm();
    Point::new(d.y / len, -d.x / len)
}

/// Offset edges joined per vertex; self-intersections are left in place.
pub(crate) fn raw_offset_path(p: &Polygon, delta: f64) -> Vec<Point> {
    let v = p.vertices();
    let n = v.len();
    let normals: Vec<Point> = (0..n).map(|i| outward_normal(v[i], v[(i + 1) % n])).collect();
    let mut path = Vec::with_capacity(n * 4);

    for i in 0..n {
        let n1 = normals[(i + n - 1) % n];
        let n2 = normals[i];
        let vi = v[i];
        let p1 = vi.add(n1.scale(delta));
        let p2 = vi.add(n2.scale(delta));
        let cross = n1.cross(n2);
        let dot = n1.dot(n2);
        let spike = cross.abs() < 1e-12 && dot < 0.0;

        if cross.abs() < 1e-12 && dot > 0.0 {
            path.push(p1);
            continue;
        }
        if !(spike || cross * delta > 0.0) {
            // Offset edges overlap here; route through the vertex and let the
            // winding cleanup remove the resulting loop.
            path.push(p1);
            path.push(vi);
            path.push(p2);
            continue;
        }
        if delta > 0.0 {
            let sweep = if spike {
                std::f64::consts::PI
            } else {
                cross.atan2(dot)
            };
            let steps = (sweep / ARC_STEP_RAD).ceil().max(1.0) as usize;
            let a0 = n1.y.atan2(n1.x);
            path.push(p1);
            for k in 1..steps {
                let a = a0 + sweep * k as f64 / steps as f64;
                path.push(Point::new(vi.x + delta * a.cos(), vi.y + delta * a.sin()));
            }
            path.push(p2);
        } else if 1.0 + dot >= 2.0 / (MITER_LIMIT * MITER_LIMIT) {
            path.push(vi.add(n1.add(n2).scale(delta / (1.0 + dot))));
        } else {
            path.push(p1);
            path.push(p2);
        }
    }
    path
}

#[inline]
fn snap(p: Point) -> Point {
    Point::new((p.x * SNAP).round() / SNAP, (p.y * SNAP).round() / SNAP)
}

#[inline]
fn key(p: Point) -> (i64, i64) {
    ((p.x * SNAP).round() as i64, (p.y * SNAP).round() as i64)
}

struct Nodes {
    points: Vec<Point>,
    index: HashMap<(i64, i64), u32>,
}

impl Nodes {
    fn new() -> Self {
        Self {
            points: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Node id for `p`, merging with an existing node within one snap cell.
    fn intern(&mut self, p: Point) -> u32 {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(&id) = self.index.get(&(kx + dx, ky + dy)) {
                    return id;
                }
            }
        }
        let id = self.points.len() as u32;
        self.points.push(snap(p));
        self.index.insert((kx, ky), id);
        id
    }
}

/// Segment-pair intersections, returned as split points per segment.
fn split_points(pts: &[Point]) -> Vec<Vec<Point>> {
    let m = pts.len();
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    let mut splits: Vec<Vec<Point>> = (0..m).map(|i| vec![seg(i).0, seg(i).1]).collect();

    let (min_x, max_x, min_y, max_y) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
    );
    // Sweep along the longer axis.
    let sweep_x = max_x - min_x >= max_y - min_y;
    let lo_hi = |i: usize| {
        let (a, b) = seg(i);
        let (s0, s1, o0, o1) = if sweep_x {
            (a.x, b.x, a.y, b.y)
        } else {
            (a.y, b.y, a.x, b.x)
        };
        (s0.min(s1), s0.max(s1), o0.min(o1), o0.max(o1))
    };
    let bounds: Vec<(f64, f64, f64, f64)> = (0..m).map(lo_hi).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| bounds[a].0.total_cmp(&bounds[b].0));

    let tol = 1e-12;
    for (oi, &i) in order.iter().enumerate() {
        let (_, hi_i, olo_i, ohi_i) = bounds[i];
        for &j in &order[oi + 1..] {
            let (lo_j, _, olo_j, ohi_j) = bounds[j];
            if lo_j > hi_i {
                break;
            }
            if olo_j > ohi_i || olo_i > ohi_j {
                continue;
            }
            let (p, p_end) = seg(i);
            let (q, q_end) = seg(j);
            let r = p_end.sub(p);
            let s = q_end.sub(q);
            let rr = r.dot(r);
            let ss = s.dot(s);
            let denom = r.cross(s);
            let qp = q.sub(p);
            if denom.abs() > 1e-14 * (rr * ss).sqrt() {
                let t = qp.cross(s) / denom;
                let u = qp.cross(r) / denom;
                if (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u) {
                    let x = snap(p.add(r.scale(t.clamp(0.0, 1.0))));
                    splits[i].push(x);
                    splits[j].push(x);
                }
            } else if qp.cross(r).abs() <= 1e-12 * rr.sqrt().max(1.0) * (1.0 + qp.norm()) {
                // Collinear: each endpoint lying on the other segment splits it.
                for e in [q, q_end] {
                    let t = e.sub(p).dot(r) / rr;
                    if (0.0..=1.0).contains(&t) {
                        splits[i].push(e);
                    }
                }
                for e in [p, p_end] {
                    let u = e.sub(q).dot(s) / ss;
                    if (0.0..=1.0).contains(&u) {
                        splits[j].push(e);
                    }
                }
            }
        }
    }
    splits
}

#[derive(Clone, Copy)]
struct SubEdge {
    from: u32,
    to: u32,
}

/// Buckets edges by their extent along one axis for ray-crossing queries.
struct Bands {
    lo: f64,
    step: f64,
    bands: Vec<Vec<u32>>,
}

impl Bands {
    fn build(extents: impl Iterator<Item = (f64, f64)> + Clone, count: usize) -> Self {
        let (lo, hi) = extents
            .clone()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), (a, b)| {
                (l.min(a), h.max(b))
            });
        let nb = count.max(1);
        let step = ((hi - lo) / nb as f64).max(1e-12);
        let mut bands = vec![Vec::new(); nb];
        for (i, (a, b)) in extents.enumerate() {
            let b0 = (((a - lo) / step) as usize).min(nb - 1);
            let b1 = (((b - lo) / step) as usize).min(nb - 1);
            for band in &mut bands[b0..=b1] {
                band.push(i as u32);
            }
        }
        Self { lo, step, bands }
    }

    fn query(&self, v: f64) -> &[u32] {
        let nb = self.bands.len();
        let b = ((v - self.lo) / self.step).max(0.0) as usize;
        &self.bands[b.min(nb - 1)]
    }
}

/// Boundary rings of the region where the closed path `path` has positive
/// winding number. Outer rings are counter-clockwise; hole rings clockwise.
pub(crate) fn positive_fill(path: &[Point]) -> Vec<Vec<Point>> {
    let mut pts: Vec<Point> = Vec::with_capacity(path.len());
    for &p in path {
        let p = snap(p);
        if pts.last().is_none_or(|q| key(*q) != key(p)) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && key(pts[0]) == key(pts[pts.len() - 1]) {
        pts.pop();
    }
    if pts.len() < 3 {
        return Vec::new();
    }

    let splits = split_points(&pts);
    let mut nodes = Nodes::new();
    let mut edges: Vec<SubEdge> = Vec::new();
    let m = pts.len();
    for (i, mut sp) in splits.into_iter().enumerate() {
        let a = pts[i];
        let r = pts[(i + 1) % m].sub(a);
        sp.sort_by(|x, y| x.sub(a).dot(r).total_cmp(&(y.sub(a).dot(r))));
        let ids: Vec<u32> = sp.iter().map(|&x| nodes.intern(x)).collect();
        for w in ids.windows(2) {
            if w[0] != w[1] {
                edges.push(SubEdge {
                    from: w[0],
                    to: w[1],
                });
            }
        }
    }
    let np = &nodes.points;
    let ends = |e: &SubEdge| (np[e.from as usize], np[e.to as usize]);

    let nbands = (edges.len() as f64).sqrt().ceil() as usize;
    let ybands = Bands::build(
        edges.iter().map(|e| {
            let (a, b) = ends(e);
            (a.y.min(b.y), a.y.max(b.y))
        }),
        nbands,
    );
    let xbands = Bands::build(
        edges.iter().map(|e| {
            let (a, b) = ends(e);
            (a.x.min(b.x), a.x.max(b.x))
        }),
        nbands,
    );

    // Sub-edges are split at every crossing, so overlapping pieces share
    // both end nodes.
    let coincident = |e: &SubEdge, f: &SubEdge| {
        (e.from == f.from && e.to == f.to) || (e.from == f.to && e.to == f.from)
    };
    let mut kept: Vec<SubEdge> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for e in &edges {
        let (a, b) = ends(e);
        let mid = a.add(b).scale(0.5);
        let (mut beyond, mut on) = (0i32, 0i32);
        let (w_left, w_right);
        if (b.y - a.y).abs() >= (b.x - a.x).abs() {
            for &k in ybands.query(mid.y) {
                let f = &edges[k as usize];
                let (c, d) = ends(f);
                if (c.y <= mid.y) != (d.y <= mid.y) {
                    let w = if d.y > c.y { 1 } else { -1 };
                    if coincident(e, f) {
                        on += w;
                    } else if c.x + (mid.y - c.y) * (d.x - c.x) / (d.y - c.y) > mid.x {
                        beyond += w;
                    }
                }
            }
            if b.y > a.y {
                (w_left, w_right) = (beyond + on, beyond);
            } else {
                (w_left, w_right) = (beyond, beyond + on);
            }
        } else {
            for &k in xbands.query(mid.x) {
                let f = &edges[k as usize];
                let (c, d) = ends(f);
                if (c.x <= mid.x) != (d.x <= mid.x) {
                    let w = if d.x < c.x { 1 } else { -1 };
                    if coincident(e, f) {
                        on += w;
                    } else if c.y + (mid.x - c.x) * (d.y - c.y) / (d.x - c.x) > mid.y {
                        beyond += w;
                    }
                }
            }
            if b.x > a.x {
                (w_left, w_right) = (beyond, beyond + on);
            } else {
                (w_left, w_right) = (beyond + on, beyond);
            }
        }
        if w_left > 0 && w_right <= 0 && seen.insert((e.from, e.to)) {
            kept.push(*e);
        }
    }

    link_rings(&kept, np)
}

/// Chains boundary edges into closed rings, taking the sharpest left turn
/// at shared nodes so touching rings come out separately.
fn link_rings(edges: &[SubEdge], np: &[Point]) -> Vec<Vec<Point>> {
    let mut out_edges: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        out_edges.entry(e.from).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut rings = Vec::new();
    let tau = std::f64::consts::TAU;

    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let start_node = edges[start].from;
        let mut ring = vec![np[start_node as usize]];
        let mut cur = start;
        let closed = loop {
            let e = edges[cur];
            if e.to == start_node {
                break true;
            }
            ring.push(np[e.to as usize]);
            let back = np[e.from as usize].sub(np[e.to as usize]);
            let back_ang = back.y.atan2(back.x);
            let next = out_edges.get(&e.to).and_then(|cands| {
                cands
                    .iter()
                    .copied()
                    .filter(|&c| !used[c])
                    .min_by(|&c1, &c2| {
                        let cw = |c: usize| {
                            let d = np[edges[c].to as usize].sub(np[edges[c].from as usize]);
                            let mut a = back_ang - d.y.atan2(d.x);
                            while a <= 0.0 {
                                a += tau;
                            }
                            while a > tau {
                                a -= tau;
                            }
                            a
                        };
                        cw(c1).total_cmp(&cw(c2))
                    })
            });
            match next {
                Some(c) => {
                    used[c] = true;
                    cur = c;
                }
                None => break false,
            }
        };
        if closed && ring.len() >= 3 {
            rings.push(ring);
        }
    }
    rings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> Polygon {
        Polygon::rect(0.0, 0.0, side, side).unwrap()
    }

    #[test]
    fn inward_square_is_exact() {
        let out = offset_polygon(&square(10.0), -1.6).unwrap();
        assert_eq!(out.len(), 1);
        let p = &out[0];
        assert_eq!(p.len(), 4);
        for v in p.vertices() {
            for c in [v.x, v.y] {
                assert!((c - 1.6).abs() < 1e-6 || (c - 8.4).abs() < 1e-6, "{v:?}");
            }
        }
        assert!((p.area() - 6.8 * 6.8).abs() < 1e-5);
    }

    #[test]
    fn outward_square_rounded_area() {
        let d = 2.55;
        let out = offset_polygon(&square(6.8), d).unwrap();
        assert_eq!(out.len(), 1);
        let expected = 11.9 * 11.9 - (4.0 - std::f64::consts::PI) * d * d;
        assert!((out[0].area() - expected).abs() / expected < 0.01);
    }

    #[test]
    fn collapse_is_empty() {
        assert!(offset_polygon(&square(10.0), -6.0).unwrap().is_empty());
        assert!(offset_polygon(&square(10.0), -5.0).unwrap().is_empty());
    }

    #[test]
    fn zero_offset_is_identity() {
        let sq = square(3.0);
        assert_eq!(offset_polygon(&sq, 0.0).unwrap(), vec![sq]);
    }

    #[test]
    fn dumbbell_splits_when_shrunk() {
        // Two 10x10 squares joined by a 2 px wide bridge.
        let p = Polygon::from_coords(&[
            (0.0, 0.0),
            (10.0, 0.0),
            (10.0, 4.0),
            (20.0, 4.0),
            (20.0, 0.0),
            (30.0, 0.0),
            (30.0, 10.0),
            (20.0, 10.0),
            (20.0, 6.0),
            (10.0, 6.0),
            (10.0, 10.0),
            (0.0, 10.0),
        ])
        .unwrap();
        let out = offset_polygon(&p, -1.5).unwrap();
        assert_eq!(out.len(), 2);
        for piece in &out {
            assert!((piece.area() - 49.0).abs() < 1e-6, "{}", piece.area());
        }
    }

    #[test]
    fn concave_outward_stays_simple() {
        // U shape; growing by 3 closes the 2 px notch.
        let u = Polygon::from_coords(&[
            (0.0, 0.0),
            (12.0, 0.0),
            (12.0, 12.0),
            (7.0, 12.0),
            (7.0, 4.0),
            (5.0, 4.0),
            (5.0, 12.0),
            (0.0, 12.0),
        ])
        .unwrap();
        let out = offset_polygon(&u, 3.0).unwrap();
        assert_eq!(out.len(), 1);
        let a = out[0].area();
        let full = 18.0 * 18.0 - (4.0 - std::f64::consts::PI) * 9.0;
        assert!(a <= full + 1e-6 && a > full - 2.0, "{a}");
    }

    #[test]
    fn miter_limit_bevels_sharp_concave_corner() {
        // A thin wedge notch produces a concave corner far sharper than the
        // miter limit allows.
        let p = Polygon::from_coords(&[
            (0.0, 0.0),
            (20.0, 0.0),
            (20.0, 20.0),
            (10.5, 20.0),
            (10.0, 5.0),
            (9.5, 20.0),
            (0.0, 20.0),
        ])
        .unwrap();
        let raw = raw_offset_path(&p, -1.0);
        // The notch apex contributes two bevel points instead of one miter.
        let near_apex = raw.iter().filter(|q| q.dist(Point::new(10.0, 5.0)) < 1.5).count();
        assert_eq!(near_apex, 2);
        let out = offset_polygon(&p, -1.0).unwrap();
        assert!(!out.is_empty());
    }
}
