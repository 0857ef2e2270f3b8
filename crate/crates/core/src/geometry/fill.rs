//! Even-odd scanline fill sampled at pixel centers, and raster-based
//! polygon overlap measures built on it.

use super::bbox::bounding_box;
use super::polygon::Polygon;
use crate::raster::BinaryMask;

/// Calls `span(row, col_start, col_end)` for every run of covered pixels on
/// a `width x height` grid whose pixel `(row, col)` is sampled at
/// `(origin_x + col + 0.5, origin_y + row + 0.5)`.
pub(crate) fn for_each_span(
    p: &Polygon,
    origin_x: f64,
    origin_y: f64,
    width: usize,
    height: usize,
    mut span: impl FnMut(usize, usize, usize),
) {
    if width == 0 || height == 0 {
        return;
    }
    let bb = bounding_box(p);
    let row_lo = ((bb.y_min - origin_y - 0.5).ceil().max(0.0)) as usize;
    let row_hi_f = (bb.y_max - origin_y - 0.5).floor();
    if row_hi_f < 0.0 || row_lo >= height {
        return;
    }
    let row_hi = (row_hi_f as usize).min(height - 1);
    let verts = p.vertices();
    let n = verts.len();
    let mut xs: Vec<f64> = Vec::with_capacity(8);
    for row in row_lo..=row_hi {
        let yc = origin_y + row as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            if (a.y <= yc) != (b.y <= yc) {
                xs.push(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let c0 = (pair[0] - origin_x - 0.5).ceil().max(0.0);
            let c1 = (pair[1] - origin_x - 0.5).ceil().min(width as f64);
            if c1 > c0 {
                span(row, c0 as usize, c1 as usize);
            }
        }
    }
}

/// Pixel `(row, col)` is set iff its center `(col + 0.5, row + 0.5)` lies
/// inside `p` under the even-odd rule.
pub fn rasterize_fill(p: &Polygon, width: usize, height: usize) -> BinaryMask {
    let mut mask = BinaryMask::new(width, height);
    fill_into(p, &mut mask, true);
    mask
}

/// Writes `value` into every covered pixel of `mask`.
pub fn fill_into<T: Clone>(p: &Polygon, grid: &mut crate::raster::Grid<T>, value: T) {
    let (w, h) = (grid.width(), grid.height());
    let data = grid.as_mut_slice();
    for_each_span(p, 0.0, 0.0, w, h, |row, c0, c1| {
        data[row * w + c0..row * w + c1].fill(value.clone());
    });
}

/// Raster of both polygons on their joint integer-aligned bounding grid,
/// returning `(count_a, count_b, count_intersection)`.
pub fn overlap_counts(a: &Polygon, b: &Polygon) -> (usize, usize, usize) {
    let ba = bounding_box(a);
    let bb = bounding_box(b);
    let x0 = ba.x_min.min(bb.x_min).floor();
    let y0 = ba.y_min.min(bb.y_min).floor();
    let x1 = ba.x_max.max(bb.x_max).ceil();
    let y1 = ba.y_max.max(bb.y_max).ceil();
    let w = (x1 - x0) as usize;
    let h = (y1 - y0) as usize;
    if w == 0 || h == 0 {
        return (0, 0, 0);
    }
    let mut grid = vec![0u8; w * h];
    let mut na = 0;
    for_each_span(a, x0, y0, w, h, |row, c0, c1| {
        grid[row * w + c0..row * w + c1].fill(1);
        na += c1 - c0;
    });
    let (mut nb, mut inter) = (0, 0);
    for_each_span(b, x0, y0, w, h, |row, c0, c1| {
        nb += c1 - c0;
        inter += grid[row * w + c0..row * w + c1]
            .iter()
            .filter(|&&v| v == 1)
            .count();
    });
    (na, nb, inter)
}

/// IoU of two polygons measured on a 1 px raster over their joint bounding
/// grid. Two empty rasters give `0`.
pub fn polygon_iou(a: &Polygon, b: &Polygon) -> f64 {
    let (na, nb, inter) = overlap_counts(a, b);
    let union = na + nb - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// [`polygon_iou`] on a grid of `cell` px instead of 1 px.
pub fn polygon_iou_at(a: &Polygon, b: &Polygon, cell: f64) -> f64 {
    assert!(cell > 0.0, "cell size must be positive");
    let k = 1.0 / cell;
    let scale = |p: &Polygon| {
        p.scale_about(super::Point::new(0.0, 0.0), k)
            .expect("scaling keeps a valid polygon valid")
    };
    polygon_iou(&scale(a), &scale(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_fills_exactly() {
        let sq = Polygon::rect(0.0, 0.0, 10.0, 10.0).unwrap();
        let m = rasterize_fill(&sq, 16, 16);
        assert_eq!(m.count_set(), 100);
        assert!(*m.get(9, 9));
        assert!(!*m.get(10, 9));
    }

    #[test]
    fn off_canvas_is_empty() {
        let sq = Polygon::rect(-30.0, -30.0, -10.0, -10.0).unwrap();
        assert_eq!(rasterize_fill(&sq, 16, 16).count_set(), 0);
        let far = Polygon::rect(100.0, 0.0, 120.0, 10.0).unwrap();
        assert_eq!(rasterize_fill(&far, 16, 16).count_set(), 0);
    }

    #[test]
    fn partially_clipped() {
        let sq = Polygon::rect(-5.0, -5.0, 5.0, 5.0).unwrap();
        assert_eq!(rasterize_fill(&sq, 16, 16).count_set(), 25);
    }

    #[test]
    fn iou_examples() {
        let a = Polygon::rect(0.0, 0.0, 10.0, 10.0).unwrap();
        let b = Polygon::rect(5.0, 0.0, 15.0, 10.0).unwrap();
        assert_eq!(polygon_iou(&a, &a), 1.0);
        assert!((polygon_iou(&a, &b) - 1.0 / 3.0).abs() < 0.02);
        let tiny = Polygon::rect(0.1, 0.1, 0.2, 0.2).unwrap();
        assert_eq!(polygon_iou(&tiny, &tiny), 0.0);
        let fine = polygon_iou_at(&a, &b, 0.5);
        assert!((fine - 1.0 / 3.0).abs() < 1e-12);
    }
}
