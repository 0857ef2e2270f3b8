use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::raster::Grid;

/// Outer boundary of one labeled component along pixel edges.
///
/// The walk starts at the top-left corner of the component's first pixel in
/// row-major order and follows pixel cracks with the component on its right.
/// At each lattice vertex it turns towards a diagonal component pixel first,
/// so 8-connected parts stay on one boundary and touch at a shared corner.
/// Only corner vertices are emitted; holes are not traced.
pub fn trace_contour(labels: &Grid<u32>, id: u32) -> Result<Polygon> {
    let start = labels
        .as_slice()
        .iter()
        .position(|&l| l == id && id != 0)
        .ok_or(Error::ComponentNotFound(id))?;
    let (w, h) = (labels.width() as i64, labels.height() as i64);
    let inside = |row: i64, col: i64| {
        row >= 0 && col >= 0 && row < h && col < w && *labels.get(row as usize, col as usize) == id
    };
    let x0 = start as i64 % w;
    let y0 = start as i64 / w;

    let (mut x, mut y) = (x0, y0);
    let (mut dx, mut dy) = (1i64, 0i64);
    let mut corners = vec![Point::new(x0 as f64, y0 as f64)];
    loop {
        x += dx;
        y += dy;
        if x == x0 && y == y0 {
            break;
        }
        // Right-hand side of the heading in raster (y-down) coordinates.
        let (rx, ry) = (-dy, dx);
        let pixel = |sx: i64, sy: i64| {
            let cx = 2 * x + dx + sx;
            let cy = 2 * y + dy + sy;
            inside(cy.div_euclid(2), cx.div_euclid(2))
        };
        let (ndx, ndy) = if pixel(-rx, -ry) {
            (-rx, -ry)
        } else if pixel(rx, ry) {
            (dx, dy)
        } else {
            (rx, ry)
        };
        if (ndx, ndy) != (dx, dy) {
            corners.push(Point::new(x as f64, y as f64));
            dx = ndx;
            dy = ndy;
        }
    }
    Polygon::new(corners)
}
