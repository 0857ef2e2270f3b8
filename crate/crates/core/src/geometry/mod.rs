//! Polygon and box primitives shared by label generation, post-processing
//! and evaluation.

mod bbox;
mod fill;
mod offset;
mod polygon;
mod rotated;

pub use bbox::{bounding_box, box_iou, BBox};
pub use fill::{fill_into, overlap_counts, polygon_iou, polygon_iou_at, rasterize_fill};
pub use offset::{offset_polygon, ARC_STEP_RAD, MITER_LIMIT};
pub use polygon::{polygon_area, polygon_perimeter, Point, Polygon, VERTEX_EPS};
pub use rotated::{convex_hull, min_area_rect, min_area_rect_points, RotatedRect};
