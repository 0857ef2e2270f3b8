use std::cmp::Ordering;

use crate::geometry::{box_iou, BBox};

/// Indices sorted by descending score; equal scores keep ascending index.
/// Missing scores sort last.
pub(crate) fn score_order(boxes: &[BBox]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| by_score_desc(&boxes[a], &boxes[b]).then(a.cmp(&b)));
    order
}

fn by_score_desc(a: &BBox, b: &BBox) -> Ordering {
    let s = |x: &BBox| x.score.unwrap_or(f64::NEG_INFINITY);
    s(b).total_cmp(&s(a))
}

/// Greedy non-maximum suppression. Returns the indices of kept boxes in
/// descending score order. A box is suppressed when its IoU with an already
/// kept box is strictly above `iou_threshold`.
pub fn nms(boxes: &[BBox], iou_threshold: f64) -> Vec<usize> {
    let order = score_order(boxes);
    let mut suppressed = vec![false; boxes.len()];
    let mut keep = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        if suppressed[i] {
            continue;
        }
        keep.push(i);
        for &j in &order[pos + 1..] {
            if !suppressed[j] && box_iou(&boxes[i], &boxes[j]) > iou_threshold {
                suppressed[j] = true;
            }
        }
    }
    keep
}
