//! Deliberately naive reference implementations. They share no code with
//! `textkernel-core` and work on plain tuples and slices, so a bug in the
//! library cannot hide behind the same bug in its oracle.

/// Axis-aligned box as `[x_min, y_min, x_max, y_max]`.
pub type Rect = [f64; 4];

pub fn rect_iou(a: &Rect, b: &Rect) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = iw * ih;
    let area = |r: &Rect| (r[2] - r[0]) * (r[3] - r[1]);
    let union = area(a) + area(b) - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Full IoU table, `table[i][j] = iou(a[i], b[j])`.
pub fn iou_table(a: &[Rect], b: &[Rect]) -> Vec<Vec<f64>> {
    a.iter().map(|x| b.iter().map(|y| rect_iou(x, y)).collect()).collect()
}

/// Greedy NMS by repeated selection: pick the best remaining box (highest
/// score, then lowest index), delete everything overlapping it above the
/// threshold, repeat.
pub fn nms(boxes: &[Rect], scores: &[f64], thr: f64) -> Vec<usize> {
    let table = iou_table(boxes, boxes);
    let mut alive: Vec<usize> = (0..boxes.len()).collect();
    let mut keep = Vec::new();
    while !alive.is_empty() {
        let mut best = alive[0];
        for &i in &alive {
            if scores[i] > scores[best] || (scores[i] == scores[best] && i < best) {
                best = i;
            }
        }
        keep.push(best);
        alive.retain(|&i| i != best && table[best][i] <= thr);
    }
    keep
}

/// Anchor label codes used by [`assign_rpn`].
pub const POSITIVE: u8 = 1;
pub const NEGATIVE: u8 = 0;
pub const IGNORE: u8 = 2;

/// Reference anchor assignment from an explicit IoU table. Returns a label
/// code and the matched GT per anchor.
pub fn assign_rpn(
    anchors: &[Rect],
    out_of_bounds: &[bool],
    gts: &[(Rect, bool)],
    pos: f64,
    neg: f64,
) -> Vec<(u8, Option<usize>)> {
    let rects: Vec<Rect> = gts.iter().map(|g| g.0).collect();
    let table = iou_table(anchors, &rects);
    let cared = |g: usize| !gts[g].1;
    let mut out = vec![(IGNORE, None); anchors.len()];

    for a in 0..anchors.len() {
        if out_of_bounds[a] {
            continue;
        }
        let mut max = 0.0;
        let mut arg = None;
        for g in (0..gts.len()).filter(|&g| cared(g)) {
            if table[a][g] > max {
                max = table[a][g];
                arg = Some(g);
            }
        }
        out[a] = if max >= pos {
            (POSITIVE, arg)
        } else if max < neg {
            (NEGATIVE, None)
        } else {
            (IGNORE, None)
        };
    }

    // For every GT, its best anchor; collect all (anchor, gt, iou) wins.
    let mut wins: Vec<(usize, usize, f64)> = Vec::new();
    for g in (0..gts.len()).filter(|&g| cared(g)) {
        let mut best: Option<usize> = None;
        for a in 0..anchors.len() {
            if out_of_bounds[a] {
                continue;
            }
            if table[a][g] > 0.0 && best.is_none_or(|b| table[a][g] > table[b][g]) {
                best = Some(a);
            }
        }
        if let Some(a) = best {
            wins.push((a, g, table[a][g]));
        }
    }
    let threshold_positive: Vec<bool> = out.iter().map(|o| o.0 == POSITIVE).collect();
    for a in 0..anchors.len() {
        if threshold_positive[a] {
            continue;
        }
        let mine: Vec<&(usize, usize, f64)> = wins.iter().filter(|w| w.0 == a).collect();
        if mine.is_empty() {
            continue;
        }
        let mut pick = mine[0];
        for w in &mine {
            if w.2 > pick.2 || (w.2 == pick.2 && w.1 < pick.1) {
                pick = w;
            }
        }
        out[a] = (POSITIVE, Some(pick.1));
    }

    for a in 0..anchors.len() {
        if out_of_bounds[a] || out[a].0 == POSITIVE {
            continue;
        }
        if (0..gts.len()).any(|g| gts[g].1 && table[a][g] >= neg) {
            out[a] = (IGNORE, None);
        }
    }
    out
}

fn flood(mask: &[bool], w: usize, h: usize, eight: bool, labels: &mut [u32], r: usize, c: usize, id: u32) {
    labels[r * w + c] = id;
    for dr in -1i64..=1 {
        for dc in -1i64..=1 {
            if (dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0) {
                continue;
            }
            let (nr, nc) = (r as i64 + dr, c as i64 + dc);
            if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                continue;
            }
            let j = nr as usize * w + nc as usize;
            if mask[j] && labels[j] == 0 {
                flood(mask, w, h, eight, labels, nr as usize, nc as usize, id);
            }
        }
    }
}

/// Recursive flood-fill labeling, components numbered in row-major order
/// of their first pixel.
pub fn flood_fill_labels(mask: &[bool], w: usize, h: usize, eight: bool) -> (Vec<u32>, u32) {
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    for r in 0..h {
        for c in 0..w {
            if mask[r * w + c] && labels[r * w + c] == 0 {
                next += 1;
                flood(mask, w, h, eight, &mut labels, r, c, next);
            }
        }
    }
    (labels, next)
}

/// True when both labelings induce the same partition of the pixels,
/// whatever the label values.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| {
        (x == 0) == (y == 0) && *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x
    })
}

/// Crossing-number point-in-polygon test.
pub fn point_in_polygon(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        if (y1 > y) != (y2 > y) {
            let xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
            if x < xc {
                inside = !inside;
            }
        }
    }
    inside
}

/// Pixel `(r, c)` is set when its center `(c + 0.5, r + 0.5)` is inside.
pub fn pixel_center_mask(poly: &[(f64, f64)], w: usize, h: usize) -> Vec<bool> {
    let mut out = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            out.push(point_in_polygon(poly, c as f64 + 0.5, r as f64 + 0.5));
        }
    }
    out
}

/// Anchor-relative box encoding `(dx, dy, dw, dh)`.
pub fn encode(anchor: &Rect, gt: &Rect) -> [f64; 4] {
    let (aw, ah) = (anchor[2] - anchor[0], anchor[3] - anchor[1]);
    let (gw, gh) = (gt[2] - gt[0], gt[3] - gt[1]);
    let (ax, ay) = (anchor[0] + aw / 2.0, anchor[1] + ah / 2.0);
    let (gx, gy) = (gt[0] + gw / 2.0, gt[1] + gh / 2.0);
    [(gx - ax) / aw, (gy - ay) / ah, (gw / aw).ln(), (gh / ah).ln()]
}

pub fn decode(anchor: &Rect, t: &[f64; 4]) -> Rect {
    let (aw, ah) = (anchor[2] - anchor[0], anchor[3] - anchor[1]);
    let cx = anchor[0] + aw / 2.0 + t[0] * aw;
    let cy = anchor[1] + ah / 2.0 + t[1] * ah;
    let (w, h) = (aw * t[2].exp(), ah * t[3].exp());
    [cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0]
}

/// Straight-line proposal pipeline: decode, clip, size filter, per-level
/// top-k, joint NMS, final top-k. Returns `(box, score)` pairs.
#[allow(clippy::too_many_arguments)]
pub fn select_proposals(
    anchors: &[Rect],
    levels: &[u8],
    scores: &[f64],
    deltas: &[[f64; 4]],
    w: f64,
    h: f64,
    pre_k: usize,
    thr: f64,
    post_k: usize,
) -> Vec<(Rect, f64)> {
    let n_levels = levels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut pool: Vec<(Rect, f64)> = Vec::new();
    for level in 0..n_levels {
        let mut cands: Vec<(usize, Rect, f64)> = Vec::new();
        for i in 0..anchors.len() {
            if levels[i] as usize != level {
                continue;
            }
            let d = decode(&anchors[i], &deltas[i]);
            let c = [d[0].clamp(0.0, w), d[1].clamp(0.0, h), d[2].clamp(0.0, w), d[3].clamp(0.0, h)];
            if c[2] - c[0] >= 1.0 && c[3] - c[1] >= 1.0 {
                cands.push((i, c, scores[i]));
            }
        }
        // Stable sort keeps index order among equal scores.
        cands.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());
        pool.extend(cands.into_iter().take(pre_k).map(|(_, r, s)| (r, s)));
    }
    let rects: Vec<Rect> = pool.iter().map(|p| p.0).collect();
    let sc: Vec<f64> = pool.iter().map(|p| p.1).collect();
    nms(&rects, &sc, thr).into_iter().take(post_k).map(|i| pool[i]).collect()
}

/// Central-difference derivative of `f` at `x` along coordinate `i`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut up = x.to_vec();
    let mut down = x.to_vec();
    up[i] += h;
    down[i] -= h;
    (f(&up) - f(&down)) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nms_by_hand() {
        let boxes = [[0.0, 0.0, 10.0, 10.0], [0.0, 0.0, 10.0, 6.0], [20.0, 0.0, 30.0, 10.0]];
        assert_eq!(nms(&boxes, &[0.9, 0.8, 0.1], 0.5), vec![0, 2]);
    }

    #[test]
    fn flood_fill_diagonal() {
        let m = [true, false, false, true];
        assert_eq!(flood_fill_labels(&m, 2, 2, true).1, 1);
        assert_eq!(flood_fill_labels(&m, 2, 2, false).1, 2);
    }

    #[test]
    fn partitions() {
        assert!(same_partition(&[0, 1, 1, 2], &[0, 5, 5, 3]));
        assert!(!same_partition(&[0, 1, 1, 2], &[0, 5, 5, 5]));
        assert!(!same_partition(&[0, 1], &[1, 1]));
    }

    #[test]
    fn point_in_square() {
        let sq = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)];
        assert!(point_in_polygon(&sq, 1.0, 1.0));
        assert!(!point_in_polygon(&sq, 3.0, 1.0));
        assert_eq!(pixel_center_mask(&sq, 3, 3).iter().filter(|&&b| b).count(), 4);
    }
}
