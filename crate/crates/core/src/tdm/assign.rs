use serde::{Deserialize, Serialize};

use super::codec::{encode_box, BoxDelta};
use super::{AnchorSet, GtBox};
use crate::geometry::box_iou;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpnAssignConfig {
    pub pos_iou: f64,
    pub neg_iou: f64,
}

impl Default for RpnAssignConfig {
    fn default() -> Self {
        Self {
            pos_iou: 0.7,
            neg_iou: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorLabel {
    Positive,
    Negative,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AssignmentResult {
    pub labels: Vec<AnchorLabel>,
    /// GT index for positive anchors.
    pub matched_gt: Vec<Option<usize>>,
    /// Regression target for positive anchors.
    pub targets: Vec<Option<BoxDelta>>,
    /// Max IoU against non-ignored GTs.
    pub max_iou: Vec<f64>,
}

impl AssignmentResult {
    pub fn count(&self, label: AnchorLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Labels every anchor against the ground truth.
///
/// Rules, in order:
/// 1. Out-of-bounds anchors are ignored and never matched.
/// 2. Against non-ignored GTs: IoU >= `pos_iou` is positive (matched to the
///    highest-IoU GT, lowest index on ties), IoU < `neg_iou` is negative,
///    anything between is ignored.
/// 3. For each non-ignored GT with a positive-IoU anchor, its highest-IoU
///    anchor (lowest anchor index on ties) becomes positive. An anchor that
///    wins several GTs keeps the one it overlaps most.
/// 4. Non-positive anchors overlapping an ignored GT at IoU >= `neg_iou`
///    become ignored.
pub fn assign_rpn(anchors: &AnchorSet, gts: &[GtBox], cfg: &RpnAssignConfig) -> AssignmentResult {
    let n = anchors.len();
    let mut out = AssignmentResult {
        labels: vec![AnchorLabel::Ignore; n],
        matched_gt: vec![None; n],
        targets: vec![None; n],
        max_iou: vec![0.0; n],
    };
    let care: Vec<usize> = (0..gts.len()).filter(|&g| !gts[g].ignore).collect();
    let dont_care: Vec<usize> = (0..gts.len()).filter(|&g| gts[g].ignore).collect();

    // Best in-bounds anchor per cared GT: (iou, anchor).
    let mut best: Vec<(f64, usize)> = vec![(0.0, usize::MAX); care.len()];

    for a in 0..n {
        if anchors.out_of_bounds[a] {
            continue;
        }
        let abox = &anchors.boxes[a];
        let mut max = 0.0;
        let mut arg = None;
        for (k, &g) in care.iter().enumerate() {
            let iou = box_iou(abox, &gts[g].bbox);
            if iou > max {
                max = iou;
                arg = Some(g);
            }
            if iou > best[k].0 {
                best[k] = (iou, a);
            }
        }
        out.max_iou[a] = max;
        out.labels[a] = if max >= cfg.pos_iou {
            out.matched_gt[a] = arg;
            AnchorLabel::Positive
        } else if max < cfg.neg_iou {
            AnchorLabel::Negative
        } else {
            AnchorLabel::Ignore
        };
    }

    let mut won: Vec<Option<(f64, usize)>> = vec![None; n];
    for (k, &(iou, a)) in best.iter().enumerate() {
        if iou <= 0.0 || out.labels[a] == AnchorLabel::Positive {
            continue;
        }
        if won[a].is_none_or(|(w, _)| iou > w) {
            won[a] = Some((iou, care[k]));
        }
    }
    for (a, w) in won.iter().enumerate() {
        if let Some((_, g)) = *w {
            out.labels[a] = AnchorLabel::Positive;
            out.matched_gt[a] = Some(g);
        }
    }

    if !dont_care.is_empty() {
        for a in 0..n {
            if anchors.out_of_bounds[a] || out.labels[a] == AnchorLabel::Positive {
                continue;
            }
            let abox = &anchors.boxes[a];
            if dont_care.iter().any(|&g| box_iou(abox, &gts[g].bbox) >= cfg.neg_iou) {
                out.labels[a] = AnchorLabel::Ignore;
            }
        }
    }

    for a in 0..n {
        if let Some(g) = out.matched_gt[a] {
            out.targets[a] = encode_box(&anchors.boxes[a], &gts[g].bbox).ok();
        }
    }
    out
}
