use serde::{Deserialize, Serialize};

use super::codec::{decode_box, BoxDelta};
use super::nms::{nms, score_order};
use super::AnchorSet;
use crate::error::{Error, Result};
use crate::geometry::BBox;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalConfig {
    /// Candidates kept per pyramid level before NMS.
    pub pre_nms_k: usize,
    pub nms_threshold: f64,
    pub post_nms_k: usize,
    /// Minimum side length after clipping.
    pub min_size: f64,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        Self {
            pre_nms_k: 1000,
            nms_threshold: 0.7,
            post_nms_k: 300,
            min_size: 1.0,
        }
    }
}

/// Decodes, clips and filters anchor regressions, keeps the best
/// `pre_nms_k` per level, then runs a joint NMS and truncates to
/// `post_nms_k`. Returned boxes carry their score, highest first.
pub fn select_proposals(
    anchors: &AnchorSet,
    scores: &[f64],
    deltas: &[BoxDelta],
    image_w: usize,
    image_h: usize,
    cfg: &ProposalConfig,
) -> Result<Vec<BBox>> {
    if scores.len() != anchors.len() || deltas.len() != anchors.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} anchors, {} scores, {} deltas",
            anchors.len(),
            scores.len(),
            deltas.len()
        )));
    }
    let (w, h) = (image_w as f64, image_h as f64);
    let levels = anchors.levels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut per_level: Vec<Vec<BBox>> = vec![Vec::new(); levels];
    for i in 0..anchors.len() {
        let b = decode_box(&anchors.boxes[i], &deltas[i]).clip(w, h);
        if b.width() < cfg.min_size || b.height() < cfg.min_size {
            continue;
        }
        per_level[anchors.levels[i] as usize].push(b.with_score(scores[i]));
    }
    let mut pool = Vec::new();
    for level in &per_level {
        let order = score_order(level);
        pool.extend(order.into_iter().take(cfg.pre_nms_k).map(|i| level[i]));
    }
    let keep = nms(&pool, cfg.nms_threshold);
    Ok(keep.into_iter().take(cfg.post_nms_k).map(|i| pool[i]).collect())
}
