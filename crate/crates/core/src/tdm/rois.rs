use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::codec::{encode_box, BoxDelta};
use super::GtBox;
use crate::geometry::{box_iou, BBox};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiConfig {
    pub fg_iou: f64,
    /// Background pool is `[bg_iou_lo, bg_iou_hi)`.
    pub bg_iou_lo: f64,
    pub bg_iou_hi: f64,
    pub batch: usize,
    pub fg_fraction: f64,
}

impl Default for RoiConfig {
    fn default() -> Self {
        Self {
            fg_iou: 0.5,
            bg_iou_lo: 0.1,
            bg_iou_hi: 0.5,
            batch: 128,
            fg_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoiLabel {
    Text,
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiTarget {
    pub proposal: usize,
    pub label: RoiLabel,
    pub gt: Option<usize>,
    pub target: Option<BoxDelta>,
}

/// Samples a fixed-size RoI batch. At most `floor(batch * fg_fraction)`
/// foreground proposals are drawn, the rest of the batch from the
/// background pool. Ignored GTs take no part in matching. The result lists
/// foreground then background, each in ascending proposal index.
pub fn assign_rois(proposals: &[BBox], gts: &[GtBox], cfg: &RoiConfig, seed: u64) -> Vec<RoiTarget> {
    let mut fg = Vec::new();
    let mut bg = Vec::new();
    for (p, pb) in proposals.iter().enumerate() {
        let mut max = 0.0;
        let mut arg = None;
        for (g, gt) in gts.iter().enumerate() {
            if gt.ignore {
                continue;
            }
            let iou = box_iou(pb, &gt.bbox);
            if iou > max {
                max = iou;
                arg = Some(g);
            }
        }
        if max >= cfg.fg_iou {
            fg.push((p, arg.expect("positive IoU has a GT")));
        } else if max >= cfg.bg_iou_lo && max < cfg.bg_iou_hi {
            bg.push(p);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fg_cap = (cfg.batch as f64 * cfg.fg_fraction).floor() as usize;
    let n_fg = fg_cap.min(fg.len());
    let n_bg = (cfg.batch - n_fg).min(bg.len());
    let mut fg_pick = sample(&mut rng, fg.len(), n_fg).into_vec();
    let mut bg_pick = sample(&mut rng, bg.len(), n_bg).into_vec();
    fg_pick.sort_unstable();
    bg_pick.sort_unstable();

    let mut out = Vec::with_capacity(n_fg + n_bg);
    for k in fg_pick {
        let (p, g) = fg[k];
        out.push(RoiTarget {
            proposal: p,
            label: RoiLabel::Text,
            gt: Some(g),
            target: encode_box(&proposals[p], &gts[g].bbox).ok(),
        });
    }
    for k in bg_pick {
        out.push(RoiTarget {
            proposal: bg[k],
            label: RoiLabel::Background,
            gt: None,
            target: None,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_proposal_is_text() {
        let gt = BBox::new(10.0, 10.0, 40.0, 20.0);
        let props = [gt, BBox::new(100.0, 100.0, 110.0, 110.0), BBox::new(10.0, 10.0, 40.0, 12.0)];
        let r = assign_rois(&props, &[GtBox::new(gt)], &RoiConfig::default(), 7);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].proposal, 0);
        assert_eq!(r[0].label, RoiLabel::Text);
        assert_eq!(r[0].target, Some(BoxDelta::default()));
        assert_eq!(r[1].proposal, 2);
        assert_eq!(r[1].label, RoiLabel::Background);
    }

    #[test]
    fn no_foreground() {
        let props = [BBox::new(0.0, 0.0, 10.0, 10.0)];
        let gts = [GtBox::new(BBox::new(5.0, 0.0, 15.0, 10.0))];
        let r = assign_rois(&props, &gts, &RoiConfig::default(), 0);
        assert!(r.iter().all(|t| t.label == RoiLabel::Background));
        assert_eq!(r.len(), 1);
    }
}
