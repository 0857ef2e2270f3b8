//! One-to-one IoU matching with do-not-care regions, micro-averaged
//! precision / recall / F-measure and throughput figures.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::geometry::{overlap_counts, polygon_iou, Polygon};
use crate::labelgen::Annotation;

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;
/// Detections covering more than this fraction of their own area with a
/// do-not-care region are discarded.
pub const IGNORE_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub polygon: Polygon,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub det: usize,
    pub gt: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ImageMatch {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub matches: Vec<Match>,
    /// Detections dropped for overlapping a do-not-care region.
    pub ignored_dets: Vec<usize>,
}

/// Greedy one-to-one matching on one image.
///
/// Detections are visited by descending score, ties by input index. Each
/// takes the unmatched cared-for GT of highest IoU (lowest index on ties)
/// if that IoU reaches `iou_threshold`.
pub fn match_image(dets: &[Detection], gts: &[Annotation], iou_threshold: f64) -> ImageMatch {
    let ignore: Vec<&Polygon> = gts.iter().filter(|g| g.ignore).map(|g| &g.polygon).collect();
    let care: Vec<usize> = (0..gts.len()).filter(|&g| !gts[g].ignore).collect();

    let mut out = ImageMatch::default();
    let mut live = Vec::with_capacity(dets.len());
    for (i, d) in dets.iter().enumerate() {
        let dropped = ignore.iter().any(|g| {
            let (na, _, inter) = overlap_counts(&d.polygon, g);
            na > 0 && inter as f64 / na as f64 > IGNORE_OVERLAP
        });
        if dropped {
            out.ignored_dets.push(i);
        } else {
            live.push(i);
        }
    }
    live.sort_by(|&a, &b| {
        dets[b]
            .score
            .partial_cmp(&dets[a].score)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut taken = vec![false; care.len()];
    for &d in &live {
        let mut best: Option<(usize, f64)> = None;
        for (k, &g) in care.iter().enumerate() {
            if taken[k] {
                continue;
            }
            let iou = polygon_iou(&dets[d].polygon, &gts[g].polygon);
            if iou >= iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((k, iou));
            }
        }
        if let Some((k, iou)) = best {
            taken[k] = true;
            out.matches.push(Match {
                det: d,
                gt: care[k],
                iou,
            });
        }
    }
    out.tp = out.matches.len();
    out.fp = live.len() - out.tp;
    out.fn_ = care.len() - out.tp;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImageStats {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Detection time for the image, when measured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms: Option<f64>,
}

impl From<&ImageMatch> for ImageStats {
    fn from(m: &ImageMatch) -> Self {
        Self {
            tp: m.tp,
            fp: m.fp,
            fn_: m.fn_,
            ms: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub fps: f64,
    pub mean_ms: f64,
    pub median_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub fmeasure: f64,
    pub per_image: Vec<ImageStats>,
    /// Present only when every image carries a time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn fmeasure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Median of a sample; mean of the two middle values for even sizes.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Summarizes per-image times: `fps = images / total seconds`.
pub fn timing_from_ms(ms: &[f64]) -> Option<Timing> {
    let total: f64 = ms.iter().sum();
    if ms.is_empty() || total <= 0.0 {
        return None;
    }
    Some(Timing {
        fps: ms.len() as f64 / (total / 1e3),
        mean_ms: total / ms.len() as f64,
        median_ms: median(ms),
    })
}

/// Micro-averaged metrics over all images, folded in input order.
pub fn aggregate(per_image: &[ImageStats]) -> EvalReport {
    let (tp, fp, fn_) = per_image
        .iter()
        .fold((0, 0, 0), |(a, b, c), s| (a + s.tp, b + s.fp, c + s.fn_));
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let ms: Option<Vec<f64>> = per_image.iter().map(|s| s.ms).collect();
    EvalReport {
        tp,
        fp,
        fn_,
        precision,
        recall,
        fmeasure: fmeasure(precision, recall),
        per_image: per_image.to_vec(),
        timing: ms.and_then(|m| timing_from_ms(&m)),
    }
}
