//! Probability map to text polygons: binarize, label, trace, unclip.

mod ccl;
mod contour;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use ccl::{connected_components, Connectivity, Labeling};
pub use contour::trace_contour;

use crate::error::{Error, Result};
use crate::geometry::{min_area_rect, offset_polygon, Polygon};
use crate::loss::ProbMap;
use crate::raster::{BinaryMask, Grid};

pub const DEFAULT_BIN_THRESHOLD: f64 = 0.65;

/// Kernel probability plane: channel 1 of a three-channel map, channel 0 of
/// a single-channel map.
pub fn kernel_channel(prob: &ProbMap) -> Result<Grid<f64>> {
    let ch = match prob.channels() {
        1 => 0,
        3 => 1,
        c => {
            return Err(Error::ShapeMismatch(format!(
                "cannot locate the kernel channel in a {c}-channel map"
            )))
        }
    };
    Grid::from_vec(prob.width(), prob.height(), prob.channel(ch))
}

/// Pixels strictly above `threshold`.
pub fn binarize(plane: &Grid<f64>, threshold: f64) -> BinaryMask {
    plane.map(|&p| p > threshold)
}

/// Outward offset by `area * ratio / perimeter`. A zero ratio returns the
/// input unchanged; if the offset splits, the largest piece is kept.
pub fn unclip(kernel: &Polygon, ratio: f64) -> Result<Polygon> {
    if ratio == 0.0 {
        return Ok(kernel.clone());
    }
    let d = unclip_offset(kernel, ratio);
    offset_polygon(kernel, d)?
        .into_iter()
        .max_by(|a, b| a.area().total_cmp(&b.area()))
        .ok_or_else(|| Error::InvalidGeometry("unclip produced no polygon".into()))
}

pub fn unclip_offset(kernel: &Polygon, ratio: f64) -> f64 {
    kernel.area() * ratio / kernel.perimeter()
}

/// Mean probability over the component's pixels.
pub fn score_component(plane: &Grid<f64>, labels: &Grid<u32>, id: u32) -> Result<f64> {
    if !plane.same_shape(labels) {
        return Err(Error::ShapeMismatch("probability and label planes differ".into()));
    }
    let (sum, n) = plane
        .as_slice()
        .iter()
        .zip(labels.as_slice())
        .filter(|(_, &l)| l == id && id != 0)
        .fold((0.0, 0usize), |(s, n), (&p, _)| (s + p, n + 1));
    if n == 0 {
        return Err(Error::ComponentNotFound(id));
    }
    Ok(sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    #[default]
    Polygon,
    MinAreaRect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    pub bin_threshold: f64,
    pub unclip_ratio: f64,
    /// Components whose mean probability is below this are dropped.
    pub box_score_threshold: f64,
    /// Components with fewer pixels are dropped.
    pub min_area_px: usize,
    pub connectivity: Connectivity,
    pub output_mode: OutputMode,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            bin_threshold: DEFAULT_BIN_THRESHOLD,
            unclip_ratio: 1.5,
            box_score_threshold: 0.6,
            min_area_px: 4,
            connectivity: Connectivity::Eight,
            output_mode: OutputMode::Polygon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub polygons: Vec<Polygon>,
    pub scores: Vec<f64>,
    /// Label of the source component of each polygon.
    pub components: Vec<u32>,
    pub component_count: usize,
    pub kept_count: usize,
    pub elapsed_ms: f64,
}

/// Runs the whole post-process on one map.
pub fn detect(prob: &ProbMap, cfg: &DetectConfig) -> Result<DetectionResult> {
    let t0 = Instant::now();
    let plane = kernel_channel(prob)?;
    let bin = binarize(&plane, cfg.bin_threshold);
    let Labeling { labels, count } = connected_components(&bin, cfg.connectivity);

    let k = count as usize;
    let mut sums = vec![0.0; k + 1];
    let mut sizes = vec![0usize; k + 1];
    for (&l, &p) in labels.as_slice().iter().zip(plane.as_slice()) {
        sums[l as usize] += p;
        sizes[l as usize] += 1;
    }

    let mut out = DetectionResult {
        polygons: Vec::new(),
        scores: Vec::new(),
        components: Vec::new(),
        component_count: k,
        kept_count: 0,
        elapsed_ms: 0.0,
    };
    for id in 1..=count {
        let n = sizes[id as usize];
        let score = sums[id as usize] / n as f64;
        if n < cfg.min_area_px || score < cfg.box_score_threshold {
            continue;
        }
        let kernel = trace_contour(&labels, id)?;
        let mut poly = unclip(&kernel, cfg.unclip_ratio)?;
        if cfg.output_mode == OutputMode::MinAreaRect {
            poly = min_area_rect(&poly).to_polygon()?;
        }
        out.polygons.push(poly);
        out.scores.push(score);
        out.components.push(id);
    }
    out.kept_count = out.polygons.len();
    out.elapsed_ms = t0.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rasterize_fill;
    use crate::loss::MapKind;

    fn plane_map(plane: &Grid<f64>) -> ProbMap {
        ProbMap::new(
            plane.width(),
            plane.height(),
            1,
            MapKind::Probabilities,
            plane.as_slice().to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn binarize_is_strict() {
        assert_eq!(binarize(&Grid::filled(3, 3, 0.65), 0.65).count_set(), 0);
        assert_eq!(binarize(&Grid::filled(3, 3, 0.66), 0.65).count_set(), 9);
    }

    #[test]
    fn unclip_offsets() {
        let sq = Polygon::rect(0.0, 0.0, 6.8, 6.8).unwrap();
        assert!((unclip_offset(&sq, 1.5) - 2.55).abs() < 1e-12);
        assert!((unclip_offset(&sq, 1.3) - 2.21).abs() < 1e-12);
        assert_eq!(unclip(&sq, 0.0).unwrap(), sq);
        let d = 2.55;
        let closed_form = 6.8 * 6.8 + 4.0 * 6.8 * d + std::f64::consts::PI * d * d;
        let a = unclip(&sq, 1.5).unwrap().area();
        assert!((a - closed_form).abs() / closed_form < 0.01, "{a} vs {closed_form}");
    }

    #[test]
    fn scores() {
        let plane = Grid::from_vec(3, 1, vec![0.9, 0.7, 0.0]).unwrap();
        let labels = Grid::from_vec(3, 1, vec![1, 2, 0]).unwrap();
        assert_eq!(score_component(&plane, &labels, 1).unwrap(), 0.9);
        assert_eq!(score_component(&plane, &labels, 2).unwrap(), 0.7);
        assert!(score_component(&plane, &labels, 3).is_err());
    }

    #[test]
    fn two_blocks() {
        let plane = Grid::from_fn(40, 24, |r, c| {
            let block = (2..12).contains(&r) && ((2..12).contains(&c) || (20..30).contains(&c));
            if block {
                0.9
            } else {
                0.0
            }
        });
        let res = detect(&plane_map(&plane), &DetectConfig::default()).unwrap();
        assert_eq!(res.component_count, 2);
        assert_eq!(res.polygons.len(), 2);
        for (poly, id) in res.polygons.iter().zip(&res.components) {
            let cover = rasterize_fill(poly, 40, 24);
            let labels = connected_components(&binarize(&plane, 0.65), Connectivity::Eight).labels;
            for (i, &l) in labels.as_slice().iter().enumerate() {
                if l == *id {
                    assert!(cover.as_slice()[i]);
                }
            }
        }
        assert!(res.scores.iter().all(|&s| (s - 0.9).abs() < 1e-12));
    }

    #[test]
    fn empty_and_tiny() {
        let res = detect(&plane_map(&Grid::filled(8, 8, 0.0)), &DetectConfig::default()).unwrap();
        assert_eq!((res.component_count, res.kept_count), (0, 0));
        let mut plane = Grid::filled(8, 8, 0.0);
        plane.set(3, 3, 0.9);
        plane.set(3, 4, 0.9);
        let res = detect(&plane_map(&plane), &DetectConfig::default()).unwrap();
        assert_eq!((res.component_count, res.kept_count), (1, 0));
    }

    #[test]
    fn rect_mode() {
        let plane = Grid::from_fn(16, 16, |r, c| if (4..8).contains(&r) && (2..12).contains(&c) { 0.8 } else { 0.1 });
        let cfg = DetectConfig {
            output_mode: OutputMode::MinAreaRect,
            ..DetectConfig::default()
        };
        let res = detect(&plane_map(&plane), &cfg).unwrap();
        assert_eq!(res.polygons.len(), 1);
        assert_eq!(res.polygons[0].len(), 4);
    }
}
