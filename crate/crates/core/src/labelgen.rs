//! Training targets from polygon annotations: the three-class kernel/border
//! mask, the binary text and do-not-care masks, and per-instance boxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bounding_box, fill_into, offset_polygon, Polygon};
use crate::raster::{BinaryMask, Grid};
use crate::tdm::GtBox;

pub const DEFAULT_SHRINK_RATIO: f64 = 0.6;

/// Label id of the text class in box targets.
pub const TEXT_LABEL: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub polygon: Polygon,
    #[serde(default)]
    pub ignore: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl Annotation {
    pub fn new(polygon: Polygon) -> Self {
        Self {
            polygon,
            ignore: false,
            text: None,
        }
    }

    pub fn ignored(polygon: Polygon) -> Self {
        Self {
            polygon,
            ignore: true,
            text: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PixelClass {
    NonText = 0,
    Kernel = 1,
    Border = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub non_text: usize,
    pub kernel: usize,
    pub border: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.non_text + self.kernel + self.border
    }
}

/// Per-pixel class ids in `{0 non-text, 1 kernel, 2 border}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMask(Grid<u8>);

impl ClassMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self(Grid::new(width, height))
    }

    /// Fails if any value is outside `{0, 1, 2}`.
    pub fn from_grid(grid: Grid<u8>) -> Result<Self> {
        if let Some(v) = grid.as_slice().iter().find(|&&v| v > 2) {
            return Err(Error::Format(format!("class id {v} out of range")));
        }
        Ok(Self(grid))
    }

    pub fn grid(&self) -> &Grid<u8> {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn class_at(&self, row: usize, col: usize) -> PixelClass {
        match *self.0.get(row, col) {
            1 => PixelClass::Kernel,
            2 => PixelClass::Border,
            _ => PixelClass::NonText,
        }
    }

    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for &v in self.0.as_slice() {
            match v {
                1 => c.kernel += 1,
                2 => c.border += 1,
                _ => c.non_text += 1,
            }
        }
        c
    }

    pub fn mask_of(&self, class: PixelClass) -> BinaryMask {
        self.0.map(|&v| v == class as u8)
    }

    /// Kernel or border.
    pub fn text_mask(&self) -> BinaryMask {
        self.0.map(|&v| v != 0)
    }
}

/// The five supervision settings of the segmentation baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupervisionMode {
    /// Kernel vs. non-kernel, unweighted.
    Kernel = 1,
    /// Kernel vs. non-kernel with two-class weights.
    KernelWeighted = 2,
    /// Kernel vs. non-kernel with three-class weights.
    KernelBorderWeighted = 3,
    /// Explicit kernel / border / non-text supervision, three-class weights.
    ThreeClass = 4,
    /// Text (kernel + border) vs. non-text with three-class weights.
    TextRegion = 5,
}

impl SupervisionMode {
    pub fn from_id(id: u8) -> Result<Self> {
        Ok(match id {
            1 => Self::Kernel,
            2 => Self::KernelWeighted,
            3 => Self::KernelBorderWeighted,
            4 => Self::ThreeClass,
            5 => Self::TextRegion,
            _ => {
                return Err(Error::InvalidGeometry(format!(
                    "supervision mode {id} not in 1..=5"
                )))
            }
        })
    }

    pub fn id(self) -> u8 {
        self as u8
    }
}

/// Shrink distance `A (1 - r^2) / L` for shrink ratio `r` in `(0, 1]`.
pub fn shrink_offset(p: &Polygon, ratio: f64) -> Result<f64> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidGeometry(format!(
            "shrink ratio {ratio} outside (0, 1]"
        )));
    }
    let perimeter = p.perimeter();
    if perimeter <= 0.0 {
        return Err(Error::InvalidGeometry("zero perimeter".into()));
    }
    Ok((p.area() * (1.0 - ratio * ratio) / perimeter).max(0.0))
}

#[derive(Debug, Clone)]
pub struct InstanceKernel {
    /// Index into the annotation list.
    pub index: usize,
    pub pieces: Vec<Polygon>,
    /// The inward offset collapsed and the kernel is the polygon scaled
    /// about its centroid instead.
    pub fallback: bool,
}

/// Kernel polygons of every non-ignored annotation.
pub fn instance_kernels(annots: &[Annotation], ratio: f64) -> Result<Vec<InstanceKernel>> {
    let mut out = Vec::new();
    for (index, a) in annots.iter().enumerate() {
        if a.ignore {
            continue;
        }
        let d = shrink_offset(&a.polygon, ratio)?;
        let (pieces, fallback) = kernel_pieces(&a.polygon, d, ratio)?;
        out.push(InstanceKernel {
            index,
            pieces,
            fallback,
        });
    }
    Ok(out)
}

fn kernel_pieces(p: &Polygon, d: f64, ratio: f64) -> Result<(Vec<Polygon>, bool)> {
    if d <= 0.0 {
        return Ok((vec![p.clone()], false));
    }
    let pieces = offset_polygon(p, -d)?;
    if !pieces.is_empty() {
        return Ok((pieces, false));
    }
    let scaled = p.scale_about(p.centroid(), ratio).map(|k| vec![k]).unwrap_or_default();
    Ok((scaled, true))
}

/// Three-class mask: every non-ignored polygon is painted as border, then
/// every kernel (clipped to its own polygon's raster) is painted on top.
pub fn generate_class_mask(
    annots: &[Annotation],
    width: usize,
    height: usize,
    ratio: f64,
) -> Result<ClassMask> {
    Ok(class_mask_from_kernels(
        annots,
        &instance_kernels(annots, ratio)?,
        width,
        height,
    ))
}

/// Paints precomputed kernels; see [`generate_class_mask`].
pub fn class_mask_from_kernels(
    annots: &[Annotation],
    kernels: &[InstanceKernel],
    width: usize,
    height: usize,
) -> ClassMask {
    let mut classes: Grid<u8> = Grid::new(width, height);
    for k in kernels {
        fill_into(&annots[k.index].polygon, &mut classes, PixelClass::Border as u8);
    }
    // Per-instance stamp: each kernel is clipped to its own polygon.
    let mut stamp: Grid<u32> = Grid::new(width, height);
    let mut kernel_px: Grid<bool> = Grid::new(width, height);
    for (n, k) in kernels.iter().enumerate() {
        let id = n as u32 + 1;
        fill_into(&annots[k.index].polygon, &mut stamp, id);
        for piece in &k.pieces {
            let bb = bounding_box(piece);
            fill_into(piece, &mut kernel_px, true);
            let (r0, r1, c0, c1) = clamp_rows_cols(&bb, width, height);
            for row in r0..r1 {
                for col in c0..c1 {
                    if *kernel_px.get(row, col) {
                        kernel_px.set(row, col, false);
                        if *stamp.get(row, col) == id {
                            classes.set(row, col, PixelClass::Kernel as u8);
                        }
                    }
                }
            }
        }
    }
    ClassMask(classes)
}

fn clamp_rows_cols(
    bb: &crate::geometry::BBox,
    width: usize,
    height: usize,
) -> (usize, usize, usize, usize) {
    let clamp = |v: f64, hi: usize| (v.max(0.0) as usize).min(hi);
    (
        clamp(bb.y_min.floor(), height),
        clamp(bb.y_max.ceil() + 1.0, height),
        clamp(bb.x_min.floor(), width),
        clamp(bb.x_max.ceil() + 1.0, width),
    )
}

fn union_mask(annots: &[Annotation], width: usize, height: usize, ignore: bool) -> BinaryMask {
    let mut mask = BinaryMask::new(width, height);
    for a in annots.iter().filter(|a| a.ignore == ignore) {
        fill_into(&a.polygon, &mut mask, true);
    }
    mask
}

/// Union of the non-ignored polygon rasters.
pub fn generate_text_mask(annots: &[Annotation], width: usize, height: usize) -> BinaryMask {
    union_mask(annots, width, height, false)
}

/// Union of the do-not-care polygon rasters.
pub fn generate_ignore_mask(annots: &[Annotation], width: usize, height: usize) -> BinaryMask {
    union_mask(annots, width, height, true)
}

/// One box per annotation; ignored annotations come back flagged.
pub fn generate_tdm_boxes(annots: &[Annotation]) -> Vec<GtBox> {
    annots
        .iter()
        .map(|a| GtBox {
            bbox: bounding_box(&a.polygon).with_label(TEXT_LABEL),
            ignore: a.ignore,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rasterize_fill;

    fn square(x: f64, y: f64, side: f64) -> Polygon {
        Polygon::rect(x, y, x + side, y + side).unwrap()
    }

    #[test]
    fn shrink_offset_examples() {
        assert!((shrink_offset(&square(0.0, 0.0, 10.0), 0.6).unwrap() - 1.6).abs() < 1e-15);
        assert_eq!(shrink_offset(&square(0.0, 0.0, 10.0), 1.0).unwrap(), 0.0);
        let tri = Polygon::from_coords(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]).unwrap();
        assert!((shrink_offset(&tri, 0.6).unwrap() - 0.32).abs() < 1e-15);
        assert!(shrink_offset(&tri, 0.0).is_err());
    }

    #[test]
    fn single_square_counts() {
        let annots = [Annotation::new(square(0.0, 0.0, 10.0))];
        let m = generate_class_mask(&annots, 16, 16, 0.6).unwrap();
        let c = m.counts();
        // Kernel spans [1.6, 8.4]; pixel centers 2.5..=7.5 fall inside.
        assert_eq!(c.kernel, 36, "{c:?}");
        assert_eq!(c.kernel + c.border, 100);
        assert_eq!(c.total(), 256);
    }

    #[test]
    fn empty_annotations() {
        let m = generate_class_mask(&[], 8, 8, 0.6).unwrap();
        assert_eq!(m.counts().non_text, 64);
        assert_eq!(generate_text_mask(&[], 8, 8).count_set(), 0);
        assert_eq!(generate_ignore_mask(&[], 8, 8).count_set(), 0);
        assert!(generate_tdm_boxes(&[]).is_empty());
    }

    #[test]
    fn disjoint_instances_do_not_interact() {
        let one = generate_class_mask(&[Annotation::new(square(0.0, 0.0, 10.0))], 40, 16, 0.6)
            .unwrap()
            .counts();
        let two = generate_class_mask(
            &[
                Annotation::new(square(0.0, 0.0, 10.0)),
                Annotation::new(square(20.0, 0.0, 10.0)),
            ],
            40,
            16,
            0.6,
        )
        .unwrap()
        .counts();
        assert_eq!(two.kernel, 2 * one.kernel);
        assert_eq!(two.border, 2 * one.border);
    }

    #[test]
    fn ratio_one_kernel_is_polygon() {
        let p = Polygon::from_coords(&[(1.0, 1.0), (12.0, 2.0), (9.0, 11.0), (2.0, 8.0)]).unwrap();
        let m = generate_class_mask(&[Annotation::new(p.clone())], 16, 16, 1.0).unwrap();
        assert_eq!(m.mask_of(PixelClass::Kernel), rasterize_fill(&p, 16, 16));
        assert_eq!(m.counts().border, 0);
    }

    #[test]
    fn collapsed_kernel_falls_back_to_scaling() {
        let sq = square(0.0, 0.0, 10.0);
        let (pieces, fallback) = kernel_pieces(&sq, 6.0, 0.6).unwrap();
        assert!(fallback);
        assert_eq!(pieces.len(), 1);
        assert!((pieces[0].area() - 36.0).abs() < 1e-9);
        let (pieces, fallback) = kernel_pieces(&sq, 1.6, 0.6).unwrap();
        assert!(!fallback);
        assert!((pieces[0].area() - 6.8 * 6.8).abs() < 1e-5);
    }

    #[test]
    fn ignore_regions_only_in_ignore_mask() {
        let annots = [
            Annotation::new(square(0.0, 0.0, 6.0)),
            Annotation::ignored(square(8.0, 0.0, 6.0)),
        ];
        let m = generate_class_mask(&annots, 16, 8, 0.6).unwrap();
        assert_eq!(m.text_mask(), generate_text_mask(&annots, 16, 8));
        assert_eq!(generate_ignore_mask(&annots, 16, 8).count_set(), 36);
        let boxes = generate_tdm_boxes(&annots);
        assert_eq!(boxes.len(), 2);
        assert!(!boxes[0].ignore && boxes[1].ignore);
        assert_eq!(boxes[0].bbox.label, Some(TEXT_LABEL));
    }

    #[test]
    fn diamond_box() {
        let d = Polygon::from_coords(&[(5.0, 0.0), (10.0, 5.0), (5.0, 10.0), (0.0, 5.0)]).unwrap();
        let b = generate_tdm_boxes(&[Annotation::new(d)]);
        let bb = b[0].bbox;
        assert_eq!((bb.x_min, bb.y_min, bb.x_max, bb.y_max), (0.0, 0.0, 10.0, 10.0));
        assert_eq!(bb.label, Some(1));
    }
}
