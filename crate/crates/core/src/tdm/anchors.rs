use crate::geometry::BBox;

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSpec {
    /// Image pixels per feature cell, one entry per pyramid level.
    pub strides: Vec<u32>,
    /// Width / height ratios generated at every location.
    pub aspect_ratios: Vec<f64>,
    /// Side of the square anchor on each level; same length as `strides`.
    pub base_scales: Vec<f64>,
}

impl Default for AnchorSpec {
    fn default() -> Self {
        let strides = vec![4, 8, 16, 32, 64];
        let base_scales = strides.iter().map(|&s| 8.0 * s as f64).collect();
        Self {
            strides,
            aspect_ratios: vec![0.2, 0.5, 1.0, 2.0, 5.0],
            base_scales,
        }
    }
}

impl AnchorSpec {
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: &str| Err(crate::Error::InvalidGeometry(format!("anchor spec: {m}")));
        if self.strides.is_empty() || self.strides.len() != self.base_scales.len() {
            return bad("need one base scale per stride");
        }
        if self.strides.windows(2).any(|w| w[0] >= w[1]) || self.strides[0] == 0 {
            return bad("strides must be positive and strictly increasing");
        }
        if self.aspect_ratios.is_empty() || self.aspect_ratios.iter().any(|&r| !(r > 0.0)) {
            return bad("aspect ratios must be positive");
        }
        if self.base_scales.iter().any(|&s| !(s > 0.0)) {
            return bad("base scales must be positive");
        }
        Ok(())
    }
}

/// Anchors in level-major, then row-major, then ratio order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnchorSet {
    pub boxes: Vec<BBox>,
    /// Pyramid level of each anchor.
    pub levels: Vec<u8>,
    /// Anchor extends past the image border.
    pub out_of_bounds: Vec<bool>,
}

impl AnchorSet {
    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

/// Dense anchors over the image: one center per feature cell at
/// `((col + 0.5) * stride, (row + 0.5) * stride)` with one box per ratio of
/// area `base_scale^2`. Boxes are not clipped; those crossing the border
/// are flagged.
pub fn build_anchors(spec: &AnchorSpec, image_w: usize, image_h: usize) -> AnchorSet {
    let mut set = AnchorSet::default();
    let (w, h) = (image_w as f64, image_h as f64);
    for (level, (&stride, &scale)) in spec.strides.iter().zip(&spec.base_scales).enumerate() {
        let s = stride as usize;
        let rows = image_h.div_ceil(s);
        let cols = image_w.div_ceil(s);
        let shapes: Vec<(f64, f64)> = spec
            .aspect_ratios
            .iter()
            .map(|&r| (scale * r.sqrt(), scale / r.sqrt()))
            .collect();
        for row in 0..rows {
            let cy = (row as f64 + 0.5) * stride as f64;
            for col in 0..cols {
                let cx = (col as f64 + 0.5) * stride as f64;
                for &(bw, bh) in &shapes {
                    let b = BBox::from_center(cx, cy, bw, bh);
                    set.out_of_bounds
                        .push(b.x_min < 0.0 || b.y_min < 0.0 || b.x_max > w || b.y_max > h);
                    set.boxes.push(b);
                    set.levels.push(level as u8);
                }
            }
        }
    }
    set
}
