use super::maps::{MapKind, ProbMap};
use super::LossGrad;
use crate::error::{Error, Result};
use crate::labelgen::{ClassCounts, ClassMask, SupervisionMode};
use crate::raster::BinaryMask;

/// Floor applied to a probability before taking its log.
pub const LOG_EPS: f64 = 1e-12;

/// Per-class loss weights. Three entries are indexed by class id
/// (non-text, kernel, border); two entries by (background, kernel).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeights(Vec<f64>);

impl ClassWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if !(w.len() == 2 || w.len() == 3) || w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::DegenerateCounts(format!("invalid class weights {w:?}")));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn for_pixel(&self, class: u8) -> f64 {
        match self.0.len() {
            2 => self.0[usize::from(class == 1)],
            _ => self.0[class as usize],
        }
    }
}

fn ratio(num: usize, den: usize) -> Result<f64> {
    match (num, den) {
        (0, _) => Ok(1.0),
        (n, 0) => Err(Error::DegenerateCounts(format!("{n} / 0"))),
        (n, d) => Ok(n as f64 / d as f64),
    }
}

/// Class-balancing weights from pixel counts.
///
/// Modes 3 to 5 weight non-text, kernel and border by
/// `[1, N_nt / N_tk, N_nt / N_tb]`. Mode 2 treats the border as background:
/// `[1, (N_nt + N_tb) / N_tk]`. Mode 1 is unweighted. Text-free images get
/// all-ones weights, and a ratio with a zero numerator is replaced by 1.
pub fn class_weights(mode: SupervisionMode, counts: ClassCounts) -> Result<ClassWeights> {
    let ClassCounts {
        non_text,
        kernel,
        border,
    } = counts;
    let w = match mode {
        SupervisionMode::Kernel => vec![1.0; 3],
        _ if kernel == 0 && border == 0 => match mode {
            SupervisionMode::KernelWeighted => vec![1.0; 2],
            _ => vec![1.0; 3],
        },
        SupervisionMode::KernelWeighted => vec![1.0, ratio(non_text + border, kernel)?],
        _ => vec![1.0, ratio(non_text, kernel)?, ratio(non_text, border)?],
    };
    ClassWeights::new(w)
}

/// Mean weighted cross-entropy over all pixels and its gradient with
/// respect to every entry of `p`.
///
/// `p` holds (non-text, kernel, border) probabilities per pixel. The
/// supervised distribution depends on the mode:
/// - modes 1 and 2: kernel against the summed non-text and border channels;
/// - mode 3: three channels, border pixels targeted at non-text;
/// - mode 4: three channels against the full class mask;
/// - mode 5: the summed kernel and border channels against non-text.
///
/// Pixel weights come from the true class id; pixels set in `ignore` get
/// weight 0. Probabilities below [`LOG_EPS`] are clamped, which zeroes
/// their gradient.
pub fn seg_loss(
    p: &ProbMap,
    y: &ClassMask,
    mode: SupervisionMode,
    w: &ClassWeights,
    ignore: Option<&BinaryMask>,
) -> Result<LossGrad> {
    if p.kind() != MapKind::Probabilities {
        return Err(Error::ShapeMismatch("seg_loss needs probabilities".into()));
    }
    if p.channels() != 3 {
        return Err(Error::ShapeMismatch(format!("{} channels, expected 3", p.channels())));
    }
    if p.width() != y.width() || p.height() != y.height() {
        return Err(Error::ShapeMismatch(format!(
            "probabilities {}x{} vs labels {}x{}",
            p.height(),
            p.width(),
            y.height(),
            y.width()
        )));
    }
    if let Some(m) = ignore {
        if m.width() != y.width() || m.height() != y.height() {
            return Err(Error::ShapeMismatch("ignore mask shape".into()));
        }
    }
    if w.0.len() == 2 && !matches!(mode, SupervisionMode::Kernel | SupervisionMode::KernelWeighted) {
        return Err(Error::ShapeMismatch(format!(
            "mode {} needs three class weights",
            mode.id()
        )));
    }

    let n = p.pixels();
    let scale = 1.0 / n as f64;
    let probs = p.as_slice();
    let classes = y.grid().as_slice();
    let mut grad = vec![0.0; probs.len()];
    let mut loss = 0.0;
    for i in 0..n {
        if ignore.is_some_and(|m| m.as_slice()[i]) {
            continue;
        }
        let class = classes[i];
        let weight = w.for_pixel(class) * scale;
        // Channels whose probabilities are summed into the target.
        let target: &[usize] = match mode {
            SupervisionMode::Kernel | SupervisionMode::KernelWeighted => {
                if class == 1 {
                    &[1]
                } else {
                    &[0, 2]
                }
            }
            SupervisionMode::KernelBorderWeighted => {
                if class == 1 {
                    &[1]
                } else {
                    &[0]
                }
            }
            SupervisionMode::ThreeClass => match class {
                1 => &[1],
                2 => &[2],
                _ => &[0],
            },
            SupervisionMode::TextRegion => {
                if class == 0 {
                    &[0]
                } else {
                    &[1, 2]
                }
            }
        };
        let px = &probs[3 * i..3 * i + 3];
        let q: f64 = target.iter().map(|&c| px[c]).sum();
        if q < LOG_EPS {
            loss -= weight * LOG_EPS.ln();
        } else {
            loss -= weight * q.ln();
            let g = -weight / q;
            for &c in target {
                grad[3 * i + c] = g;
            }
        }
    }
    Ok(LossGrad { loss, grad })
}
