//! Seeded finite-difference suite over every loss kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fd::{fd_coordinates, finite_difference_check, FdReport, FD_STEP};
use super::{class_weights, gdsc_loss, seg_loss, smooth_l1, softmax, ClassWeights, MapKind, ProbMap};
use crate::error::{Error, Result};
use crate::labelgen::{ClassMask, SupervisionMode};
use crate::raster::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precision {
    /// Inputs rounded to `f32` before the check.
    Single,
    Double,
}

impl Precision {
    pub fn tolerance(self) -> f64 {
        match self {
            Self::Single => 1e-4,
            Self::Double => 1e-6,
        }
    }

    pub fn bits(self) -> u8 {
        match self {
            Self::Single => 32,
            Self::Double => 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckConfig {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    /// Coordinates checked per kernel.
    pub coords: usize,
    pub precision: Precision,
    /// Perturbs one analytic gradient entry; the suite must then fail.
    pub corrupt: bool,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            width: 8,
            height: 8,
            coords: 16,
            precision: Precision::Double,
            corrupt: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheck {
    pub name: String,
    pub max_rel_error: f64,
    pub checked: usize,
    pub tolerance: f64,
    pub passed: bool,
}

fn round(x: f64, p: Precision) -> f64 {
    match p {
        Precision::Single => f64::from(x as f32),
        Precision::Double => x,
    }
}

fn check(
    name: String,
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    mut analytic: Vec<f64>,
    cfg: &GradCheckConfig,
    salt: u64,
) -> GradCheck {
    let coords = fd_coordinates(x0.len(), cfg.coords, cfg.seed ^ salt);
    if cfg.corrupt {
        if let Some(&i) = coords.first() {
            analytic[i] += 0.01 * analytic[i].abs().max(1.0);
        }
    }
    let FdReport {
        max_rel_error,
        checked,
        ..
    } = finite_difference_check(f, x0, &analytic, &coords, FD_STEP);
    let tolerance = cfg.precision.tolerance();
    GradCheck {
        name,
        max_rel_error,
        checked,
        tolerance,
        passed: max_rel_error <= tolerance,
    }
}

/// Checks segmentation CE in all five modes, the dice loss and smooth L1
/// on random fixtures of the configured size.
pub fn run_gradient_suite(cfg: &GradCheckConfig) -> Result<Vec<GradCheck>> {
    let (w, h) = (cfg.width, cfg.height);
    if w == 0 || h == 0 {
        return Err(Error::ShapeMismatch(format!("fixture size {h}x{w}")));
    }
    let p = cfg.precision;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();

    let logits: Vec<f64> = (0..w * h * 3).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let probs = softmax(&ProbMap::new(w, h, 3, MapKind::Logits, logits)?);
    let x0: Vec<f64> = probs.as_slice().iter().map(|&v| round(v, p)).collect();
    let labels = ClassMask::from_grid(Grid::from_fn(w, h, |_, _| rng.gen_range(0..3u8)))?;
    let ignore = Grid::from_fn(w, h, |_, _| rng.gen_bool(0.1));
    let map_of = |x: &[f64]| {
        let mut q = probs.clone();
        q.as_mut_slice().copy_from_slice(x);
        q
    };
    for (k, mode) in (1..=5u8).map(SupervisionMode::from_id).enumerate() {
        let mode = mode?;
        let weights = match class_weights(mode, labels.counts()) {
            Ok(wts) => wts,
            Err(Error::DegenerateCounts(_)) => ClassWeights::new(vec![1.0; 3])?,
            Err(e) => return Err(e),
        };
        let loss = |x: &[f64]| seg_loss(&map_of(x), &labels, mode, &weights, Some(&ignore));
        let analytic = loss(&x0)?.grad;
        let f = |x: &[f64]| loss(x).map(|l| l.loss).unwrap_or(f64::NAN);
        out.push(check(format!("seg_mode{}", mode.id()), f, &x0, analytic, cfg, k as u64 + 1));
    }

    let s0: Vec<f64> = (0..w * h).map(|_| round(rng.gen_range(0.01..0.99), p)).collect();
    let target = Grid::from_fn(w, h, |_, _| rng.gen_bool(0.4));
    let sim = |x: &[f64]| Grid::from_vec(w, h, x.to_vec());
    let analytic = gdsc_loss(&sim(&s0)?, &target)?.grad;
    let f = |x: &[f64]| {
        sim(x)
            .and_then(|s| gdsc_loss(&s, &target))
            .map(|l| l.loss)
            .unwrap_or(f64::NAN)
    };
    out.push(check("gdsc".into(), f, &s0, analytic, cfg, 11));

    let n = 4 * w * h;
    let tgt: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    // Residuals stay clear of the kinks at +-1.
    let pred: Vec<f64> = tgt
        .iter()
        .map(|t| {
            let near: f64 = rng.gen_range(0.05..0.9);
            let far: f64 = rng.gen_range(1.1..3.0);
            round(t + if rng.gen_bool(0.5) { near } else { -far }, p)
        })
        .collect();
    let analytic = smooth_l1(&pred, &tgt, 1.0)?.grad;
    let f = |x: &[f64]| smooth_l1(x, &tgt, 1.0).map(|l| l.loss).unwrap_or(f64::NAN);
    out.push(check("smooth_l1".into(), f, &pred, analytic, cfg, 12));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        for precision in [Precision::Single, Precision::Double] {
            let cfg = GradCheckConfig {
                precision,
                ..GradCheckConfig::default()
            };
            let r = run_gradient_suite(&cfg).unwrap();
            assert_eq!(r.len(), 7);
            assert!(r.iter().all(|c| c.passed && c.checked == 16), "{r:?}");
        }
    }

    #[test]
    fn corruption_is_caught() {
        let cfg = GradCheckConfig {
            corrupt: true,
            ..GradCheckConfig::default()
        };
        assert!(run_gradient_suite(&cfg).unwrap().iter().all(|c| !c.passed));
    }

    #[test]
    fn single_pixel() {
        let cfg = GradCheckConfig {
            width: 1,
            height: 1,
            ..GradCheckConfig::default()
        };
        let r = run_gradient_suite(&cfg).unwrap();
        assert!(r.iter().all(|c| c.passed), "{r:?}");
        assert_eq!(r[0].checked, 3);
    }
}
