use serde::{Deserialize, Serialize};

use super::LossGrad;
use crate::error::{Error, Result};

/// Summed smooth L1 with transition point `beta`.
pub fn smooth_l1(pred: &[f64], target: &[f64], beta: f64) -> Result<LossGrad> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", pred.len(), target.len())));
    }
    if !(beta > 0.0) {
        return Err(Error::ShapeMismatch(format!("beta {beta} must be positive")));
    }
    let mut loss = 0.0;
    let grad = pred
        .iter()
        .zip(target)
        .map(|(p, t)| {
            let d = p - t;
            if d.abs() < beta {
                loss += 0.5 * d * d / beta;
                d / beta
            } else {
                loss += d.abs() - 0.5 * beta;
                d.signum()
            }
        })
        .collect();
    Ok(LossGrad { loss, grad })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossParts {
    pub seg: f64,
    pub gdsc: f64,
    pub rpn: f64,
    pub cls: f64,
    pub reg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub gdsc: f64,
    pub tdm: f64,
    pub rpn: f64,
    pub cls: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            gdsc: 3.0,
            tdm: 1.0,
            rpn: 1.0,
            cls: 1.0,
        }
    }
}

/// `seg + l_gdsc * gdsc + l_tdm * (l_rpn * rpn + l_cls * cls + reg)`.
pub fn total_loss(parts: &LossParts, w: &LossWeights) -> f64 {
    parts.seg + w.gdsc * parts.gdsc + w.tdm * (w.rpn * parts.rpn + w.cls * parts.cls + parts.reg)
}
