//! Loss kernels with analytic gradients, all evaluated in `f64` with
//! row-major accumulation so repeated calls are bit-identical.

mod check;
mod fd;
mod gdsc;
mod maps;
mod regression;
mod seg;

pub use check::{run_gradient_suite, GradCheck, GradCheckConfig, Precision};
pub use fd::{fd_coordinates, finite_difference_check, FdReport, FD_STEP};
pub use gdsc::{gdsc_from_features, gdsc_loss, gdsc_pool, gdsc_similarity};
pub use maps::{softmax, DenseFeatureMap, MapKind, ProbMap};
pub use regression::{smooth_l1, total_loss, LossParts, LossWeights};
pub use seg::{class_weights, seg_loss, ClassWeights, LOG_EPS};

/// Scalar loss with its gradient, laid out like the differentiated input.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossGrad {
    pub loss: f64,
    pub grad: Vec<f64>,
}
