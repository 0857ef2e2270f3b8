//! Non-neural machinery for kernel-based real-time scene text detection:
//! label generation, loss kernels with analytic gradients, anchor/proposal
//! target assignment, the binarize / label / unclip post-process, detection
//! evaluation and the on-disk formats tying them together.

pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod labelgen;
pub mod loss;
pub mod postprocess;
pub mod raster;
pub mod tdm;

pub use error::{Error, Result};
