//! Anchor-based dense supervision and proposal-based sparse supervision
//! targets: anchor pyramid, box codec, anchor assignment, NMS, proposal
//! selection and RoI sampling.
//!
//! Thresholds and sample sizes not fixed by the detector itself follow the
//! usual two-stage detector defaults and are carried in config structs.

mod anchors;
mod assign;
mod codec;
mod nms;
mod proposals;
mod rois;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

pub use anchors::{build_anchors, AnchorSet, AnchorSpec};
pub use assign::{assign_rpn, AnchorLabel, AssignmentResult, RpnAssignConfig};
pub use codec::{decode_box, encode_box, BoxDelta};
pub use nms::nms;
pub use proposals::{select_proposals, ProposalConfig};
pub use rois::{assign_rois, RoiConfig, RoiLabel, RoiTarget};

/// Ground-truth box; `ignore` marks do-not-care regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtBox {
    pub bbox: BBox,
    #[serde(default)]
    pub ignore: bool,
}

impl GtBox {
    pub fn new(bbox: BBox) -> Self {
        Self {
            bbox,
            ignore: false,
        }
    }
}
