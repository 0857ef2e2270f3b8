use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// Center offsets relative to the anchor size and log size ratios.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoxDelta {
    pub dx: f64,
    pub dy: f64,
    pub dw: f64,
    pub dh: f64,
}

impl BoxDelta {
    pub fn as_array(&self) -> [f64; 4] {
        [self.dx, self.dy, self.dw, self.dh]
    }
}

impl From<[f64; 4]> for BoxDelta {
    fn from([dx, dy, dw, dh]: [f64; 4]) -> Self {
        Self { dx, dy, dw, dh }
    }
}

pub fn encode_box(anchor: &BBox, gt: &BBox) -> Result<BoxDelta> {
    let (aw, ah) = (anchor.width(), anchor.height());
    let (gw, gh) = (gt.width(), gt.height());
    if !(aw > 0.0 && ah > 0.0) {
        return Err(Error::DegenerateBox(format!("anchor {aw}x{ah}")));
    }
    if !(gw > 0.0 && gh > 0.0) {
        return Err(Error::DegenerateBox(format!("target {gw}x{gh}")));
    }
    let (ax, ay) = anchor.center();
    let (gx, gy) = gt.center();
    Ok(BoxDelta {
        dx: (gx - ax) / aw,
        dy: (gy - ay) / ah,
        dw: (gw / aw).ln(),
        dh: (gh / ah).ln(),
    })
}

pub fn decode_box(anchor: &BBox, t: &BoxDelta) -> BBox {
    let (aw, ah) = (anchor.width(), anchor.height());
    let (ax, ay) = anchor.center();
    BBox::from_center(
        ax + t.dx * aw,
        ay + t.dy * ah,
        aw * t.dw.exp(),
        ah * t.dh.exp(),
    )
}
