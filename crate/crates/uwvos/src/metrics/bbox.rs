//! Minimal enclosing rectangles over binary masks.

use serde::{Deserialize, Serialize};

use crate::mask::BinaryMask;

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BBox {
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Self {
        debug_assert!(x_min <= x_max && y_min <= y_max);
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    /// Width in pixels (inclusive bounds, so at least 1).
    pub fn width(&self) -> u32 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min + 1
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    /// Box center in continuous pixel coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min as f64 + self.x_max as f64) / 2.0,
            (self.y_min as f64 + self.y_max as f64) / 2.0,
        )
    }

    /// Intersection-over-union of two boxes, on inclusive pixel counts.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix_min = self.x_min.max(other.x_min);
        let iy_min = self.y_min.max(other.y_min);
        let ix_max = self.x_max.min(other.x_max);
        let iy_max = self.y_max.min(other.y_max);
        if ix_min > ix_max || iy_min > iy_max {
            return 0.0;
        }
        let inter = (ix_max - ix_min + 1) as u64 * (iy_max - iy_min + 1) as u64;
        let union = self.area() + other.area() - inter;
        inter as f64 / union as f64
    }
}

/// Tight inclusive bounds of a mask's foreground; `None` for an empty mask.
pub fn mask_to_bbox(mask: &BinaryMask) -> Option<BBox> {
    let mut bounds: Option<BBox> = None;
    for (x, y) in mask.foreground() {
        bounds = Some(match bounds {
            None => BBox::new(x, y, x, y),
            Some(b) => BBox::new(b.x_min.min(x), b.y_min.min(y), b.x_max.max(x), b.y_max.max(y)),
        });
    }
    bounds
}
