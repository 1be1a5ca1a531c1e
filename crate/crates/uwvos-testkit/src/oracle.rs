//! Brute-force reference implementations of the metric definitions.
//!
//! These recompute everything from first principles — set counting for
//! region similarity, independent boundary scans, all-pairs Euclidean
//! distances, pixel-rasterized box overlaps — and share no code with the
//! library's metric engine.

use uwvos::mask::BinaryMask;
use uwvos::metrics::BBox;

/// Region similarity by direct pixel counting.
pub fn region_similarity(
    pred: &BinaryMask,
    gt: &BinaryMask,
    ignore: Option<&BinaryMask>,
) -> Option<f64> {
    let (w, h) = gt.resolution();
    let mut intersection = 0u64;
    let mut union = 0u64;
    for y in 0..h {
        for x in 0..w {
            if ignore.is_some_and(|m| m.get(x, y)) {
                continue;
            }
            let p = pred.get(x, y);
            let g = gt.get(x, y);
            if p && g {
                intersection += 1;
            }
            if p || g {
                union += 1;
            }
        }
    }
    if union == 0 {
        None
    } else {
        Some(intersection as f64 / union as f64)
    }
}

/// Boundary coordinates by an independent 4-neighbor scan.
pub fn boundary_points(mask: &BinaryMask) -> Vec<(i64, i64)> {
    let (w, h) = mask.resolution();
    let on = |x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && x < w as i64 && y < h as i64 && mask.get(x as u32, y as u32)
    };
    let mut points = Vec::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if on(x, y) && (!on(x - 1, y) || !on(x + 1, y) || !on(x, y - 1) || !on(x, y + 1)) {
                points.push((x, y));
            }
        }
    }
    points
}

fn min_sq_dist(point: (i64, i64), targets: &[(i64, i64)]) -> f64 {
    targets
        .iter()
        .map(|&(tx, ty)| {
            let dx = (point.0 - tx) as f64;
            let dy = (point.1 - ty) as f64;
            dx * dx + dy * dy
        })
        .fold(f64::INFINITY, f64::min)
}

/// Contour accuracy by all-pairs boundary distances.
pub fn contour_accuracy(pred: &BinaryMask, gt: &BinaryMask, tolerance_px: f64) -> Option<f64> {
    let pred_boundary = boundary_points(pred);
    let gt_boundary = boundary_points(gt);
    match (pred_boundary.is_empty(), gt_boundary.is_empty()) {
        (true, true) => return None,
        (true, false) | (false, true) => return Some(0.0),
        _ => {}
    }
    let tol_sq = tolerance_px * tolerance_px;
    let matched_pred = pred_boundary
        .iter()
        .filter(|&&p| min_sq_dist(p, &gt_boundary) <= tol_sq)
        .count();
    let matched_gt = gt_boundary
        .iter()
        .filter(|&&p| min_sq_dist(p, &pred_boundary) <= tol_sq)
        .count();
    let precision = matched_pred as f64 / pred_boundary.len() as f64;
    let recall = matched_gt as f64 / gt_boundary.len() as f64;
    if precision + recall == 0.0 {
        Some(0.0)
    } else {
        Some(2.0 * precision * recall / (precision + recall))
    }
}

/// Adjusted contour accuracy from the brute-force F.
pub fn adjusted_contour_accuracy(pred: &BinaryMask, gt: &BinaryMask, tolerance_px: f64) -> f64 {
    if gt.is_empty() {
        return if pred.is_empty() { 1.0 } else { 0.0 };
    }
    contour_accuracy(pred, gt, tolerance_px).expect("nonempty gt boundary")
}

/// Box IoU by rasterizing both boxes and counting pixels.
pub fn box_iou_by_rasterizing(a: &BBox, b: &BBox, width: u32, height: u32) -> f64 {
    let raster = |bb: &BBox| {
        BinaryMask::from_fn(width, height, |x, y| {
            x >= bb.x_min && x <= bb.x_max && y >= bb.y_min && y <= bb.y_max
        })
    };
    region_similarity(&raster(a), &raster(b), None).unwrap_or(0.0)
}

/// Success-curve mean by direct enumeration over the 21-point grid with
/// pixel-counted overlaps.
pub fn success_auc_by_enumeration(
    pred_boxes: &[Option<BBox>],
    gt_boxes: &[Option<BBox>],
    width: u32,
    height: u32,
) -> f64 {
    let mut overlaps = Vec::new();
    for (pred, gt) in pred_boxes.iter().zip(gt_boxes) {
        let Some(gt) = gt else { continue };
        let iou = match pred {
            Some(pred) => box_iou_by_rasterizing(pred, gt, width, height),
            None => 0.0,
        };
        overlaps.push(iou);
    }
    if overlaps.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..=20 {
        let theta = i as f64 / 20.0;
        let hits = overlaps.iter().filter(|&&o| o >= theta).count();
        sum += hits as f64 / overlaps.len() as f64;
    }
    sum / 21.0
}

/// Deterministic xorshift-style generator for mask suites, independent of
/// any RNG crate.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Random mask with roughly `fill_percent` foreground.
    pub fn mask(&mut self, width: u32, height: u32, fill_percent: u64) -> BinaryMask {
        let mut data = Vec::with_capacity((width * height) as usize);
        for _ in 0..width * height {
            data.push(self.next_u64() % 100 < fill_percent);
        }
        BinaryMask::from_data(width, height, data).expect("sized buffer")
    }
}

/// Every mask on a `width x height` grid, by bit pattern. Feasible for
/// grids up to ~4x4.
pub fn all_masks(width: u32, height: u32) -> Vec<BinaryMask> {
    let cells = (width * height) as usize;
    assert!(cells <= 20, "exhaustive enumeration is exponential");
    (0..1u32 << cells)
        .map(|bits| {
            let data = (0..cells).map(|i| bits >> i & 1 == 1).collect();
            BinaryMask::from_data(width, height, data).expect("sized buffer")
        })
        .collect()
}
