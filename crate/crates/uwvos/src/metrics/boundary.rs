//! Contour accuracy: boundary extraction, exact Euclidean distance
//! transforms, and the boundary F-measure.

use crate::error::Result;
use crate::mask::{check_same_dims, BinaryMask};

/// Pixels that sit on a mask's contour: foreground with at least one
/// 4-neighbor that is background, the image border counting as background.
pub fn boundary_pixels(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.resolution();
    BinaryMask::from_fn(w, h, |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        x == 0
            || y == 0
            || x == w - 1
            || y == h - 1
            || !mask.get(x - 1, y)
            || !mask.get(x + 1, y)
            || !mask.get(x, y - 1)
            || !mask.get(x, y + 1)
    })
}

/// Default matching tolerance: 0.008 of the image diagonal, floored at 1 px.
pub fn default_boundary_tolerance(width: u32, height: u32) -> f64 {
    let diagonal = ((width as f64).powi(2) + (height as f64).powi(2)).sqrt();
    (0.008 * diagonal).max(1.0)
}

const EDT_INF: f64 = 1e20;

/// Squared Euclidean distance from every pixel to the nearest source pixel
/// (Felzenszwalb–Huttenlocher, dimension-separable, exact on integer grids).
/// Pixels in a source-free image keep values at the `1e20` scale.
pub fn squared_distance_transform(sources: &BinaryMask) -> Vec<f64> {
    let w = sources.width() as usize;
    let h = sources.height() as usize;
    let mut field = vec![EDT_INF; w * h];
    for (i, &s) in sources.data().iter().enumerate() {
        if s {
            field[i] = 0.0;
        }
    }

    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    // Columns first, then rows over the column minima.
    for x in 0..w {
        for y in 0..h {
            f[y] = field[y * w + x];
        }
        edt_1d(&f[..h], &mut d, &mut v, &mut z);
        for y in 0..h {
            field[y * w + x] = d[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&field[y * w..y * w + w]);
        edt_1d(&f[..w], &mut d, &mut v, &mut z);
        field[y * w..y * w + w].copy_from_slice(&d[..w]);
    }
    field
}

/// One-dimensional squared distance transform under a lower envelope of
/// parabolas.
#[allow(clippy::needless_range_loop)] // envelope scan is index-driven
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = -EDT_INF;
    z[1] = EDT_INF;
    for q in 1..n {
        let mut s = intersect(f, q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(f, q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = EDT_INF;
    }
    k = 0;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        d[q] = dq * dq + f[v[k]];
    }
}

/// Abscissa where parabola `q` overtakes parabola `p` in the lower envelope.
fn intersect(f: &[f64], q: usize, p: usize) -> f64 {
    let qf = q as f64;
    let pf = p as f64;
    ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * qf - 2.0 * pf)
}

/// Boundary F-measure under a pixel distance tolerance.
///
/// Precision is the fraction of predicted boundary pixels within
/// `tolerance_px` (Euclidean) of some ground-truth boundary pixel; recall is
/// symmetric; F = 2PR/(P+R). Returns `None` when both boundaries are empty,
/// `Some(0.0)` when exactly one is, and `Some(0.0)` when no pixel matches.
pub fn contour_accuracy(
    pred: &BinaryMask,
    gt: &BinaryMask,
    tolerance_px: f64,
) -> Result<Option<f64>> {
    assert!(
        tolerance_px >= 0.0 && tolerance_px.is_finite(),
        "tolerance must be a finite nonnegative pixel count"
    );
    check_same_dims(pred, gt)?;

    let pred_boundary = boundary_pixels(pred);
    let gt_boundary = boundary_pixels(gt);
    let pred_count = pred_boundary.area();
    let gt_count = gt_boundary.area();
    match (pred_count, gt_count) {
        (0, 0) => return Ok(None),
        (0, _) | (_, 0) => return Ok(Some(0.0)),
        _ => {}
    }

    let tol_sq = tolerance_px * tolerance_px;
    let dist_to_gt = squared_distance_transform(&gt_boundary);
    let matched_pred = count_within(&pred_boundary, &dist_to_gt, tol_sq);
    let dist_to_pred = squared_distance_transform(&pred_boundary);
    let matched_gt = count_within(&gt_boundary, &dist_to_pred, tol_sq);

    let precision = matched_pred as f64 / pred_count as f64;
    let recall = matched_gt as f64 / gt_count as f64;
    if precision + recall == 0.0 {
        return Ok(Some(0.0));
    }
    Ok(Some(2.0 * precision * recall / (precision + recall)))
}

fn count_within(pixels: &BinaryMask, squared_distances: &[f64], tol_sq: f64) -> u64 {
    pixels
        .data()
        .iter()
        .zip(squared_distances)
        .filter(|&(&on, &d)| on && d <= tol_sq)
        .count() as u64
}

/// Contour accuracy defined on every frame: equal to [`contour_accuracy`]
/// when the ground truth is nonempty; on empty ground truth it credits an
/// empty prediction with 1.0 and penalizes any foreground with 0.0.
pub fn adjusted_contour_accuracy(
    pred: &BinaryMask,
    gt: &BinaryMask,
    tolerance_px: f64,
) -> Result<f64> {
    check_same_dims(pred, gt)?;
    if gt.is_empty() {
        return Ok(if pred.is_empty() { 1.0 } else { 0.0 });
    }
    let f = contour_accuracy(pred, gt, tolerance_px)?;
    Ok(f.expect("nonempty ground truth has a nonempty boundary"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(width: u32, height: u32, fg: &[(u32, u32)]) -> BinaryMask {
        BinaryMask::from_fn(width, height, |x, y| fg.contains(&(x, y)))
    }

    fn rect(width: u32, height: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> BinaryMask {
        BinaryMask::from_fn(width, height, |x, y| {
            (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
        })
    }

    #[test]
    fn empty_mask_has_empty_boundary() {
        assert!(boundary_pixels(&BinaryMask::empty(6, 6)).is_empty());
    }

    #[test]
    fn single_pixel_is_its_own_boundary() {
        let m = mask(5, 5, &[(2, 3)]);
        assert_eq!(boundary_pixels(&m), m);
    }

    #[test]
    fn filled_square_boundary_is_its_perimeter() {
        // 3x3 square centered in 5x5: all 8 perimeter pixels, center excluded.
        let m = rect(5, 5, 1, 1, 3, 3);
        let b = boundary_pixels(&m);
        assert_eq!(b.area(), 8);
        assert!(!b.get(2, 2));
    }

    #[test]
    fn border_counts_as_background() {
        let full = BinaryMask::from_fn(4, 4, |_, _| true);
        let b = boundary_pixels(&full);
        assert_eq!(b.area(), 12);
        assert!(!b.get(1, 1) && !b.get(2, 2));
    }

    #[test]
    fn identical_masks_score_one() {
        let m = rect(8, 8, 2, 2, 5, 5);
        assert_eq!(contour_accuracy(&m, &m, 1.0).unwrap(), Some(1.0));
    }

    #[test]
    fn far_boundaries_score_zero() {
        let a = mask(32, 32, &[(1, 1)]);
        let b = mask(32, 32, &[(30, 30)]);
        assert_eq!(contour_accuracy(&a, &b, 2.0).unwrap(), Some(0.0));
    }

    #[test]
    fn one_pixel_shift_within_tolerance() {
        let gt = rect(8, 8, 1, 1, 3, 3);
        let pred = rect(8, 8, 2, 1, 4, 3);
        assert_eq!(contour_accuracy(&pred, &gt, 2.0).unwrap(), Some(1.0));
    }

    #[test]
    fn one_pixel_shift_below_tolerance() {
        // Only coinciding boundary pixels match at tol 0.5: 4 of 8 on each
        // side, so P = R = F = 0.5.
        let gt = rect(8, 8, 1, 1, 3, 3);
        let pred = rect(8, 8, 2, 1, 4, 3);
        let f = contour_accuracy(&pred, &gt, 0.5).unwrap().unwrap();
        assert!((f - 0.5).abs() < 1e-15);
    }

    #[test]
    fn both_empty_is_undefined_one_empty_is_zero() {
        let e = BinaryMask::empty(6, 6);
        let m = mask(6, 6, &[(3, 3)]);
        assert_eq!(contour_accuracy(&e, &e, 1.0).unwrap(), None);
        assert_eq!(contour_accuracy(&e, &m, 1.0).unwrap(), Some(0.0));
        assert_eq!(contour_accuracy(&m, &e, 1.0).unwrap(), Some(0.0));
    }

    #[test]
    fn adjusted_variant_credits_correct_absence() {
        let e = BinaryMask::empty(6, 6);
        let m = mask(6, 6, &[(3, 3)]);
        assert_eq!(adjusted_contour_accuracy(&e, &e, 1.0).unwrap(), 1.0);
        assert_eq!(adjusted_contour_accuracy(&m, &e, 1.0).unwrap(), 0.0);
        assert_eq!(adjusted_contour_accuracy(&e, &m, 1.0).unwrap(), 0.0);
        assert_eq!(adjusted_contour_accuracy(&m, &m, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn default_tolerance_follows_diagonal_with_floor() {
        assert_eq!(default_boundary_tolerance(3, 4), 1.0);
        let t = default_boundary_tolerance(854, 480);
        assert!((t - 0.008 * (854.0f64 * 854.0 + 480.0 * 480.0).sqrt()).abs() < 1e-12);
    }

    /// Brute-force all-pairs squared distances for cross-checking the
    /// transform.
    fn brute_force_sq(sources: &BinaryMask) -> Vec<f64> {
        let (w, h) = sources.resolution();
        let pts: Vec<(i64, i64)> = sources
            .foreground()
            .map(|(x, y)| (x as i64, y as i64))
            .collect();
        let mut out = vec![EDT_INF; (w * h) as usize];
        if pts.is_empty() {
            return out;
        }
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let best = pts
                    .iter()
                    .map(|&(sx, sy)| ((x - sx) * (x - sx) + (y - sy) * (y - sy)) as f64)
                    .fold(f64::INFINITY, f64::min);
                out[(y * w as i64 + x) as usize] = best;
            }
        }
        out
    }

    proptest::proptest! {
        #[test]
        fn edt_matches_all_pairs(seed in proptest::prelude::any::<u64>()) {
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state >> 33
            };
            let w = 1 + (next() % 17) as u32;
            let h = 1 + (next() % 17) as u32;
            let fill = next() % 100;
            let data: Vec<bool> = (0..w * h).map(|_| next() % 100 < fill).collect();
            let src = BinaryMask::from_data(w, h, data).unwrap();
            let fast = squared_distance_transform(&src);
            let slow = brute_force_sq(&src);
            for (a, b) in fast.iter().zip(&slow) {
                if *b < EDT_INF {
                    proptest::prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
                } else {
                    proptest::prop_assert!(*a >= 1e19);
                }
            }
        }
    }
}
