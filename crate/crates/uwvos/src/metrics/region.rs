//! Region similarity: mask intersection-over-union.

use crate::error::Result;
use crate::mask::{check_same_dims, BinaryMask};

/// Intersection-over-union of `pred` and `gt` over pixels outside `ignore`.
///
/// Returns `None` when both masks are empty after ignore exclusion; such
/// frames are dropped from per-object means and absence correctness is
/// credited through the adjusted contour accuracy instead.
pub fn region_similarity(
    pred: &BinaryMask,
    gt: &BinaryMask,
    ignore: Option<&BinaryMask>,
) -> Result<Option<f64>> {
    check_same_dims(pred, gt)?;
    if let Some(ignore) = ignore {
        check_same_dims(pred, ignore)?;
    }

    let mut intersection = 0u64;
    let mut union = 0u64;
    for i in 0..pred.data().len() {
        if ignore.is_some_and(|m| m.data()[i]) {
            continue;
        }
        let p = pred.data()[i];
        let g = gt.data()[i];
        intersection += (p && g) as u64;
        union += (p || g) as u64;
    }
    if union == 0 {
        return Ok(None);
    }
    Ok(Some(intersection as f64 / union as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(width: u32, height: u32, fg: &[(u32, u32)]) -> BinaryMask {
        BinaryMask::from_fn(width, height, |x, y| fg.contains(&(x, y)))
    }

    #[test]
    fn identical_nonempty_masks_score_one() {
        let m = mask(4, 4, &[(0, 0), (1, 1), (2, 2)]);
        assert_eq!(region_similarity(&m, &m, None).unwrap(), Some(1.0));
    }

    #[test]
    fn disjoint_nonempty_masks_score_zero() {
        let a = mask(4, 4, &[(0, 0)]);
        let b = mask(4, 4, &[(3, 3)]);
        assert_eq!(region_similarity(&a, &b, None).unwrap(), Some(0.0));
    }

    #[test]
    fn partial_overlap_counts_pixels() {
        // pred covers 4 px, gt covers 4 px, 2 shared: J = 2/6.
        let pred = mask(4, 4, &[(0, 0), (1, 0), (2, 0), (3, 0)]);
        let gt = mask(4, 4, &[(2, 0), (3, 0), (0, 1), (1, 1)]);
        let j = region_similarity(&pred, &gt, None).unwrap().unwrap();
        assert!((j - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn both_empty_is_undefined() {
        let e = BinaryMask::empty(4, 4);
        assert_eq!(region_similarity(&e, &e, None).unwrap(), None);
    }

    #[test]
    fn ignore_region_excluded_from_union() {
        // gt pixel hidden by ignore: remaining union is pred-only.
        let pred = mask(4, 1, &[(0, 0), (1, 0)]);
        let gt = mask(4, 1, &[(1, 0), (2, 0)]);
        let ignore = mask(4, 1, &[(2, 0)]);
        let j = region_similarity(&pred, &gt, Some(&ignore)).unwrap().unwrap();
        assert!((j - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = BinaryMask::empty(4, 4);
        let b = BinaryMask::empty(5, 4);
        assert!(region_similarity(&a, &b, None).is_err());
    }

    #[test]
    fn symmetry() {
        let a = mask(4, 4, &[(0, 0), (1, 0), (1, 1)]);
        let b = mask(4, 4, &[(1, 0), (2, 2)]);
        assert_eq!(
            region_similarity(&a, &b, None).unwrap(),
            region_similarity(&b, &a, None).unwrap()
        );
    }
}
