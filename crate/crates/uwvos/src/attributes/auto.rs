//! Mask-derived attribute rules.
//!
//! All thresholds are strict comparisons: a value sitting exactly on a
//! boundary does not fire the attribute. Displacements are raw pixels with
//! no resolution normalization.

use crate::dataset::{TrackGeometry, VideoEntry};
use crate::error::{Error, Result};

/// Small-target threshold on the mean present-frame mask ratio.
pub const SMALL_TARGET_RATIO: f64 = 0.001;
/// Fast-motion threshold on the mean per-step centroid displacement.
pub const FAST_MOTION_PX: f64 = 20.0;
/// Allowed range for pairwise area ratios and box aspect ratios.
pub const SCALE_RATIO_RANGE: (f64, f64) = (0.5, 2.0);

fn all_absent(track: &TrackGeometry) -> Error {
    Error::AllAbsentTrack {
        video_id: track.video_id.clone(),
        object_id: track.object_id,
    }
}

/// Small target: the mean over present frames of `area / (width * height)`
/// is strictly below 0.1%. Absent frames do not dilute the mean; an
/// all-absent track is an error.
pub fn attr_small_target(track: &TrackGeometry) -> Result<bool> {
    let (width, height) = track.resolution;
    let image_area = width as f64 * height as f64;
    let mut sum = 0.0;
    let mut count = 0usize;
    for frame in track.present_frames() {
        sum += frame.area as f64 / image_area;
        count += 1;
    }
    if count == 0 {
        return Err(all_absent(track));
    }
    Ok(sum / (count as f64) < SMALL_TARGET_RATIO)
}

/// Fast motion: the mean Euclidean centroid displacement over consecutive
/// co-present frame pairs strictly exceeds 20 px.
pub fn attr_fast_motion(track: &TrackGeometry) -> Result<bool> {
    let present = track.present_count();
    if present < 2 {
        return Err(Error::InsufficientPresence {
            attribute: "FM",
            needed: 2,
            found: present,
        });
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for window in track.frames.windows(2) {
        if let (Some(a), Some(b)) = (&window[0], &window[1]) {
            let dx = b.centroid.0 - a.centroid.0;
            let dy = b.centroid.1 - a.centroid.1;
            sum += (dx * dx + dy * dy).sqrt();
            pairs += 1;
        }
    }
    if pairs == 0 {
        // Present frames exist but never consecutively.
        return Err(Error::InsufficientPresence {
            attribute: "FM",
            needed: 2,
            found: present,
        });
    }
    Ok(sum / pairs as f64 > FAST_MOTION_PX)
}

/// Scale variation: some pair of present frames has an area ratio strictly
/// outside [0.5, 2.0], equivalently `max_area / min_area > 2`.
pub fn attr_scale_variation(track: &TrackGeometry) -> Result<bool> {
    let areas: Vec<u64> = track.present_frames().map(|f| f.area).collect();
    if areas.len() < 2 {
        return Err(Error::InsufficientPresence {
            attribute: "SV",
            needed: 2,
            found: areas.len(),
        });
    }
    let max = *areas.iter().max().expect("nonempty") as f64;
    let min = *areas.iter().min().expect("nonempty") as f64;
    Ok(max / min > SCALE_RATIO_RANGE.1)
}

/// Aspect ratio variation: some present frame's box width/height ratio is
/// strictly outside [0.5, 2.0].
pub fn attr_aspect_ratio_variation(track: &TrackGeometry) -> Result<bool> {
    let mut any_present = false;
    for frame in track.present_frames() {
        any_present = true;
        let aspect = frame.bbox.width() as f64 / frame.bbox.height() as f64;
        if aspect < SCALE_RATIO_RANGE.0 || aspect > SCALE_RATIO_RANGE.1 {
            return Ok(true);
        }
    }
    if !any_present {
        return Err(all_absent(track));
    }
    Ok(false)
}

/// Exit and re-entry: the presence sequence contains a
/// present -> absent+ -> present pattern. Leading or trailing absence alone
/// does not fire.
pub fn attr_exit_reentry(track: &TrackGeometry) -> bool {
    let mut seen_present = false;
    let mut gap_after_present = false;
    for present in track.frames.iter().map(Option::is_some) {
        if present {
            if gap_after_present {
                return true;
            }
            seen_present = true;
        } else if seen_present {
            gap_after_present = true;
        }
    }
    false
}

/// Multiple targets: the video annotates at least two objects.
pub fn attr_multiple_targets(video: &VideoEntry) -> bool {
    video.objects.len() >= 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FrameGeometry;
    use crate::metrics::BBox;

    /// Geometry fixture on a 1000 x 1000 raster: `frames[i]` is
    /// `Some((area, cx, cy, bbox))` or `None` for absence.
    fn track(frames: Vec<Option<(u64, f64, f64, BBox)>>) -> TrackGeometry {
        TrackGeometry {
            video_id: "v".into(),
            object_id: 1,
            resolution: (1000, 1000),
            frames: frames
                .into_iter()
                .map(|f| {
                    f.map(|(area, cx, cy, bbox)| FrameGeometry {
                        area,
                        centroid: (cx, cy),
                        bbox,
                    })
                })
                .collect(),
        }
    }

    fn square(area: u64) -> Option<(u64, f64, f64, BBox)> {
        Some((area, 10.0, 10.0, BBox::new(0, 0, 9, 9)))
    }

    #[test]
    fn small_target_threshold_is_strict() {
        // 1000 px on a 1e6 px image is exactly 0.1%.
        let exactly = track(vec![square(1000), square(1000)]);
        assert!(!attr_small_target(&exactly).unwrap());
        let below = track(vec![square(500), square(500)]);
        assert!(attr_small_target(&below).unwrap());
    }

    #[test]
    fn small_target_averages_present_frames_only() {
        // Ratios 0.05% and 0.25% average to 0.15% -> not small.
        let mixed = track(vec![square(500), None, square(2500)]);
        assert!(!attr_small_target(&mixed).unwrap());
    }

    #[test]
    fn small_target_errors_on_all_absent() {
        let empty = track(vec![None, None]);
        assert!(matches!(
            attr_small_target(&empty),
            Err(Error::AllAbsentTrack { .. })
        ));
    }

    fn at(x: f64) -> Option<(u64, f64, f64, BBox)> {
        Some((100, x, 50.0, BBox::new(0, 0, 9, 9)))
    }

    #[test]
    fn fast_motion_thresholds() {
        let static_track = track(vec![at(50.0), at(50.0), at(50.0)]);
        assert!(!attr_fast_motion(&static_track).unwrap());

        let drift_21 = track(vec![at(0.0), at(21.0), at(42.0)]);
        assert!(attr_fast_motion(&drift_21).unwrap());

        let exact_20 = track(vec![at(0.0), at(20.0), at(40.0)]);
        assert!(!attr_fast_motion(&exact_20).unwrap(), "20.0 px is not > 20");

        // Displacements 10 then 40 -> mean 25 -> fast.
        let mixed = track(vec![at(0.0), at(10.0), at(50.0)]);
        assert!(attr_fast_motion(&mixed).unwrap());
    }

    #[test]
    fn fast_motion_needs_consecutive_presence() {
        let sparse = track(vec![at(0.0), None, at(40.0)]);
        assert!(matches!(
            attr_fast_motion(&sparse),
            Err(Error::InsufficientPresence { .. })
        ));
    }

    #[test]
    fn scale_variation_thresholds() {
        let constant = track(vec![square(100), square(100)]);
        assert!(!attr_scale_variation(&constant).unwrap());

        let double_plus = track(vec![square(100), square(210)]);
        assert!(attr_scale_variation(&double_plus).unwrap(), "ratio 2.1");

        // All pairwise ratios within [0.5, 2.0]: max 190/100 = 1.9.
        let mild = track(vec![square(100), square(150), square(190)]);
        assert!(!attr_scale_variation(&mild).unwrap());

        let exactly_two = track(vec![square(100), square(200)]);
        assert!(!attr_scale_variation(&exactly_two).unwrap(), "2.0 is inside");
    }

    fn boxed(w: u32, h: u32) -> Option<(u64, f64, f64, BBox)> {
        Some((u64::from(w * h), 0.0, 0.0, BBox::new(0, 0, w - 1, h - 1)))
    }

    #[test]
    fn aspect_ratio_variation_is_boundary_inclusive() {
        let squares = track(vec![boxed(10, 10), boxed(12, 12)]);
        assert!(!attr_aspect_ratio_variation(&squares).unwrap());

        let wide = track(vec![boxed(10, 10), boxed(30, 10)]);
        assert!(attr_aspect_ratio_variation(&wide).unwrap(), "ratio 3");

        // Ratios exactly 2.0 and 0.5 stay inside the allowed range.
        let edges = track(vec![boxed(20, 10), boxed(10, 20)]);
        assert!(!attr_aspect_ratio_variation(&edges).unwrap());
    }

    #[test]
    fn scale_variation_ignores_temporal_order() {
        // The rule quantifies over all pairs, so any reordering of the
        // same areas gives the same answer.
        let orders = [
            vec![square(100), square(150), square(210)],
            vec![square(210), square(100), square(150)],
            vec![square(150), square(210), square(100)],
        ];
        for frames in orders {
            assert!(attr_scale_variation(&track(frames)).unwrap());
        }
        let orders = [
            vec![square(100), square(150), square(190)],
            vec![square(190), square(150), square(100)],
        ];
        for frames in orders {
            assert!(!attr_scale_variation(&track(frames)).unwrap());
        }
    }

    #[test]
    fn exit_reentry_patterns() {
        assert!(!attr_exit_reentry(&track(vec![at(0.0), at(1.0), at(2.0)])));
        assert!(attr_exit_reentry(&track(vec![at(0.0), None, at(2.0)])));
        assert!(attr_exit_reentry(&track(vec![at(0.0), None, None, at(2.0)])));
        // Leading absence is a late first appearance, not an exit.
        assert!(!attr_exit_reentry(&track(vec![None, None, at(0.0), at(1.0)])));
        // Trailing absence is an exit without re-entry.
        assert!(!attr_exit_reentry(&track(vec![at(0.0), None, None])));
    }
}
