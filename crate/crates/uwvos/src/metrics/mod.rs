//! Segmentation quality metrics and the DAVIS-style evaluation protocol.
//!
//! Per frame the engine scores region similarity (mask IoU), contour
//! accuracy (boundary F-measure) and its adjusted variant, which is defined
//! on every frame and credits correctly predicted absence. Per-object means
//! aggregate to video and dataset level by unweighted means over objects.

mod bbox;
mod boundary;
mod region;
mod tracking;

pub use bbox::{mask_to_bbox, BBox};
pub use boundary::{
    adjusted_contour_accuracy, boundary_pixels, contour_accuracy, default_boundary_tolerance,
    squared_distance_transform,
};
pub use region::region_similarity;
pub use tracking::{
    tracking_metrics, TrackingMetrics, NORM_PRECISION_THRESHOLDS, PRECISION_THRESHOLDS,
    SUCCESS_THRESHOLDS,
};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetIndex, ObjectTrack, VideoEntry};
use crate::error::{Error, Result};
use crate::mask::{BinaryMask, MaskFrame};

/// How the boundary matching tolerance is derived per video.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "kebab-case")]
pub enum BoundaryTolerance {
    /// Fraction of the image diagonal, floored at 1 px.
    DiagonalFraction(f64),
    /// Fixed pixel tolerance.
    Pixels(f64),
}

impl BoundaryTolerance {
    pub fn resolve(&self, resolution: (u32, u32)) -> f64 {
        match *self {
            BoundaryTolerance::DiagonalFraction(fraction) => {
                let (w, h) = resolution;
                let diagonal = ((w as f64).powi(2) + (h as f64).powi(2)).sqrt();
                (fraction * diagonal).max(1.0)
            }
            BoundaryTolerance::Pixels(px) => px,
        }
    }
}

impl Default for BoundaryTolerance {
    fn default() -> Self {
        BoundaryTolerance::DiagonalFraction(0.008)
    }
}

/// Where an object's evaluation window begins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalStart {
    /// From the object's first ground-truth-present frame (YouTube-VOS
    /// style); the exclusion of the given frame is governed by
    /// `exclude_first`.
    FirstAppearance,
    /// From the first video frame regardless of object presence.
    FrameZero,
}

/// Frame-selection and scoring policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    /// Drop the first frame of the evaluation window (the given frame).
    pub exclude_first: bool,
    /// Drop the video's final frame.
    pub exclude_last: bool,
    pub boundary_tolerance: BoundaryTolerance,
    pub eval_start: EvalStart,
    /// Credit adjusted contour accuracy 1.0 on frames where both ground
    /// truth and prediction are empty. With `false`, empty-ground-truth
    /// frames always score 0 (strict variant).
    pub fdot_empty_gt_credit: bool,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            exclude_first: true,
            exclude_last: true,
            boundary_tolerance: BoundaryTolerance::default(),
            eval_start: EvalStart::FirstAppearance,
            fdot_empty_gt_credit: true,
        }
    }
}

/// One evaluated frame of one object.
#[derive(Debug, Clone, Serialize)]
pub struct FrameMetric {
    pub frame_name: String,
    /// Region similarity; undefined when prediction and ground truth are
    /// both empty on the frame.
    pub j: Option<f64>,
    /// Contour accuracy; undefined under the same degenerate condition.
    pub f: Option<f64>,
    /// Adjusted contour accuracy, defined on every frame.
    pub f_dot: f64,
}

/// Per-object metric record over the selected frames.
#[derive(Debug, Clone, Serialize)]
pub struct ObjectRecord {
    pub video_id: String,
    pub object_id: u8,
    pub frames: Vec<FrameMetric>,
    /// Mean over frames where J is defined.
    pub j: Option<f64>,
    /// Mean over frames where F is defined.
    pub f: Option<f64>,
    /// Mean over every selected frame.
    pub f_dot: Option<f64>,
}

impl ObjectRecord {
    /// Mean of J and adjusted F, the headline per-object score.
    pub fn j_and_f_dot(&self) -> Option<f64> {
        Some((self.j? + self.f_dot?) / 2.0)
    }
}

/// Per-video unweighted means over its objects.
#[derive(Debug, Clone, Serialize)]
pub struct VideoRecord {
    pub video_id: String,
    pub object_count: usize,
    pub j: Option<f64>,
    pub f: Option<f64>,
    pub f_dot: Option<f64>,
}

/// Dataset-level aggregates: unweighted means over all objects.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateMeans {
    pub j: Option<f64>,
    pub f: Option<f64>,
    pub f_dot: Option<f64>,
    /// `(J + F) / 2`.
    pub j_and_f: Option<f64>,
    /// `(J + adjusted F) / 2`.
    pub j_and_f_dot: Option<f64>,
    pub objects_scored: usize,
    pub videos_scored: usize,
}

/// Full evaluation output: per-object, per-video, and dataset-level records.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    /// The policy every number in this report was computed under.
    pub policy: EvalPolicy,
    pub dataset: AggregateMeans,
    pub videos: Vec<VideoRecord>,
    pub objects: Vec<ObjectRecord>,
    /// Videos without any prediction folder, scored as all-empty.
    pub missing_prediction_videos: Vec<String>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Score one frame pair. `ignore` pixels are removed from both masks before
/// any metric is computed.
fn frame_metric(
    frame_name: &str,
    pred: &BinaryMask,
    gt: &BinaryMask,
    ignore: Option<&BinaryMask>,
    tolerance_px: f64,
    fdot_empty_gt_credit: bool,
) -> Result<FrameMetric> {
    let filtered: Option<(BinaryMask, BinaryMask)> = match ignore {
        Some(ig) if !ig.is_empty() => Some((pred.minus(ig)?, gt.minus(ig)?)),
        _ => None,
    };
    let (pred, gt) = match &filtered {
        Some((p, g)) => (p, g),
        None => (pred, gt),
    };

    let j = region_similarity(pred, gt, None)?;
    let f = contour_accuracy(pred, gt, tolerance_px)?;
    let f_dot = if gt.is_empty() {
        if fdot_empty_gt_credit && pred.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        f.expect("nonempty ground truth defines F")
    };
    Ok(FrameMetric {
        frame_name: frame_name.to_string(),
        j,
        f,
        f_dot,
    })
}

/// Frame indices selected for evaluation given the policy, the video length
/// and the object's first ground-truth-present frame.
fn selected_indices(policy: &EvalPolicy, total: usize, first_present: Option<usize>) -> Vec<usize> {
    let start = match policy.eval_start {
        EvalStart::FirstAppearance => first_present.unwrap_or(0),
        EvalStart::FrameZero => 0,
    };
    let mut selected: Vec<usize> = (start..total).collect();
    if policy.exclude_first && !selected.is_empty() {
        selected.remove(0);
    }
    if policy.exclude_last {
        if let Some(pos) = selected.iter().position(|&i| i + 1 == total) {
            selected.remove(pos);
        }
    }
    selected
}

fn summarize(video_id: &str, object_id: u8, frames: Vec<FrameMetric>) -> ObjectRecord {
    let j = mean(frames.iter().filter_map(|m| m.j));
    let f = mean(frames.iter().filter_map(|m| m.f));
    let f_dot = mean(frames.iter().map(|m| m.f_dot));
    ObjectRecord {
        video_id: video_id.to_string(),
        object_id,
        frames,
        j,
        f,
        f_dot,
    }
}

/// Evaluate one predicted track against ground truth under `policy`.
///
/// Both tracks must cover the same frames at the same resolution. Binary
/// tracks carry no ignore region; dataset-level evaluation applies the
/// ignore label from the raw rasters instead.
pub fn evaluate_object(
    pred: &ObjectTrack,
    gt: &ObjectTrack,
    policy: &EvalPolicy,
) -> Result<ObjectRecord> {
    if pred.len() != gt.len() {
        return Err(Error::TrackLengthMismatch(pred.len(), gt.len()));
    }
    if pred.resolution != gt.resolution {
        let (pw, ph) = pred.resolution;
        let (gw, gh) = gt.resolution;
        return Err(Error::DimensionMismatch(pw, ph, gw, gh));
    }
    let tolerance = policy.boundary_tolerance.resolve(gt.resolution);
    let mut frames = Vec::new();
    for index in selected_indices(policy, gt.len(), gt.first_present_index()) {
        let gt_entry = gt.entry(index);
        let pred_entry = pred.entry(index);
        frames.push(frame_metric(
            &gt_entry.frame_name,
            &pred_entry.mask,
            &gt_entry.mask,
            None,
            tolerance,
            policy.fdot_empty_gt_credit,
        )?);
    }
    Ok(summarize(&gt.video_id, gt.object_id, frames))
}

struct VideoEvaluation {
    records: Vec<ObjectRecord>,
    missing_prediction: bool,
}

fn evaluate_video(
    index: &DatasetIndex,
    video: &VideoEntry,
    pred_root: &Path,
    policy: &EvalPolicy,
) -> Result<VideoEvaluation> {
    let pred_dir = pred_root.join(&video.video_id);
    let missing_prediction = !pred_dir.is_dir();
    let tolerance = policy.boundary_tolerance.resolve(video.resolution);
    let object_ids: Vec<u8> = video.object_ids().collect();

    let mut all_frames: BTreeMap<u8, Vec<FrameMetric>> = object_ids
        .iter()
        .map(|&id| (id, Vec::with_capacity(video.frame_names.len())))
        .collect();
    let mut gt_presence: BTreeMap<u8, Vec<bool>> = object_ids
        .iter()
        .map(|&id| (id, Vec::with_capacity(video.frame_names.len())))
        .collect();

    for frame_name in &video.frame_names {
        let gt_raster = index.load_annotation(&video.video_id, frame_name)?;
        if gt_raster.resolution() != video.resolution {
            let (ew, eh) = video.resolution;
            let (fw, fh) = gt_raster.resolution();
            return Err(Error::DimensionMismatch(ew, eh, fw, fh));
        }
        let pred_raster = load_prediction(&pred_dir, frame_name, missing_prediction)?;
        if let Some(raster) = &pred_raster {
            if raster.resolution() != video.resolution {
                let (ew, eh) = video.resolution;
                let (fw, fh) = raster.resolution();
                return Err(Error::DimensionMismatch(ew, eh, fw, fh));
            }
        }
        let ignore = gt_raster.ignore_mask();
        let ignore = (!ignore.is_empty()).then_some(ignore);

        for &object_id in &object_ids {
            let gt_mask = gt_raster.object_mask(object_id);
            let pred_mask = match &pred_raster {
                Some(raster) => raster.object_mask(object_id),
                None => BinaryMask::empty(video.resolution.0, video.resolution.1),
            };
            gt_presence
                .get_mut(&object_id)
                .expect("preallocated")
                .push(!gt_mask.is_empty());
            all_frames.get_mut(&object_id).expect("preallocated").push(frame_metric(
                frame_name,
                &pred_mask,
                &gt_mask,
                ignore.as_ref(),
                tolerance,
                policy.fdot_empty_gt_credit,
            )?);
        }
    }

    let total = video.frame_names.len();
    let mut records = Vec::with_capacity(object_ids.len());
    for object_id in object_ids {
        let metrics = all_frames.remove(&object_id).expect("preallocated");
        let presence = &gt_presence[&object_id];
        let first_present = presence.iter().position(|&p| p);
        let selected = selected_indices(policy, total, first_present);
        let frames: Vec<FrameMetric> = selected.into_iter().map(|i| metrics[i].clone()).collect();
        records.push(summarize(&video.video_id, object_id, frames));
    }
    Ok(VideoEvaluation {
        records,
        missing_prediction,
    })
}

fn load_prediction(
    pred_dir: &Path,
    frame_name: &str,
    missing_prediction: bool,
) -> Result<Option<MaskFrame>> {
    if missing_prediction {
        return Ok(None);
    }
    let path: PathBuf = pred_dir.join(format!("{frame_name}.png"));
    if !path.is_file() {
        // Missing predicted frames are scored as empty masks.
        return Ok(None);
    }
    let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
    MaskFrame::decode(&bytes).map(Some)
}

/// Evaluate predicted rasters under `pred_root` (mirroring the Annotations
/// layout) against the whole index. Videos fan out to parallel workers;
/// aggregation follows canonical video order, so results are independent of
/// worker count.
pub fn evaluate_dataset(
    pred_root: impl AsRef<Path>,
    index: &DatasetIndex,
    policy: &EvalPolicy,
) -> Result<BenchmarkReport> {
    let pred_root = pred_root.as_ref();
    let videos: Vec<&VideoEntry> = index.videos().collect();
    let evaluated: Vec<Result<VideoEvaluation>> = videos
        .par_iter()
        .map(|video| evaluate_video(index, video, pred_root, policy))
        .collect();

    let mut objects = Vec::new();
    let mut video_records = Vec::new();
    let mut missing = Vec::new();
    for (video, result) in videos.iter().zip(evaluated) {
        let evaluation = result?;
        if evaluation.missing_prediction {
            missing.push(video.video_id.clone());
        }
        video_records.push(VideoRecord {
            video_id: video.video_id.clone(),
            object_count: evaluation.records.len(),
            j: mean(evaluation.records.iter().filter_map(|r| r.j)),
            f: mean(evaluation.records.iter().filter_map(|r| r.f)),
            f_dot: mean(evaluation.records.iter().filter_map(|r| r.f_dot)),
        });
        objects.extend(evaluation.records);
    }

    let j = mean(objects.iter().filter_map(|r| r.j));
    let f = mean(objects.iter().filter_map(|r| r.f));
    let f_dot = mean(objects.iter().filter_map(|r| r.f_dot));
    let dataset = AggregateMeans {
        j,
        f,
        f_dot,
        j_and_f: j.zip(f).map(|(a, b)| (a + b) / 2.0),
        j_and_f_dot: j.zip(f_dot).map(|(a, b)| (a + b) / 2.0),
        objects_scored: objects.len(),
        videos_scored: video_records.len(),
    };

    Ok(BenchmarkReport {
        policy: policy.clone(),
        dataset,
        videos: video_records,
        objects,
        missing_prediction_videos: missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TrackEntry;

    fn mask(width: u32, height: u32, fg: &[(u32, u32)]) -> BinaryMask {
        BinaryMask::from_fn(width, height, |x, y| fg.contains(&(x, y)))
    }

    fn track(frames: Vec<BinaryMask>) -> ObjectTrack {
        let resolution = frames[0].resolution();
        let entries = frames
            .into_iter()
            .enumerate()
            .map(|(i, mask)| TrackEntry {
                frame_name: format!("{i:05}"),
                mask,
            })
            .collect();
        ObjectTrack::new("video", 1, resolution, entries).unwrap()
    }

    fn all_frames_policy() -> EvalPolicy {
        EvalPolicy {
            exclude_first: false,
            exclude_last: false,
            boundary_tolerance: BoundaryTolerance::Pixels(1.0),
            eval_start: EvalStart::FrameZero,
            fdot_empty_gt_credit: true,
        }
    }

    #[test]
    fn identical_tracks_score_one() {
        let frames: Vec<BinaryMask> = (0..4)
            .map(|i| mask(8, 8, &[(i, i), (i + 1, i)]))
            .collect();
        let gt = track(frames.clone());
        let pred = track(frames);
        let record = evaluate_object(&pred, &gt, &EvalPolicy::default()).unwrap();
        assert_eq!(record.j, Some(1.0));
        assert_eq!(record.f, Some(1.0));
        assert_eq!(record.f_dot, Some(1.0));
    }

    #[test]
    fn empty_prediction_with_present_gt_scores_zero() {
        let gt = track((0..4).map(|_| mask(8, 8, &[(2, 2), (3, 2)])).collect());
        let pred = track((0..4).map(|_| BinaryMask::empty(8, 8)).collect());
        let record = evaluate_object(&pred, &gt, &all_frames_policy()).unwrap();
        assert_eq!(record.j, Some(0.0));
        assert_eq!(record.f_dot, Some(0.0));
    }

    #[test]
    fn default_policy_trims_first_and_last_frames() {
        // 5 frames; frames 1..=3 evaluated. Frame values chosen so the
        // mean over the middle three is hand-checkable: J = (1+0+1)/3.
        let gt_frames = vec![
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(1, 1)]),
        ];
        let pred_frames = vec![
            mask(8, 8, &[(5, 5)]), // excluded (first)
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(5, 5)]),
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(5, 5)]), // excluded (last)
        ];
        let record =
            evaluate_object(&track(pred_frames), &track(gt_frames), &EvalPolicy::default())
                .unwrap();
        assert_eq!(record.frames.len(), 3);
        let expected = (1.0 + 0.0 + 1.0) / 3.0;
        assert!((record.j.unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn window_starts_at_first_appearance() {
        // Object appears at frame 2 of 5; with exclusions the window is
        // frame 3 only.
        let gt_frames = vec![
            BinaryMask::empty(8, 8),
            BinaryMask::empty(8, 8),
            mask(8, 8, &[(1, 1)]),
            mask(8, 8, &[(2, 2)]),
            mask(8, 8, &[(3, 3)]),
        ];
        let pred_frames = gt_frames.clone();
        let record =
            evaluate_object(&track(pred_frames), &track(gt_frames), &EvalPolicy::default())
                .unwrap();
        assert_eq!(record.frames.len(), 1);
        assert_eq!(record.frames[0].frame_name, "00003");
    }

    #[test]
    fn both_empty_frames_leave_j_undefined_but_credit_fdot() {
        let gt_frames = vec![mask(8, 8, &[(1, 1)]), BinaryMask::empty(8, 8)];
        let pred_frames = gt_frames.clone();
        let record =
            evaluate_object(&track(pred_frames), &track(gt_frames), &all_frames_policy())
                .unwrap();
        assert_eq!(record.frames[1].j, None);
        assert_eq!(record.frames[1].f, None);
        assert_eq!(record.frames[1].f_dot, 1.0);
        assert_eq!(record.j, Some(1.0), "undefined frames are omitted");
        assert_eq!(record.f_dot, Some(1.0));
    }

    #[test]
    fn strict_fdot_variant_denies_absence_credit() {
        let mut policy = all_frames_policy();
        policy.fdot_empty_gt_credit = false;
        let gt_frames = vec![BinaryMask::empty(8, 8), BinaryMask::empty(8, 8)];
        let pred_frames = gt_frames.clone();
        let record =
            evaluate_object(&track(pred_frames), &track(gt_frames), &policy).unwrap();
        assert_eq!(record.f_dot, Some(0.0));
    }

    #[test]
    fn track_length_mismatch_is_an_error() {
        let gt = track(vec![mask(8, 8, &[(1, 1)])]);
        let pred = track(vec![mask(8, 8, &[(1, 1)]), mask(8, 8, &[(1, 1)])]);
        assert!(matches!(
            evaluate_object(&pred, &gt, &EvalPolicy::default()),
            Err(Error::TrackLengthMismatch(2, 1))
        ));
    }

    #[test]
    fn fdot_equals_f_on_present_gt_frames() {
        let gt_frames: Vec<BinaryMask> = (0..6)
            .map(|i| mask(16, 16, &[(i, i), (i + 1, i), (i, i + 1)]))
            .collect();
        let pred_frames: Vec<BinaryMask> = (0..6)
            .map(|i| mask(16, 16, &[(i, i), (i + 1, i + 1)]))
            .collect();
        let record =
            evaluate_object(&track(pred_frames), &track(gt_frames), &all_frames_policy())
                .unwrap();
        for frame in &record.frames {
            assert_eq!(Some(frame.f_dot), frame.f);
        }
    }
}
