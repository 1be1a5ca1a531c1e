//! Sequence-level consistency checks over annotation rasters.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::mask::IGNORE_LABEL;

use super::DatasetIndex;

/// One consistency violation found in a video's annotations. Violations are
/// report entries, not failures: a video with problems still validates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// A raster contains a label that is neither background, a declared
    /// object id, nor the ignore value.
    UndeclaredLabel { frame: String, label: u8 },
    /// A raster's resolution differs from the video's.
    ResolutionDrift {
        frame: String,
        expected: (u32, u32),
        found: (u32, u32),
    },
    /// meta.json lists a frame for an object that has no annotation raster.
    MissingMetaFrame { object_id: u8, frame: String },
    /// An object's declared first-appearance raster contains no pixels of it.
    EmptyFirstFrame { object_id: u8, frame: String },
}

/// Violations found in one video.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub video_id: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check one video's rasters against its metadata: undeclared labels,
/// resolution drift, meta-listed frames with no raster, and empty
/// first-appearance masks.
pub fn validate_sequence(index: &DatasetIndex, video_id: &str) -> Result<ValidationReport> {
    let video = index.require_video(video_id)?;
    let mut violations = Vec::new();

    let declared: BTreeSet<u8> = video.objects.keys().copied().collect();
    let frame_set: BTreeSet<&str> = video.frame_names.iter().map(String::as_str).collect();

    for meta in video.objects.values() {
        for frame in &meta.frames {
            if !frame_set.contains(frame.as_str()) {
                violations.push(Violation::MissingMetaFrame {
                    object_id: meta.object_id,
                    frame: frame.clone(),
                });
            }
        }
    }

    for frame_name in &video.frame_names {
        let raster = index.load_annotation(video_id, frame_name)?;
        if raster.resolution() != video.resolution {
            violations.push(Violation::ResolutionDrift {
                frame: frame_name.clone(),
                expected: video.resolution,
                found: raster.resolution(),
            });
            // Label checks on a drifted raster would double-report.
            continue;
        }
        for label in raster.distinct_labels() {
            if label != 0 && label != IGNORE_LABEL && !declared.contains(&label) {
                violations.push(Violation::UndeclaredLabel {
                    frame: frame_name.clone(),
                    label,
                });
            }
        }
        for meta in video.objects.values() {
            if meta.first_frame == *frame_name && raster.object_mask(meta.object_id).is_empty() {
                violations.push(Violation::EmptyFirstFrame {
                    object_id: meta.object_id,
                    frame: frame_name.clone(),
                });
            }
        }
    }

    Ok(ValidationReport {
        video_id: video_id.to_string(),
        violations,
    })
}
