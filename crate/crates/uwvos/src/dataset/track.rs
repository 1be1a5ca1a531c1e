//! Per-object track extraction and geometric track summaries.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mask::{BinaryMask, MaskFrame};
use crate::metrics::BBox;

use super::DatasetIndex;

/// One frame of an [`ObjectTrack`]. A frame is absent exactly when its
/// binary mask has zero foreground pixels.
#[derive(Debug, Clone)]
pub struct TrackEntry {
    pub frame_name: String,
    pub mask: BinaryMask,
}

impl TrackEntry {
    pub fn present(&self) -> bool {
        !self.mask.is_empty()
    }
}

/// One object's per-frame binary-mask sequence over a whole video.
#[derive(Debug, Clone)]
pub struct ObjectTrack {
    pub video_id: String,
    pub object_id: u8,
    pub resolution: (u32, u32),
    entries: Vec<TrackEntry>,
}

impl ObjectTrack {
    /// Assemble a track from per-frame masks. All masks must share the
    /// track resolution.
    pub fn new(
        video_id: impl Into<String>,
        object_id: u8,
        resolution: (u32, u32),
        entries: Vec<TrackEntry>,
    ) -> Result<Self> {
        for entry in &entries {
            if entry.mask.resolution() != resolution {
                let (ew, eh) = resolution;
                let (fw, fh) = entry.mask.resolution();
                return Err(Error::DimensionMismatch(ew, eh, fw, fh));
            }
        }
        Ok(Self {
            video_id: video_id.into(),
            object_id,
            resolution,
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TrackEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &TrackEntry {
        &self.entries[index]
    }

    /// Index of the first frame where the object is present.
    pub fn first_present_index(&self) -> Option<usize> {
        self.entries.iter().position(TrackEntry::present)
    }

    /// Per-frame presence flags.
    pub fn presence(&self) -> Vec<bool> {
        self.entries.iter().map(TrackEntry::present).collect()
    }

    /// Geometric per-frame summary (area, centroid, bounding box).
    pub fn geometry(&self) -> TrackGeometry {
        let frames = self
            .entries
            .iter()
            .map(|e| FrameGeometry::of(&e.mask))
            .collect();
        TrackGeometry {
            video_id: self.video_id.clone(),
            object_id: self.object_id,
            resolution: self.resolution,
            frames,
        }
    }
}

/// Area, centroid and bounding box of one present frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGeometry {
    pub area: u64,
    pub centroid: (f64, f64),
    pub bbox: BBox,
}

impl FrameGeometry {
    /// Summarize a mask; `None` for an empty mask.
    pub fn of(mask: &BinaryMask) -> Option<Self> {
        let bbox = crate::metrics::mask_to_bbox(mask)?;
        let centroid = mask.centroid().expect("nonempty mask has a centroid");
        Some(Self {
            area: mask.area(),
            centroid,
            bbox,
        })
    }
}

/// Per-frame geometry of one object track; `None` entries are absent frames.
/// Everything the attribute rules and the mask-size statistics need, without
/// holding full masks in memory.
#[derive(Debug, Clone)]
pub struct TrackGeometry {
    pub video_id: String,
    pub object_id: u8,
    pub resolution: (u32, u32),
    pub frames: Vec<Option<FrameGeometry>>,
}

impl TrackGeometry {
    pub fn present_frames(&self) -> impl Iterator<Item = &FrameGeometry> {
        self.frames.iter().flatten()
    }

    pub fn present_count(&self) -> usize {
        self.frames.iter().flatten().count()
    }

    pub fn presence(&self) -> Vec<bool> {
        self.frames.iter().map(Option::is_some).collect()
    }
}

impl DatasetIndex {
    /// Extract one object's binary-mask track by reading every annotation
    /// raster of the video.
    pub fn extract_track(&self, video_id: &str, object_id: u8) -> Result<ObjectTrack> {
        let video = self.require_video(video_id)?;
        if !video.objects.contains_key(&object_id) {
            return Err(Error::UnknownObject {
                video_id: video_id.to_string(),
                object_id,
            });
        }
        let mut entries = Vec::with_capacity(video.frame_names.len());
        for frame_name in &video.frame_names {
            let raster = self.load_annotation(video_id, frame_name)?;
            if raster.resolution() != video.resolution {
                let (ew, eh) = video.resolution;
                let (fw, fh) = raster.resolution();
                return Err(Error::DimensionMismatch(ew, eh, fw, fh));
            }
            entries.push(TrackEntry {
                frame_name: frame_name.clone(),
                mask: raster.object_mask(object_id),
            });
        }
        ObjectTrack::new(video_id, object_id, video.resolution, entries)
    }
}

/// Extract one object's track (free-function form of
/// [`DatasetIndex::extract_track`]).
pub fn extract_track(
    index: &DatasetIndex,
    video_id: &str,
    object_id: u8,
) -> Result<ObjectTrack> {
    index.extract_track(video_id, object_id)
}

#[derive(Clone, Copy)]
struct GeometryAcc {
    area: u64,
    sum_x: u64,
    sum_y: u64,
    min_x: u32,
    min_y: u32,
    max_x: u32,
    max_y: u32,
}

impl GeometryAcc {
    const EMPTY: Self = Self {
        area: 0,
        sum_x: 0,
        sum_y: 0,
        min_x: u32::MAX,
        min_y: u32::MAX,
        max_x: 0,
        max_y: 0,
    };

    fn finish(&self) -> Option<FrameGeometry> {
        if self.area == 0 {
            return None;
        }
        Some(FrameGeometry {
            area: self.area,
            centroid: (
                self.sum_x as f64 / self.area as f64,
                self.sum_y as f64 / self.area as f64,
            ),
            bbox: BBox::new(self.min_x, self.min_y, self.max_x, self.max_y),
        })
    }
}

/// Geometry summaries for every object of one video, decoding each raster
/// once.
pub fn collect_video_geometries(
    index: &DatasetIndex,
    video_id: &str,
) -> Result<BTreeMap<u8, TrackGeometry>> {
    let video = index.require_video(video_id)?;
    let object_ids: Vec<u8> = video.object_ids().collect();
    let mut per_object: BTreeMap<u8, Vec<Option<FrameGeometry>>> = object_ids
        .iter()
        .map(|&id| (id, Vec::with_capacity(video.frame_names.len())))
        .collect();

    for frame_name in &video.frame_names {
        let raster = index.load_annotation(video_id, frame_name)?;
        if raster.resolution() != video.resolution {
            let (ew, eh) = video.resolution;
            let (fw, fh) = raster.resolution();
            return Err(Error::DimensionMismatch(ew, eh, fw, fh));
        }
        let accs = accumulate_labels(&raster);
        for &id in &object_ids {
            per_object
                .get_mut(&id)
                .expect("preallocated")
                .push(accs[id as usize].finish());
        }
    }

    Ok(per_object
        .into_iter()
        .map(|(id, frames)| {
            (
                id,
                TrackGeometry {
                    video_id: video_id.to_string(),
                    object_id: id,
                    resolution: video.resolution,
                    frames,
                },
            )
        })
        .collect())
}

fn accumulate_labels(raster: &MaskFrame) -> Box<[GeometryAcc; 256]> {
    let mut accs = Box::new([GeometryAcc::EMPTY; 256]);
    let width = raster.width() as usize;
    for (i, &label) in raster.labels().iter().enumerate() {
        if label == 0 {
            continue;
        }
        let x = (i % width) as u32;
        let y = (i / width) as u32;
        let acc = &mut accs[label as usize];
        acc.area += 1;
        acc.sum_x += x as u64;
        acc.sum_y += y as u64;
        acc.min_x = acc.min_x.min(x);
        acc.min_y = acc.min_y.min(y);
        acc.max_x = acc.max_x.max(x);
        acc.max_y = acc.max_y.max(y);
    }
    accs
}

/// Geometry summaries for every object instance in the split, fanned out
/// per video and merged in canonical video order.
pub fn collect_geometries(
    index: &DatasetIndex,
) -> Result<BTreeMap<(String, u8), TrackGeometry>> {
    let ids: Vec<&str> = index.video_ids().collect();
    let per_video: Vec<Result<BTreeMap<u8, TrackGeometry>>> = ids
        .par_iter()
        .map(|vid| collect_video_geometries(index, vid))
        .collect();

    let mut out = BTreeMap::new();
    for (vid, result) in ids.iter().zip(per_video) {
        for (object_id, geometry) in result? {
            out.insert((vid.to_string(), object_id), geometry);
        }
    }
    Ok(out)
}
