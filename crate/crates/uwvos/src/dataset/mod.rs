//! YouTube-VOS-format dataset loading and indexing.
//!
//! A split root holds `Annotations/<video_id>/<frame>.png`, optional
//! `JPEGImages/<video_id>/<frame>.jpg`, and a `meta.json` of the shape
//! `{"videos": {<vid>: {"objects": {<id>: {"category": str, "frames": [str]}}}}}`.
//! Resolution is read from annotation rasters, so the toolkit runs without
//! the JPEG frames present (only channel-intensity statistics need them).

mod track;
mod validate;

pub use track::{
    collect_geometries, collect_video_geometries, extract_track, FrameGeometry, ObjectTrack,
    TrackEntry, TrackGeometry,
};
pub use validate::{validate_sequence, ValidationReport, Violation};

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::MaskFrame;

/// Dataset split a [`DatasetIndex`] was loaded as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
    Custom,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" | "valid" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            "custom" => Ok(Split::Custom),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

/// Per-object metadata from `meta.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectMeta {
    pub object_id: u8,
    pub category: String,
    /// Frame identifier of the object's first appearance.
    pub first_frame: String,
    /// All frames the metadata lists for the object, in frame order.
    pub frames: Vec<String>,
}

/// One video's entry in the index.
#[derive(Debug, Clone, Serialize)]
pub struct VideoEntry {
    pub video_id: String,
    /// Annotation frame identifiers, ordered by numeric stem value.
    pub frame_names: Vec<String>,
    /// `(width, height)` in pixels, read from the first annotation raster.
    pub resolution: (u32, u32),
    pub objects: BTreeMap<u8, ObjectMeta>,
}

impl VideoEntry {
    pub fn frame_count(&self) -> usize {
        self.frame_names.len()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = u8> + '_ {
        self.objects.keys().copied()
    }
}

/// Immutable view over one split of a mask dataset. Safe to share across
/// threads; all loaders are pure functions of the directory tree.
#[derive(Debug, Clone)]
pub struct DatasetIndex {
    root: PathBuf,
    split: Split,
    videos: BTreeMap<String, VideoEntry>,
}

/// Order frame names by the numeric value of their stem, breaking ties
/// lexicographically. Non-numeric stems sort after numeric ones.
pub(crate) fn frame_sort_key(name: &str) -> (u64, String) {
    let numeric = name.parse::<u64>().unwrap_or(u64::MAX);
    (numeric, name.to_string())
}

#[derive(Deserialize)]
struct MetaFile {
    videos: BTreeMap<String, MetaVideo>,
}

#[derive(Deserialize)]
struct MetaVideo {
    objects: BTreeMap<String, MetaObject>,
}

#[derive(Deserialize)]
struct MetaObject {
    category: String,
    frames: Vec<String>,
}

/// Load and index one split. See [`DatasetIndex::load`].
pub fn load_dataset_index(root: impl AsRef<Path>, split: Split) -> Result<DatasetIndex> {
    DatasetIndex::load(root, split)
}

impl DatasetIndex {
    /// Load `meta.json` and the annotation tree under `root`.
    ///
    /// Objects come from the metadata; frame lists come from the PNG files
    /// actually present; resolution comes from each video's first raster.
    pub fn load(root: impl AsRef<Path>, split: Split) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let meta_path = root.join("meta.json");
        if !meta_path.is_file() {
            return Err(Error::MissingMeta(root));
        }
        let meta_text = std::fs::read_to_string(&meta_path)
            .map_err(|e| Error::io(&meta_path, e))?;
        let meta: MetaFile =
            serde_json::from_str(&meta_text).map_err(|e| Error::MalformedMeta(e.to_string()))?;

        let mut videos = BTreeMap::new();
        for (video_id, meta_video) in meta.videos {
            if video_id.is_empty() {
                return Err(Error::MalformedMeta("empty video id".into()));
            }
            let entry = index_video(&root, &video_id, &meta_video)?;
            videos.insert(video_id, entry);
        }
        Ok(Self {
            root,
            split,
            videos,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn len(&self) -> usize {
        self.videos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.videos.is_empty()
    }

    pub fn videos(&self) -> impl Iterator<Item = &VideoEntry> {
        self.videos.values()
    }

    pub fn video_ids(&self) -> impl Iterator<Item = &str> {
        self.videos.keys().map(String::as_str)
    }

    pub fn video(&self, video_id: &str) -> Option<&VideoEntry> {
        self.videos.get(video_id)
    }

    pub(crate) fn require_video(&self, video_id: &str) -> Result<&VideoEntry> {
        self.videos
            .get(video_id)
            .ok_or_else(|| Error::UnknownVideo(video_id.to_string()))
    }

    /// Path of one annotation raster.
    pub fn annotation_path(&self, video_id: &str, frame_name: &str) -> PathBuf {
        self.root
            .join("Annotations")
            .join(video_id)
            .join(format!("{frame_name}.png"))
    }

    /// Path of one JPEG image frame.
    pub fn image_path(&self, video_id: &str, frame_name: &str) -> PathBuf {
        self.root
            .join("JPEGImages")
            .join(video_id)
            .join(format!("{frame_name}.jpg"))
    }

    /// Decode one annotation raster from disk.
    pub fn load_annotation(&self, video_id: &str, frame_name: &str) -> Result<MaskFrame> {
        let path = self.annotation_path(video_id, frame_name);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        MaskFrame::decode(&bytes)
    }

    /// Total object instances across the split.
    pub fn instance_count(&self) -> usize {
        self.videos.values().map(|v| v.objects.len()).sum()
    }
}

fn index_video(root: &Path, video_id: &str, meta_video: &MetaVideo) -> Result<VideoEntry> {
    if meta_video.objects.is_empty() {
        return Err(Error::MalformedMeta(format!(
            "video {video_id} declares no objects"
        )));
    }

    let ann_dir = root.join("Annotations").join(video_id);
    let mut frame_names = Vec::new();
    if ann_dir.is_dir() {
        for entry in std::fs::read_dir(&ann_dir).map_err(|e| Error::io(&ann_dir, e))? {
            let entry = entry.map_err(|e| Error::io(&ann_dir, e))?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) == Some("png") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    frame_names.push(stem.to_string());
                }
            }
        }
    }
    if frame_names.is_empty() {
        return Err(Error::EmptyVideo(video_id.to_string()));
    }
    frame_names.sort_by_key(|n| frame_sort_key(n));

    let first_path = root
        .join("Annotations")
        .join(video_id)
        .join(format!("{}.png", frame_names[0]));
    let bytes = std::fs::read(&first_path).map_err(|e| Error::io(&first_path, e))?;
    let first_raster = MaskFrame::decode(&bytes)?;
    let resolution = first_raster.resolution();
    if resolution.0 == 0 || resolution.1 == 0 {
        return Err(Error::MalformedMeta(format!(
            "video {video_id} has a degenerate resolution {resolution:?}"
        )));
    }

    let mut objects = BTreeMap::new();
    for (id_text, meta_object) in &meta_video.objects {
        let object_id: u8 = id_text.parse().map_err(|_| {
            Error::MalformedMeta(format!("object id {id_text:?} in video {video_id}"))
        })?;
        if object_id == 0 || object_id == 255 {
            return Err(Error::MalformedMeta(format!(
                "object id {object_id} in video {video_id} outside 1..=254"
            )));
        }
        if meta_object.category.is_empty() {
            return Err(Error::MalformedMeta(format!(
                "object {object_id} in video {video_id} has an empty category"
            )));
        }
        if meta_object.frames.is_empty() {
            return Err(Error::MalformedMeta(format!(
                "object {object_id} in video {video_id} lists no frames"
            )));
        }
        let mut frames = meta_object.frames.clone();
        frames.sort_by_key(|n| frame_sort_key(n));
        let first_frame = frames[0].clone();
        if !frame_names.contains(&first_frame) {
            return Err(Error::MalformedMeta(format!(
                "object {object_id} in video {video_id}: first frame {first_frame:?} has no annotation raster"
            )));
        }
        objects.insert(
            object_id,
            ObjectMeta {
                object_id,
                category: meta_object.category.clone(),
                first_frame,
                frames,
            },
        );
    }

    Ok(VideoEntry {
        video_id: video_id.to_string(),
        frame_names,
        resolution,
        objects,
    })
}
