//! Synthetic on-disk datasets in the YouTube-VOS layout.
//!
//! Annotation PNGs are written through the `image` crate, so the library's
//! own codec never round-trips with itself in tests that load fixtures.

use std::collections::BTreeMap;
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder, RgbImage};

/// Object declaration for the fixture's meta.json.
#[derive(Debug, Clone)]
pub struct ObjectSpec {
    pub category: String,
    /// Explicit meta frame list; by default the frames where the label
    /// actually appears.
    pub frames_override: Option<Vec<String>>,
}

/// One synthetic video: label rasters plus object categories.
#[derive(Debug, Clone)]
pub struct SyntheticVideo {
    pub id: String,
    pub width: u32,
    pub height: u32,
    /// `(frame_name, labels)` in playback order.
    pub frames: Vec<(String, Vec<u8>)>,
    /// object id -> meta declaration.
    pub objects: BTreeMap<u8, ObjectSpec>,
    /// Optional constant-color JPEG frames `(r, g, b)`; written for every
    /// frame when set.
    pub jpeg_color: Option<(u8, u8, u8)>,
}

impl SyntheticVideo {
    pub fn new(id: impl Into<String>, width: u32, height: u32) -> Self {
        Self {
            id: id.into(),
            width,
            height,
            frames: Vec::new(),
            objects: BTreeMap::new(),
            jpeg_color: None,
        }
    }

    /// Append a frame with auto-generated zero-padded name.
    pub fn push_frame(&mut self, labels: Vec<u8>) -> &mut Self {
        assert_eq!(labels.len(), (self.width * self.height) as usize);
        let name = format!("{:05}", self.frames.len());
        self.frames.push((name, labels));
        self
    }

    pub fn category(mut self, object_id: u8, category: &str) -> Self {
        self.objects.insert(
            object_id,
            ObjectSpec {
                category: category.to_string(),
                frames_override: None,
            },
        );
        self
    }

    /// Declare an object with an explicit meta frame list (for fixtures
    /// whose metadata intentionally disagrees with the rasters).
    pub fn category_with_frames(mut self, object_id: u8, category: &str, frames: &[&str]) -> Self {
        self.objects.insert(
            object_id,
            ObjectSpec {
                category: category.to_string(),
                frames_override: Some(frames.iter().map(|s| s.to_string()).collect()),
            },
        );
        self
    }

    pub fn with_jpeg_color(mut self, rgb: (u8, u8, u8)) -> Self {
        self.jpeg_color = Some(rgb);
        self
    }

    /// Frames in which an object id appears.
    fn frames_of(&self, object_id: u8) -> Vec<String> {
        self.frames
            .iter()
            .filter(|(_, labels)| labels.contains(&object_id))
            .map(|(name, _)| name.clone())
            .collect()
    }
}

/// Encode labels as an 8-bit grayscale PNG via the `image` crate.
pub fn encode_gray_png(width: u32, height: u32, labels: &[u8]) -> Vec<u8> {
    let mut bytes = Vec::new();
    PngEncoder::new(Cursor::new(&mut bytes))
        .write_image(labels, width, height, ExtendedColorType::L8)
        .expect("png encode");
    bytes
}

/// Write a split root: `Annotations/`, `meta.json`, and `JPEGImages/` for
/// videos that request it.
pub fn write_dataset(root: &Path, videos: &[SyntheticVideo]) {
    let mut meta_videos = serde_json::Map::new();
    for video in videos {
        let ann_dir = root.join("Annotations").join(&video.id);
        fs::create_dir_all(&ann_dir).expect("create annotation dir");
        for (name, labels) in &video.frames {
            let bytes = encode_gray_png(video.width, video.height, labels);
            fs::write(ann_dir.join(format!("{name}.png")), bytes).expect("write png");
        }
        if let Some((r, g, b)) = video.jpeg_color {
            let img_dir = root.join("JPEGImages").join(&video.id);
            fs::create_dir_all(&img_dir).expect("create image dir");
            for (name, _) in &video.frames {
                let image = RgbImage::from_pixel(video.width, video.height, image::Rgb([r, g, b]));
                let mut bytes = Vec::new();
                JpegEncoder::new_with_quality(Cursor::new(&mut bytes), 100)
                    .write_image(
                        image.as_raw(),
                        video.width,
                        video.height,
                        ExtendedColorType::Rgb8,
                    )
                    .expect("jpeg encode");
                fs::write(img_dir.join(format!("{name}.jpg")), bytes).expect("write jpg");
            }
        }

        let mut objects = serde_json::Map::new();
        for (&object_id, spec) in &video.objects {
            let frames = spec
                .frames_override
                .clone()
                .unwrap_or_else(|| video.frames_of(object_id));
            objects.insert(
                object_id.to_string(),
                serde_json::json!({
                    "category": spec.category,
                    "frames": frames,
                }),
            );
        }
        meta_videos.insert(video.id.clone(), serde_json::json!({ "objects": objects }));
    }
    let meta = serde_json::json!({ "videos": meta_videos });
    fs::write(
        root.join("meta.json"),
        serde_json::to_string_pretty(&meta).expect("meta json"),
    )
    .expect("write meta");
}

/// Write prediction rasters mirroring the Annotations layout.
pub fn write_predictions(
    pred_root: &Path,
    video_id: &str,
    width: u32,
    height: u32,
    frames: &[(String, Vec<u8>)],
) {
    let dir = pred_root.join(video_id);
    fs::create_dir_all(&dir).expect("create prediction dir");
    for (name, labels) in frames {
        let bytes = encode_gray_png(width, height, labels);
        fs::write(dir.join(format!("{name}.png")), bytes).expect("write png");
    }
}

/// Copy a fixture's ground-truth rasters as identity predictions.
pub fn write_identity_predictions(pred_root: &Path, videos: &[SyntheticVideo]) {
    for video in videos {
        write_predictions(pred_root, &video.id, video.width, video.height, &video.frames);
    }
}

/// A tempdir-backed split root plus a prediction root.
pub struct TempDataset {
    _dir: tempfile::TempDir,
    pub root: PathBuf,
    pub pred_root: PathBuf,
}

impl TempDataset {
    pub fn new(videos: &[SyntheticVideo]) -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let root = dir.path().join("gt");
        let pred_root = dir.path().join("pred");
        fs::create_dir_all(&root).expect("create root");
        fs::create_dir_all(&pred_root).expect("create pred root");
        write_dataset(&root, videos);
        Self {
            _dir: dir,
            root,
            pred_root,
        }
    }

    pub fn write_sidecar(&self, json: &serde_json::Value) -> PathBuf {
        let path = self.root.join("attributes.json");
        fs::write(&path, serde_json::to_string_pretty(json).expect("sidecar json"))
            .expect("write sidecar");
        path
    }

    pub fn write_taxonomy(&self, pairs: &[(&str, &str)]) -> PathBuf {
        let map: BTreeMap<&str, &str> = pairs.iter().copied().collect();
        let path = self.root.join("taxonomy.json");
        fs::write(&path, serde_json::to_string_pretty(&map).expect("taxonomy json"))
            .expect("write taxonomy");
        path
    }
}

/// Rectangle helper: labels with `object_id` over an inclusive box.
pub fn rect_labels(
    width: u32,
    height: u32,
    object_id: u8,
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
) -> Vec<u8> {
    let mut labels = vec![0u8; (width * height) as usize];
    stamp_rect(&mut labels, width, object_id, x0, y0, x1, y1);
    labels
}

/// Stamp a rectangle of `object_id` into an existing label buffer.
pub fn stamp_rect(
    labels: &mut [u8],
    width: u32,
    object_id: u8,
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
) {
    for y in y0..=y1 {
        for x in x0..=x1 {
            labels[(y * width + x) as usize] = object_id;
        }
    }
}
