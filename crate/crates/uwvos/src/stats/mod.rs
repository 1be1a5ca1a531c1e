//! Dataset statistics: length, mask-size, category, and channel-intensity
//! distributions as machine-readable histograms.

mod taxonomy;

pub use taxonomy::{Taxonomy, SUPERCLASSES};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{collect_geometries, DatasetIndex};
use crate::error::{Error, Result};

/// Share threshold separating "small" instances in the mask-size summary.
pub const SMALL_MASK_RATIO: f64 = 0.01;

/// Default bin widths: frames for video length, mask ratio, and intensity
/// levels. All are configurable at the call sites.
pub const DEFAULT_LENGTH_BIN: u64 = 100;
pub const DEFAULT_RATIO_BIN: f64 = 0.005;
pub const DEFAULT_INTENSITY_BIN: f64 = 10.0;

/// A fixed-width histogram. Edges are strictly increasing with
/// `counts.len() + 1` entries; the final bin includes its upper edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<f64>,
    pub normalized: bool,
}

impl Histogram {
    /// Build over `[origin, origin + bins * width]` and fill with `values`.
    /// Values outside the range clamp into the terminal bins.
    pub fn fixed_range(origin: f64, width: f64, bins: usize, values: &[f64]) -> Self {
        assert!(width > 0.0 && bins > 0);
        let edges: Vec<f64> = (0..=bins).map(|i| origin + i as f64 * width).collect();
        let mut counts = vec![0.0; bins];
        for &v in values {
            let raw = ((v - origin) / width).floor();
            let bin = (raw.max(0.0) as usize).min(bins - 1);
            counts[bin] += 1.0;
        }
        Self {
            edges,
            counts,
            normalized: false,
        }
    }

    /// Build from `origin` with enough `width`-sized bins to cover the data.
    pub fn covering(origin: f64, width: f64, values: &[f64]) -> Self {
        let max = values.iter().copied().fold(origin, f64::max);
        let bins = (((max - origin) / width).floor() as usize + 1).max(1);
        Self::fixed_range(origin, width, bins, values)
    }

    /// The same histogram with counts scaled to sum to 1.
    pub fn normalized(&self) -> Histogram {
        let total = self.total();
        let counts = if total > 0.0 {
            self.counts.iter().map(|c| c / total).collect()
        } else {
            self.counts.clone()
        };
        Histogram {
            edges: self.edges.clone(),
            counts,
            normalized: true,
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Index of the fullest bin (first one on ties), `None` when empty.
    pub fn mode_bin(&self) -> Option<usize> {
        if self.total() == 0.0 {
            return None;
        }
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        Some(best)
    }

    /// Lower edge of the fullest bin.
    pub fn mode_edge(&self) -> Option<f64> {
        self.mode_bin().map(|i| self.edges[i])
    }
}

/// Video length distribution plus scalar summaries.
#[derive(Debug, Clone, Serialize)]
pub struct VideoLengthStats {
    pub histogram: Histogram,
    pub mean: f64,
    pub max: u64,
    pub total_videos: usize,
    pub total_frames: u64,
}

/// Per-video frame counts binned at `bin_width` frames.
pub fn video_length_histogram(index: &DatasetIndex, bin_width: u64) -> VideoLengthStats {
    let lengths: Vec<u64> = index.videos().map(|v| v.frame_count() as u64).collect();
    let values: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let total_frames: u64 = lengths.iter().sum();
    let max = lengths.iter().copied().max().unwrap_or(0);
    let mean = if lengths.is_empty() {
        0.0
    } else {
        total_frames as f64 / lengths.len() as f64
    };
    VideoLengthStats {
        histogram: Histogram::covering(0.0, bin_width as f64, &values),
        mean,
        max,
        total_videos: lengths.len(),
        total_frames,
    }
}

/// Mask-size distribution plus the small-instance share.
#[derive(Debug, Clone, Serialize)]
pub struct MaskSizeStats {
    pub histogram: Histogram,
    /// Share of instances with mean mask ratio below [`SMALL_MASK_RATIO`].
    pub small_fraction: f64,
    pub instances: usize,
    pub small_threshold: f64,
}

/// Per-instance mean mask ratio (area over resolution, averaged over
/// present frames), binned at `bin_width`.
pub fn mask_size_distribution(index: &DatasetIndex, bin_width: f64) -> Result<MaskSizeStats> {
    let geometries = collect_geometries(index)?;
    let mut ratios = Vec::with_capacity(geometries.len());
    for ((video_id, object_id), geometry) in &geometries {
        let (w, h) = geometry.resolution;
        let image_area = w as f64 * h as f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        for frame in geometry.present_frames() {
            sum += frame.area as f64 / image_area;
            count += 1;
        }
        if count == 0 {
            return Err(Error::AllAbsentTrack {
                video_id: video_id.clone(),
                object_id: *object_id,
            });
        }
        ratios.push(sum / count as f64);
    }

    let bins = ((1.0 / bin_width).ceil() as usize).max(1);
    let histogram = Histogram::fixed_range(0.0, bin_width, bins, &ratios);
    let small = ratios.iter().filter(|&&r| r < SMALL_MASK_RATIO).count();
    let small_fraction = if ratios.is_empty() {
        0.0
    } else {
        small as f64 / ratios.len() as f64
    };
    Ok(MaskSizeStats {
        histogram,
        small_fraction,
        instances: ratios.len(),
        small_threshold: SMALL_MASK_RATIO,
    })
}

/// Per-channel distributions of first-frame mean intensities.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelIntensityStats {
    pub red: Histogram,
    pub green: Histogram,
    pub blue: Histogram,
    /// Lower edges of the fullest bins, `(r, g, b)`.
    pub modes: (f64, f64, f64),
    pub videos: usize,
}

/// For every video, the mean R, G and B over its first frame's pixels,
/// binned over videos at `bin_width` intensity levels.
pub fn channel_intensity_distribution(
    index: &DatasetIndex,
    bin_width: f64,
) -> Result<ChannelIntensityStats> {
    let videos: Vec<(&str, &str)> = index
        .videos()
        .map(|v| (v.video_id.as_str(), v.frame_names[0].as_str()))
        .collect();
    let means: Vec<Result<(f64, f64, f64)>> = videos
        .par_iter()
        .map(|(video_id, frame)| first_frame_means(index, video_id, frame))
        .collect();

    let mut reds = Vec::with_capacity(videos.len());
    let mut greens = Vec::with_capacity(videos.len());
    let mut blues = Vec::with_capacity(videos.len());
    for result in means {
        let (r, g, b) = result?;
        reds.push(r);
        greens.push(g);
        blues.push(b);
    }

    let bins = ((256.0 / bin_width).ceil() as usize).max(1);
    let hist = |values: &[f64]| Histogram::fixed_range(0.0, bin_width, bins, values);
    let red = hist(&reds);
    let green = hist(&greens);
    let blue = hist(&blues);
    let modes = (
        red.mode_edge().unwrap_or(0.0),
        green.mode_edge().unwrap_or(0.0),
        blue.mode_edge().unwrap_or(0.0),
    );
    Ok(ChannelIntensityStats {
        red,
        green,
        blue,
        modes,
        videos: videos.len(),
    })
}

fn first_frame_means(index: &DatasetIndex, video_id: &str, frame: &str) -> Result<(f64, f64, f64)> {
    let path = index.image_path(video_id, frame);
    if !path.is_file() {
        return Err(Error::MissingFrames(video_id.to_string()));
    }
    let image = image::open(&path)
        .map_err(|e| Error::Decode(format!("{}: {e}", path.display())))?
        .to_rgb8();
    let n = (image.width() as u64 * image.height() as u64).max(1);
    let mut sums = [0u64; 3];
    for pixel in image.pixels() {
        sums[0] += pixel.0[0] as u64;
        sums[1] += pixel.0[1] as u64;
        sums[2] += pixel.0[2] as u64;
    }
    Ok((
        sums[0] as f64 / n as f64,
        sums[1] as f64 / n as f64,
        sums[2] as f64 / n as f64,
    ))
}

/// Instance counts grouped by superclass and class.
#[derive(Debug, Clone, Serialize)]
pub struct CategoryDistribution {
    pub by_superclass: BTreeMap<String, BTreeMap<String, u64>>,
}

impl CategoryDistribution {
    pub fn total_instances(&self) -> u64 {
        self.by_superclass.values().flat_map(|m| m.values()).sum()
    }

    pub fn class_count(&self) -> usize {
        self.by_superclass.values().map(|m| m.len()).sum()
    }

    pub fn count(&self, superclass: &str, class: &str) -> u64 {
        self.by_superclass
            .get(superclass)
            .and_then(|m| m.get(class))
            .copied()
            .unwrap_or(0)
    }

    /// The `k` most frequent classes of one superclass, ties broken by name.
    pub fn top_k(&self, superclass: &str, k: usize) -> Vec<(String, u64)> {
        let Some(classes) = self.by_superclass.get(superclass) else {
            return Vec::new();
        };
        let mut entries: Vec<(String, u64)> =
            classes.iter().map(|(c, &n)| (c.clone(), n)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(k);
        entries
    }
}

/// Count object instances per class, grouped by the taxonomy's superclass.
pub fn category_distribution(
    index: &DatasetIndex,
    taxonomy: &Taxonomy,
) -> Result<CategoryDistribution> {
    let mut by_superclass: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for video in index.videos() {
        for object in video.objects.values() {
            let superclass = taxonomy.superclass_of(&object.category)?;
            *by_superclass
                .entry(superclass.to_string())
                .or_default()
                .entry(object.category.clone())
                .or_default() += 1;
        }
    }
    Ok(CategoryDistribution { by_superclass })
}
