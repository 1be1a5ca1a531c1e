//! Deterministic seeded sampling of training-video subsets for the
//! annotation-efficiency protocol.
//!
//! Unstratified sampling takes a prefix of one seeded permutation, so
//! subsets nest across fractions under a fixed seed. Manifests record every
//! parameter needed to reproduce them.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetIndex, Split};
use crate::error::{Error, Result};
use crate::stats::Taxonomy;
use crate::TOOLKIT_VERSION;

/// Subset request: a fraction of the training videos under a seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetSpec {
    /// In `(0, 1]`; the resulting count is `max(1, round(fraction * n))`.
    pub fraction: f64,
    pub seed: u64,
    /// Allocate proportionally per superclass (needs a taxonomy).
    pub stratify_by_superclass: bool,
}

impl SubsetSpec {
    pub fn new(fraction: f64, seed: u64) -> Self {
        Self {
            fraction,
            seed,
            stratify_by_superclass: false,
        }
    }
}

/// Manifest header serialized as the first line of the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub count: usize,
    pub fraction: f64,
    pub seed: u64,
    pub split: Split,
    pub stratified: bool,
    pub toolkit_version: String,
    pub total_videos: usize,
}

/// A sampled subset: JSON header plus newline-delimited video ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetManifest {
    pub header: ManifestHeader,
    pub video_ids: Vec<String>,
}

impl SubsetManifest {
    /// Render the on-disk format: one JSON header line, then one id per
    /// line, trailing newline included.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for id in &self.video_ids {
            out.push_str(id);
            out.push('\n');
        }
        out
    }
}

/// Sample a deterministic subset of the training videos.
///
/// The same `(index, spec)` always yields the same manifest. Without
/// stratification the subset is a prefix of one seeded permutation, so
/// `subset(f1, seed)` is contained in `subset(f2, seed)` whenever
/// `f1 <= f2`.
pub fn sample_subset(
    index: &DatasetIndex,
    spec: &SubsetSpec,
    taxonomy: Option<&Taxonomy>,
) -> Result<SubsetManifest> {
    if index.split() != Split::Train {
        return Err(Error::NotTrainSplit(index.split()));
    }
    if !(spec.fraction > 0.0 && spec.fraction <= 1.0) {
        return Err(Error::InvalidFraction(spec.fraction));
    }
    let all_ids: Vec<String> = index.video_ids().map(str::to_string).collect();
    if all_ids.is_empty() {
        return Err(Error::EmptyTrainSet);
    }

    let target = subset_size(spec.fraction, all_ids.len());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut selected: Vec<String> = if spec.stratify_by_superclass {
        let taxonomy = taxonomy.ok_or(Error::MissingTaxonomy)?;
        stratified_selection(index, &all_ids, target, taxonomy, &mut rng)?
    } else {
        let mut permuted = all_ids.clone();
        permuted.shuffle(&mut rng);
        permuted.truncate(target);
        permuted
    };
    selected.sort();

    Ok(SubsetManifest {
        header: ManifestHeader {
            count: selected.len(),
            fraction: spec.fraction,
            seed: spec.seed,
            split: Split::Train,
            stratified: spec.stratify_by_superclass,
            toolkit_version: TOOLKIT_VERSION.to_string(),
            total_videos: all_ids.len(),
        },
        video_ids: selected,
    })
}

/// `max(1, round(fraction * n))`.
pub fn subset_size(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64).round() as usize).max(1).min(total)
}

/// Proportional allocation by superclass with largest-remainder rounding,
/// then a seeded permutation prefix within each stratum. Strata are visited
/// in name order so the RNG stream is reproducible.
fn stratified_selection(
    index: &DatasetIndex,
    all_ids: &[String],
    target: usize,
    taxonomy: &Taxonomy,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<String>> {
    let mut strata: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for id in all_ids {
        let video = index.video(id).expect("id from this index");
        let first_object = video.objects.values().next().expect("video has objects");
        let superclass = taxonomy.superclass_of(&first_object.category)?;
        strata
            .entry(superclass.to_string())
            .or_default()
            .push(id.clone());
    }

    // Largest-remainder quotas summing exactly to target.
    let total = all_ids.len() as f64;
    let mut quotas: Vec<(String, usize, f64)> = strata
        .iter()
        .map(|(name, ids)| {
            let exact = target as f64 * ids.len() as f64 / total;
            (name.clone(), exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = quotas.iter().map(|(_, q, _)| q).sum();
    let mut remainder = target.saturating_sub(assigned);
    quotas.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then_with(|| a.0.cmp(&b.0)));
    for quota in quotas.iter_mut() {
        if remainder == 0 {
            break;
        }
        if quota.1 < strata[&quota.0].len() {
            quota.1 += 1;
            remainder -= 1;
        }
    }

    let quota_by_name: BTreeMap<String, usize> =
        quotas.into_iter().map(|(name, q, _)| (name, q)).collect();
    let mut selected = Vec::with_capacity(target);
    for (name, ids) in &mut strata {
        let mut ids = ids.clone();
        ids.shuffle(rng);
        ids.truncate(quota_by_name[name]);
        selected.extend(ids);
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_size_rounds_and_floors_at_one() {
        assert_eq!(subset_size(0.01, 1001), 10, "round(10.01)");
        assert_eq!(subset_size(0.05, 1001), 50);
        assert_eq!(subset_size(1.0, 1001), 1001);
        assert_eq!(subset_size(0.0001, 1001), 1, "floored at one video");
    }

    #[test]
    fn manifest_renders_header_then_ids() {
        let manifest = SubsetManifest {
            header: ManifestHeader {
                count: 2,
                fraction: 0.5,
                seed: 7,
                split: Split::Train,
                stratified: false,
                toolkit_version: "0.0.0".into(),
                total_videos: 4,
            },
            video_ids: vec!["a".into(), "b".into()],
        };
        let text = manifest.render();
        let mut lines = text.lines();
        let header: ManifestHeader = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(header.count, 2);
        assert_eq!(lines.collect::<Vec<_>>(), vec!["a", "b"]);
        assert!(text.ends_with('\n'));
    }
}
