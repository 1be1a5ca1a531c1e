//! Challenge attributes: per-instance binary and categorical labels used
//! for diagnostic metric breakdowns.
//!
//! Six binary attributes (ST, FM, SV, ARV, ER, MT) are deterministic
//! functions of the ground-truth track geometry and are derived here. The
//! remaining attributes are human judgments and are only ever ingested from
//! a sidecar file, never inferred from pixels.

mod auto;
mod breakdown;
mod cooccurrence;
mod sidecar;

pub use auto::{
    attr_aspect_ratio_variation, attr_exit_reentry, attr_fast_motion, attr_multiple_targets,
    attr_scale_variation, attr_small_target, FAST_MOTION_PX, SCALE_RATIO_RANGE,
    SMALL_TARGET_RATIO,
};
pub use breakdown::{attribute_breakdown, AttributeBreakdown, BreakdownRow};
pub use cooccurrence::{cooccurrence, CooccurrenceMatrix};
pub use sidecar::{load_attribute_sidecar, parse_attribute_sidecar, PartialProfile, Sidecar};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dataset::{collect_geometries, DatasetIndex};
use crate::error::{Error, Result};

/// The thirteen binary challenge attributes, in canonical table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryAttribute {
    /// Small target: mean present-frame mask ratio below 0.1% of the image.
    St,
    /// Fast motion: mean centroid displacement above 20 px per frame step.
    Fm,
    /// Scale variation: pairwise area ratio escaping [0.5, 2.0].
    Sv,
    /// Viewpoint change (manual).
    Vc,
    /// Occlusion (manual).
    Occ,
    /// Appearance change (manual).
    Ac,
    /// Similar distractors (manual).
    Sd,
    /// Illumination change (manual).
    Ic,
    /// Motion blur (manual).
    Mb,
    /// Multiple targets: two or more objects in the video.
    Mt,
    /// Exit and re-entry: a present -> absent -> present pattern.
    Er,
    /// Camouflage (manual).
    Cam,
    /// Aspect ratio variation: a box aspect escaping [0.5, 2.0].
    Arv,
}

/// Canonical attribute order used by tables and the co-occurrence matrix.
pub const BINARY_ATTRIBUTES: [BinaryAttribute; 13] = [
    BinaryAttribute::St,
    BinaryAttribute::Fm,
    BinaryAttribute::Sv,
    BinaryAttribute::Vc,
    BinaryAttribute::Occ,
    BinaryAttribute::Ac,
    BinaryAttribute::Sd,
    BinaryAttribute::Ic,
    BinaryAttribute::Mb,
    BinaryAttribute::Mt,
    BinaryAttribute::Er,
    BinaryAttribute::Cam,
    BinaryAttribute::Arv,
];

impl BinaryAttribute {
    pub fn code(&self) -> &'static str {
        match self {
            BinaryAttribute::St => "ST",
            BinaryAttribute::Fm => "FM",
            BinaryAttribute::Sv => "SV",
            BinaryAttribute::Vc => "VC",
            BinaryAttribute::Occ => "OCC",
            BinaryAttribute::Ac => "AC",
            BinaryAttribute::Sd => "SD",
            BinaryAttribute::Ic => "IC",
            BinaryAttribute::Mb => "MB",
            BinaryAttribute::Mt => "MT",
            BinaryAttribute::Er => "ER",
            BinaryAttribute::Cam => "CAM",
            BinaryAttribute::Arv => "ARV",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        BINARY_ATTRIBUTES.iter().copied().find(|a| a.code() == code)
    }

    pub fn index(&self) -> usize {
        BINARY_ATTRIBUTES
            .iter()
            .position(|a| a == self)
            .expect("attribute in canonical order")
    }

    /// Whether the toolkit derives this flag from masks.
    pub fn is_auto(&self) -> bool {
        matches!(
            self,
            BinaryAttribute::St
                | BinaryAttribute::Fm
                | BinaryAttribute::Sv
                | BinaryAttribute::Arv
                | BinaryAttribute::Er
                | BinaryAttribute::Mt
        )
    }
}

/// Where an attribute value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Auto,
    Sidecar,
}

macro_rules! coded_enum {
    ($(#[$doc:meta])* $name:ident { $($variant:ident => $code:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub fn code(&self) -> &'static str {
                match self {
                    $(Self::$variant => $code),+
                }
            }

            pub fn from_code(code: &str) -> Option<Self> {
                match code {
                    $($code => Some(Self::$variant)),+ ,
                    _ => None,
                }
            }

            pub const ALL: &'static [$name] = &[$(Self::$variant),+];
        }
    };
}

coded_enum! {
    /// Underwater visibility of the target region.
    Visibility {
        Low => "low",
        Medium => "medium",
        High => "high",
    }
}

coded_enum! {
    /// The specific underwater environment of the sequence.
    SceneType {
        Sea => "sea",
        River => "river",
        Pool => "pool",
        WaterTank => "water tank",
        FishTank => "fish tank",
        Basin => "basin",
        Bowl => "bowl",
        Cup => "cup",
        Aquarium => "aquarium",
        Pond => "pond",
        Puddle => "puddle",
        Lake => "lake",
    }
}

coded_enum! {
    /// Color characteristics of the water around the target.
    WaterColor {
        Colorless => "colorless",
        Ash => "ash",
        Gray => "gray",
        Green => "green",
        LightGreen => "light green",
        Dark => "dark",
        BlueBlack => "blue-black",
        DeepBlue => "deep blue",
        Blue => "blue",
        LightBlue => "light blue",
        PartlyBlue => "partly blue",
        GrayBlue => "gray-blue",
        LightYellow => "light yellow",
        LightBrown => "light brown",
        Cyan => "cyan",
        LightPurple => "light purple",
    }
}

/// One object instance's attribute assignment with per-field provenance.
/// Fields never written stay unset and are excluded from co-occurrence
/// counts.
#[derive(Debug, Clone)]
pub struct AttributeProfile {
    pub video_id: String,
    pub object_id: u8,
    flags: [Option<(bool, Provenance)>; 13],
    visibility: Option<(Visibility, Provenance)>,
    scene: Option<(SceneType, Provenance)>,
    water_color: Option<(WaterColor, Provenance)>,
}

impl AttributeProfile {
    pub fn new(video_id: impl Into<String>, object_id: u8) -> Self {
        Self {
            video_id: video_id.into(),
            object_id,
            flags: [None; 13],
            visibility: None,
            scene: None,
            water_color: None,
        }
    }

    pub fn flag(&self, attribute: BinaryAttribute) -> Option<(bool, Provenance)> {
        self.flags[attribute.index()]
    }

    /// True iff the flag is set and true.
    pub fn is_true(&self, attribute: BinaryAttribute) -> bool {
        matches!(self.flags[attribute.index()], Some((true, _)))
    }

    pub fn set_flag(&mut self, attribute: BinaryAttribute, value: bool, provenance: Provenance) {
        self.flags[attribute.index()] = Some((value, provenance));
    }

    pub fn visibility(&self) -> Option<(Visibility, Provenance)> {
        self.visibility
    }

    pub fn scene(&self) -> Option<(SceneType, Provenance)> {
        self.scene
    }

    pub fn water_color(&self) -> Option<(WaterColor, Provenance)> {
        self.water_color
    }

    /// Count of set binary flags.
    pub fn set_flag_count(&self) -> usize {
        self.flags.iter().flatten().count()
    }

    /// JSON view with values and provenance, for the profiles report.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("video_id".into(), json!(self.video_id));
        map.insert("object_id".into(), json!(self.object_id));
        let mut attrs = serde_json::Map::new();
        for attribute in BINARY_ATTRIBUTES {
            if let Some((value, provenance)) = self.flag(attribute) {
                attrs.insert(
                    attribute.code().into(),
                    json!({ "value": value, "provenance": provenance }),
                );
            }
        }
        if let Some((v, p)) = self.visibility {
            attrs.insert("UV".into(), json!({ "value": v.code(), "provenance": p }));
        }
        if let Some((v, p)) = self.scene {
            attrs.insert("US".into(), json!({ "value": v.code(), "provenance": p }));
        }
        if let Some((v, p)) = self.water_color {
            attrs.insert("WC".into(), json!({ "value": v.code(), "provenance": p }));
        }
        map.insert("attributes".into(), serde_json::Value::Object(attrs));
        serde_json::Value::Object(map)
    }
}

/// Profiles for every instance of a split, plus merge warnings.
#[derive(Debug, Clone, Default)]
pub struct ProfileSet {
    pub profiles: BTreeMap<(String, u8), AttributeProfile>,
    /// Human-readable notes: sidecar overrides of auto values and sidecar
    /// entries that matched no instance.
    pub warnings: Vec<String>,
}

impl ProfileSet {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, video_id: &str, object_id: u8) -> Option<&AttributeProfile> {
        self.profiles.get(&(video_id.to_string(), object_id))
    }

    pub fn iter(&self) -> impl Iterator<Item = &AttributeProfile> {
        self.profiles.values()
    }
}

/// Derive auto attributes from ground-truth tracks and merge the sidecar.
///
/// Sidecar values win over derived ones (with a warning); instances whose
/// geometry cannot support a rule (fewer than two present frames for FM/SV)
/// leave that flag unset. An object absent from every frame is a data error.
pub fn compute_profiles(index: &DatasetIndex, sidecar: Option<&Sidecar>) -> Result<ProfileSet> {
    let geometries = collect_geometries(index)?;
    let mut set = ProfileSet::default();

    for video in index.videos() {
        let multiple = attr_multiple_targets(video);
        for object_id in video.object_ids() {
            let key = (video.video_id.clone(), object_id);
            let geometry = geometries.get(&key).expect("geometry for indexed object");
            let mut profile = AttributeProfile::new(&video.video_id, object_id);

            profile.set_flag(
                BinaryAttribute::St,
                attr_small_target(geometry)?,
                Provenance::Auto,
            );
            match attr_fast_motion(geometry) {
                Ok(value) => profile.set_flag(BinaryAttribute::Fm, value, Provenance::Auto),
                Err(Error::InsufficientPresence { .. }) => {}
                Err(e) => return Err(e),
            }
            match attr_scale_variation(geometry) {
                Ok(value) => profile.set_flag(BinaryAttribute::Sv, value, Provenance::Auto),
                Err(Error::InsufficientPresence { .. }) => {}
                Err(e) => return Err(e),
            }
            profile.set_flag(
                BinaryAttribute::Arv,
                attr_aspect_ratio_variation(geometry)?,
                Provenance::Auto,
            );
            profile.set_flag(
                BinaryAttribute::Er,
                attr_exit_reentry(geometry),
                Provenance::Auto,
            );
            profile.set_flag(BinaryAttribute::Mt, multiple, Provenance::Auto);

            set.profiles.insert(key, profile);
        }
    }

    if let Some(sidecar) = sidecar {
        merge_sidecar(&mut set, sidecar);
    }
    Ok(set)
}

fn merge_sidecar(set: &mut ProfileSet, sidecar: &Sidecar) {
    let mut warnings = Vec::new();
    for (video_id, video_entries) in sidecar.videos() {
        let instance_keys: Vec<(String, u8)> = set
            .profiles
            .keys()
            .filter(|(vid, _)| vid == video_id)
            .cloned()
            .collect();
        if instance_keys.is_empty() {
            warnings.push(format!("sidecar video {video_id} matches no indexed instance"));
            continue;
        }
        // Broadcast entries first, explicit per-object entries on top.
        if let Some(partial) = video_entries.broadcast() {
            for key in &instance_keys {
                let profile = set.profiles.get_mut(key).expect("key from this map");
                apply_partial(profile, partial, &mut warnings);
            }
        }
        for (object_id, partial) in video_entries.objects() {
            let key = (video_id.to_string(), *object_id);
            match set.profiles.get_mut(&key) {
                Some(profile) => apply_partial(profile, partial, &mut warnings),
                None => warnings.push(format!(
                    "sidecar object {video_id}/{object_id} matches no indexed instance"
                )),
            }
        }
    }
    set.warnings.extend(warnings);
}

fn apply_partial(profile: &mut AttributeProfile, partial: &PartialProfile, warnings: &mut Vec<String>) {
    for (attribute, value) in partial.flags() {
        if let Some((auto_value, Provenance::Auto)) = profile.flag(attribute) {
            warnings.push(format!(
                "sidecar overrides auto {} for {}/{} (auto={}, sidecar={})",
                attribute.code(),
                profile.video_id,
                profile.object_id,
                auto_value,
                value,
            ));
        }
        profile.set_flag(attribute, value, Provenance::Sidecar);
    }
    if let Some(v) = partial.visibility {
        profile.visibility = Some((v, Provenance::Sidecar));
    }
    if let Some(v) = partial.scene {
        profile.scene = Some((v, Provenance::Sidecar));
    }
    if let Some(v) = partial.water_color {
        profile.water_color = Some((v, Provenance::Sidecar));
    }
}
