//! Sidecar files carrying human-judged attributes.
//!
//! Schema: `{"<video_id>": {"<object_id>": {"CAM": true, "UV": "low", ...}}}`
//! with a `"*"` object key broadcasting to every object of the video.
//! Unknown attribute keys are rejected; enum values must match the
//! attribute tables exactly.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

use super::{BinaryAttribute, SceneType, Visibility, WaterColor};

/// A partial attribute assignment parsed from one sidecar entry.
#[derive(Debug, Clone, Default)]
pub struct PartialProfile {
    flags: Vec<(BinaryAttribute, bool)>,
    pub visibility: Option<Visibility>,
    pub scene: Option<SceneType>,
    pub water_color: Option<WaterColor>,
}

impl PartialProfile {
    pub fn flags(&self) -> impl Iterator<Item = (BinaryAttribute, bool)> + '_ {
        self.flags.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
            && self.visibility.is_none()
            && self.scene.is_none()
            && self.water_color.is_none()
    }
}

/// Entries of one video: an optional broadcast profile plus per-object ones.
#[derive(Debug, Clone, Default)]
pub struct VideoSidecar {
    broadcast: Option<PartialProfile>,
    objects: BTreeMap<u8, PartialProfile>,
}

impl VideoSidecar {
    pub fn broadcast(&self) -> Option<&PartialProfile> {
        self.broadcast.as_ref()
    }

    pub fn objects(&self) -> impl Iterator<Item = (&u8, &PartialProfile)> {
        self.objects.iter()
    }
}

/// Parsed sidecar file.
#[derive(Debug, Clone, Default)]
pub struct Sidecar {
    videos: BTreeMap<String, VideoSidecar>,
}

impl Sidecar {
    pub fn videos(&self) -> impl Iterator<Item = (&String, &VideoSidecar)> {
        self.videos.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.videos.is_empty()
    }
}

/// Read and parse a sidecar JSON file.
pub fn load_attribute_sidecar(path: impl AsRef<Path>) -> Result<Sidecar> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_attribute_sidecar(&text)
}

/// Parse sidecar JSON text.
pub fn parse_attribute_sidecar(text: &str) -> Result<Sidecar> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    let top = value
        .as_object()
        .ok_or_else(|| Error::SchemaViolation("top level must be an object".into()))?;

    let mut videos = BTreeMap::new();
    for (video_id, entry) in top {
        let object_map = entry.as_object().ok_or_else(|| {
            Error::SchemaViolation(format!("video {video_id}: expected an object map"))
        })?;
        let mut video = VideoSidecar::default();
        for (object_key, attrs) in object_map {
            let partial = parse_partial(video_id, object_key, attrs)?;
            if object_key == "*" {
                video.broadcast = Some(partial);
            } else {
                let object_id: u8 = object_key.parse().map_err(|_| {
                    Error::SchemaViolation(format!(
                        "video {video_id}: object key {object_key:?} is neither an id nor \"*\""
                    ))
                })?;
                if object_id == 0 || object_id == 255 {
                    return Err(Error::SchemaViolation(format!(
                        "video {video_id}: object id {object_id} outside 1..=254"
                    )));
                }
                video.objects.insert(object_id, partial);
            }
        }
        videos.insert(video_id.clone(), video);
    }
    Ok(Sidecar { videos })
}

fn parse_partial(
    video_id: &str,
    object_key: &str,
    attrs: &serde_json::Value,
) -> Result<PartialProfile> {
    let context = format!("{video_id}/{object_key}");
    let map = attrs
        .as_object()
        .ok_or_else(|| Error::SchemaViolation(format!("{context}: expected an attribute map")))?;

    let mut partial = PartialProfile::default();
    for (key, value) in map {
        match key.as_str() {
            "UV" => partial.visibility = Some(parse_enum(key, value, Visibility::from_code)?),
            "US" => partial.scene = Some(parse_enum(key, value, SceneType::from_code)?),
            "WC" => partial.water_color = Some(parse_enum(key, value, WaterColor::from_code)?),
            other => match BinaryAttribute::from_code(other) {
                Some(attribute) => {
                    let flag = value.as_bool().ok_or_else(|| {
                        Error::SchemaViolation(format!(
                            "{context}: attribute {other} expects a boolean"
                        ))
                    })?;
                    partial.flags.push((attribute, flag));
                }
                None => {
                    return Err(Error::SchemaViolation(format!(
                        "{context}: unknown attribute key {other:?}"
                    )))
                }
            },
        }
    }
    Ok(partial)
}

fn parse_enum<T>(
    attribute: &str,
    value: &serde_json::Value,
    from_code: impl Fn(&str) -> Option<T>,
) -> Result<T> {
    let text = value.as_str().ok_or_else(|| {
        Error::SchemaViolation(format!("attribute {attribute} expects a string"))
    })?;
    from_code(text).ok_or_else(|| Error::UnknownEnumValue {
        attribute: attribute.to_string(),
        value: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_entry_parses() {
        let sidecar =
            parse_attribute_sidecar(r#"{"vid_a": {"2": {"CAM": true, "UV": "low"}}}"#).unwrap();
        let video = &sidecar.videos["vid_a"];
        let partial = &video.objects[&2];
        assert_eq!(
            partial.flags().collect::<Vec<_>>(),
            vec![(BinaryAttribute::Cam, true)]
        );
        assert_eq!(partial.visibility, Some(Visibility::Low));
    }

    #[test]
    fn unknown_color_is_an_enum_error() {
        let err = parse_attribute_sidecar(r#"{"v": {"1": {"WC": "magenta"}}}"#).unwrap_err();
        match err {
            Error::UnknownEnumValue { attribute, value } => {
                assert_eq!(attribute, "WC");
                assert_eq!(value, "magenta");
            }
            other => panic!("expected UnknownEnumValue, got {other:?}"),
        }
    }

    #[test]
    fn unknown_attribute_key_is_a_schema_error() {
        let err = parse_attribute_sidecar(r#"{"v": {"1": {"WOBBLE": true}}}"#).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_VIOLATION");
    }

    #[test]
    fn non_boolean_flag_is_a_schema_error() {
        let err = parse_attribute_sidecar(r#"{"v": {"1": {"CAM": "yes"}}}"#).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_VIOLATION");
    }

    #[test]
    fn empty_object_map_is_an_empty_sidecar() {
        let sidecar = parse_attribute_sidecar("{}").unwrap();
        assert!(sidecar.is_empty());
    }

    #[test]
    fn broadcast_key_is_accepted() {
        let sidecar =
            parse_attribute_sidecar(r#"{"v": {"*": {"IC": true}, "3": {"MB": false}}}"#).unwrap();
        let video = &sidecar.videos["v"];
        assert!(video.broadcast().is_some());
        assert!(video.objects.contains_key(&3));
    }

    #[test]
    fn bad_object_key_is_a_schema_error() {
        let err = parse_attribute_sidecar(r#"{"v": {"zero": {"CAM": true}}}"#).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_VIOLATION");
        let err = parse_attribute_sidecar(r#"{"v": {"0": {"CAM": true}}}"#).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_VIOLATION");
    }

    #[test]
    fn scene_enum_with_spaces_parses() {
        let sidecar =
            parse_attribute_sidecar(r#"{"v": {"1": {"US": "fish tank", "WC": "light blue"}}}"#)
                .unwrap();
        let partial = &sidecar.videos["v"].objects[&1];
        assert_eq!(partial.scene, Some(SceneType::FishTank));
        assert_eq!(partial.water_color, Some(WaterColor::LightBlue));
    }
}
