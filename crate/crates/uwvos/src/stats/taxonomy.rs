//! Class-to-superclass mapping supplied alongside the dataset.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// The thirteen dataset superclasses: eleven biological groups plus
/// artifacts and natural objects.
pub const SUPERCLASSES: [&str; 13] = [
    "fish",
    "reptiles",
    "mammals",
    "persons",
    "molluscs",
    "crustaceans",
    "coelenterates",
    "chordates",
    "amphibians",
    "birds",
    "arthropods",
    "artifacts",
    "natural objects",
];

/// Mapping from class name to superclass, loaded from a JSON object
/// `{"<class>": "<superclass>"}`.
#[derive(Debug, Clone, Default)]
pub struct Taxonomy {
    map: BTreeMap<String, String>,
}

impl Taxonomy {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map: BTreeMap<String, String> = serde_json::from_str(text)?;
        for superclass in map.values() {
            if !SUPERCLASSES.contains(&superclass.as_str()) {
                return Err(Error::UnknownSuperclass(superclass.clone()));
            }
        }
        Ok(Self { map })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (class, superclass) in pairs {
            if !SUPERCLASSES.contains(&superclass) {
                return Err(Error::UnknownSuperclass(superclass.to_string()));
            }
            map.insert(class.to_string(), superclass.to_string());
        }
        Ok(Self { map })
    }

    pub fn superclass_of(&self, class: &str) -> Result<&str> {
        self.map
            .get(class)
            .map(String::as_str)
            .ok_or_else(|| Error::UnmappedCategory(class.to_string()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_lookup() {
        let taxonomy = Taxonomy::parse(r#"{"goldfish": "fish", "crab": "crustaceans"}"#).unwrap();
        assert_eq!(taxonomy.superclass_of("goldfish").unwrap(), "fish");
        assert!(matches!(
            taxonomy.superclass_of("kraken"),
            Err(Error::UnmappedCategory(_))
        ));
    }

    #[test]
    fn unknown_superclass_is_rejected() {
        assert!(matches!(
            Taxonomy::parse(r#"{"goldfish": "fishes"}"#),
            Err(Error::UnknownSuperclass(_))
        ));
    }
}
