use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vpsdata::{VOID_CATEGORY, VOID_SEGMENT};

/// A single label of the vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: u32,
    pub name: String,
    pub is_thing: bool,
}

/// On-disk shape of one entry in a categories file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryRecord {
    id: u32,
    name: String,
    isthing: u8,
}

/// Ordered registry of categories with their thing/stuff flag.
///
/// Ids are unique, strictly increasing, and never collide with the void
/// sentinels (`0` for panoptic segment ids, `255` for semantic labels).
/// Because semantic frames store one byte per pixel, valid ids are `1..=254`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySet {
    entries: Vec<Category>,
}

impl CategorySet {
    pub fn new(entries: Vec<Category>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut prev: Option<u32> = None;
        for c in &entries {
            if c.id == VOID_SEGMENT || c.id == u32::from(VOID_CATEGORY) {
                return Err(Error::Schema(format!(
                    "category id {} collides with a reserved void sentinel",
                    c.id
                )));
            }
            if c.id > 254 {
                return Err(Error::Schema(format!(
                    "category id {} does not fit an 8-bit semantic label",
                    c.id
                )));
            }
            if !seen.insert(c.id) {
                return Err(Error::Schema(format!("duplicate category id {}", c.id)));
            }
            if let Some(p) = prev {
                if c.id < p {
                    return Err(Error::Schema(format!(
                        "category ids must be listed in increasing order ({} after {})",
                        c.id, p
                    )));
                }
            }
            prev = Some(c.id);
        }
        Ok(Self { entries })
    }

    /// Reads a categories file: a JSON list of `{"id", "name", "isthing"}` objects.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<CategoryRecord> =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let entries = records
            .into_iter()
            .map(|r| {
                let is_thing = match r.isthing {
                    0 => false,
                    1 => true,
                    other => {
                        return Err(Error::Schema(format!(
                            "isthing must be 0 or 1, got {other} for id {}",
                            r.id
                        )))
                    }
                };
                Ok(Category {
                    id: r.id,
                    name: r.name,
                    is_thing,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn to_json(&self) -> String {
        let records: Vec<CategoryRecord> = self
            .entries
            .iter()
            .map(|c| CategoryRecord {
                id: c.id,
                name: c.name.clone(),
                isthing: u8::from(c.is_thing),
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&records).expect("categories serialize");
        out.push('\n');
        out
    }

    pub fn entries(&self) -> &[Category] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Category> {
        self.entries
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn contains(&self, id: u32) -> bool {
        self.get(id).is_some()
    }

    pub fn is_thing(&self, id: u32) -> Option<bool> {
        self.get(id).map(|c| c.is_thing)
    }

    pub fn thing_count(&self) -> usize {
        self.entries.iter().filter(|c| c.is_thing).count()
    }

    pub fn stuff_count(&self) -> usize {
        self.entries.len() - self.thing_count()
    }

    pub fn thing_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().filter(|c| c.is_thing).map(|c| c.id)
    }

    pub fn stuff_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().filter(|c| !c.is_thing).map(|c| c.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_single_stuff_entry() {
        let set = CategorySet::from_json(r#"[{"id": 1, "name": "wall", "isthing": 0}]"#).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.thing_count(), 0);
        assert_eq!(set.stuff_count(), 1);
    }

    #[test]
    fn duplicate_id_is_schema_error() {
        let err = CategorySet::from_json(
            r#"[{"id": 7, "name": "a", "isthing": 0}, {"id": 7, "name": "b", "isthing": 1}]"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn reserved_ids_rejected() {
        for id in [0, 255] {
            let text = format!(r#"[{{"id": {id}, "name": "x", "isthing": 0}}]"#);
            assert!(matches!(
                CategorySet::from_json(&text),
                Err(Error::Schema(_))
            ));
        }
    }

    #[test]
    fn unknown_and_missing_fields_rejected() {
        let unknown = r#"[{"id": 3, "name": "x", "isthing": 0, "color": [1,2,3]}]"#;
        assert!(matches!(
            CategorySet::from_json(unknown),
            Err(Error::Schema(_))
        ));
        let missing = r#"[{"id": 3, "isthing": 0}]"#;
        assert!(matches!(
            CategorySet::from_json(missing),
            Err(Error::Schema(_))
        ));
        let bad_flag = r#"[{"id": 3, "name": "x", "isthing": 2}]"#;
        assert!(matches!(
            CategorySet::from_json(bad_flag),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn unordered_ids_rejected() {
        let text =
            r#"[{"id": 4, "name": "a", "isthing": 0}, {"id": 2, "name": "b", "isthing": 0}]"#;
        assert!(matches!(
            CategorySet::from_json(text),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text =
            r#"[{"id": 1, "name": "wall", "isthing": 0}, {"id": 9, "name": "cat", "isthing": 1}]"#;
        let set = CategorySet::from_json(text).unwrap();
        assert_eq!(CategorySet::from_json(&set.to_json()).unwrap(), set);
        assert_eq!(set.is_thing(9), Some(true));
        assert_eq!(set.is_thing(2), None);
    }
}
