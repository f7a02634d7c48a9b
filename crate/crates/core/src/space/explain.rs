use std::collections::BTreeMap;

use serde::Serialize;

use super::*;

/// Natural-language explanation per Boolean constraint id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExplanationMap(pub BTreeMap<String, String>);

impl ExplanationMap {
    /// Text for a constraint; instances of a structure-scoped behavior fall
    /// back to the text given for the behavior itself.
    pub fn get(&self, constraint_id: &str) -> Option<&str> {
        self.0
            .get(constraint_id)
            .or_else(|| self.0.get(base_constraint_id(constraint_id)))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExplanationError {
    #[error("explanations must be a JSON object of strings: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// Parses an explanation sidecar. Keys that name no Boolean constraint are
/// dropped and reported in the returned warning list.
pub fn load_explanations(
    space: &ConfigurationSpace,
    sidecar: &str,
) -> Result<(ExplanationMap, Vec<String>), ExplanationError> {
    let raw: BTreeMap<String, String> = serde_json::from_str(sidecar)?;
    let known: Vec<String> = space.boolean_constraint_ids();
    let mut map = BTreeMap::new();
    let mut warnings = Vec::new();
    for (key, text) in raw {
        if known.iter().any(|id| id == &key || base_constraint_id(id) == key) {
            map.insert(key, text);
        } else {
            warnings.push(format!("explanation for unknown constraint `{key}` ignored"));
        }
    }
    Ok((ExplanationMap(map), warnings))
}
