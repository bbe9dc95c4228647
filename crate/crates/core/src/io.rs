//! JSON instance files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{knapsack_to_bipartite, BipartiteInstance, KnapsackInstance};

/// One instance per file, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Bipartite(BipartiteInstance),
    Knapsack(KnapsackInstance),
}

impl Instance {
    /// Knapsack instances go through the item-to-vertex mapping.
    pub fn to_bipartite(&self) -> BipartiteInstance {
        match self {
            Instance::Bipartite(b) => b.clone(),
            Instance::Knapsack(k) => knapsack_to_bipartite(k),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Bipartite(_) => "bipartite",
            Instance::Knapsack(_) => "knapsack",
        }
    }
}

impl From<BipartiteInstance> for Instance {
    fn from(b: BipartiteInstance) -> Self {
        Instance::Bipartite(b)
    }
}

impl From<KnapsackInstance> for Instance {
    fn from(k: KnapsackInstance) -> Self {
        Instance::Knapsack(k)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(Error::from)
}

/// Pretty-printed, newline-terminated.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    read_json(path)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    write_json(path, inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_round_trip_keeps_field_order() {
        let text = r#"{"kind":"bipartite","budget":10.0,"lefts":[{"id":0,"bid":2.5}],"right_count":2,"edges":[{"left":0,"right":1,"value":7.0}]}"#;
        let inst: Instance = serde_json::from_str(text).unwrap();
        assert_eq!(inst.kind(), "bipartite");
        assert_eq!(serde_json::to_string(&inst).unwrap(), text);
        let b = inst.to_bipartite();
        assert_eq!(b.find_edge(0, 1).unwrap().value, 7.0);
    }

    #[test]
    fn knapsack_round_trip() {
        let text = r#"{"kind":"knapsack","capacity":10.0,"items":[{"id":0,"value":1.0,"weight":1.0},{"id":1,"value":9.0,"weight":10.0}]}"#;
        let inst: Instance = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&inst).unwrap(), text);
        assert_eq!(inst.to_bipartite().edges().len(), 4);
    }

    #[test]
    fn invalid_instances_are_rejected_on_read() {
        let dangling = r#"{"kind":"bipartite","budget":1.0,"lefts":[{"id":0,"bid":1.0}],"right_count":1,"edges":[{"left":0,"right":4,"value":1.0}]}"#;
        assert!(serde_json::from_str::<Instance>(dangling).is_err());
        let heavy = r#"{"kind":"knapsack","capacity":1.0,"items":[{"id":0,"value":1.0,"weight":2.0}]}"#;
        assert!(serde_json::from_str::<Instance>(heavy).is_err());
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_instance(Path::new("/nonexistent/x.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.json"));
    }
}
