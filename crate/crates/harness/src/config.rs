use std::path::Path;

use anyhow::{bail, Context, Result};
use landmark_core::{LandmarkConfig, ManifoldModel};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Settings for a single landmarking run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub manifold: ManifoldModel,
    pub landmark: LandmarkConfig,
    #[serde(default)]
    pub seed: u64,
}

/// Read a TOML or JSON file, chosen by extension (`.json` is JSON, anything
/// else TOML).
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text, path.extension().and_then(|e| e.to_str()) == Some("json"))
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn parse<T: DeserializeOwned>(text: &str, json: bool) -> Result<T> {
    if json {
        Ok(serde_json::from_str(text)?)
    } else {
        Ok(toml::from_str(text)?)
    }
}

impl RunConfig {
    /// Fail early on settings the run would reject.
    pub fn validate(&self) -> Result<()> {
        self.landmark.resolve(&self.manifold)?;
        if self.landmark.sigma == 0.0 && self.landmark.perturbation {
            bail!("perturbation needs sigma > 0");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t = r#"
            seed = 3
            [manifold]
            kind = "sphere"
            d = 2
            D = 64
            radii = [1.0]
            [landmark]
            sigma = 0.05
            stage1_batch = 10
        "#;
        let a: RunConfig = parse(t, false).unwrap();
        let b: RunConfig = parse(&serde_json::to_string(&a).unwrap(), true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.manifold.ambient_dim(), 64);
        assert_eq!(a.landmark.stage1_batch, Some(10));
        assert!(a.landmark.perturbation);
    }
}
