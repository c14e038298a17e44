use std::path::Path;

use serde::{Deserialize, Serialize};

use super::controller::{MamdaniController, DEFAULT_RESOLUTION};
use super::rules::RuleTable;
use super::variable::{FuzzyVariable, ShapeKind, DEFAULT_CENTERS, MIXED_SHAPES, SMOOTH_SHAPES};
use super::FuzzyError;

/// Layout of one variable in the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableConfig {
    pub gain: f64,
    #[serde(default = "default_centers")]
    pub centers: [f64; 7],
    pub shapes: [ShapeKind; 7],
}

fn default_centers() -> [f64; 7] {
    DEFAULT_CENTERS
}

/// Plain-text controller description; see `docs/formats.md` for the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzyConfig {
    pub resolution: usize,
    pub lookup_size: usize,
    /// Seven rows (deviation NB..PB) of seven output labels (rate NB..PB).
    pub rules: Vec<String>,
    pub e: VariableConfig,
    pub de: VariableConfig,
    pub u: VariableConfig,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        FuzzyConfig {
            resolution: DEFAULT_RESOLUTION,
            lookup_size: super::DEFAULT_LOOKUP_SIZE,
            rules: RuleTable::default().to_rows(),
            e: VariableConfig {
                gain: 0.2,
                centers: DEFAULT_CENTERS,
                shapes: MIXED_SHAPES,
            },
            de: VariableConfig {
                gain: 0.5,
                centers: DEFAULT_CENTERS,
                shapes: SMOOTH_SHAPES,
            },
            u: VariableConfig {
                gain: 180.0,
                centers: DEFAULT_CENTERS,
                shapes: MIXED_SHAPES,
            },
        }
    }
}

impl FuzzyConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, FuzzyError> {
        toml::from_str(s).map_err(|e| FuzzyError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, FuzzyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FuzzyError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("fuzzy config serializes")
    }

    pub fn build(&self) -> Result<MamdaniController, FuzzyError> {
        let var = |name: &str, v: &VariableConfig| {
            FuzzyVariable::from_layout(name, v.gain, v.centers, v.shapes)
        };
        MamdaniController::new(
            var("e", &self.e)?,
            var("de", &self.de)?,
            var("u", &self.u)?,
            RuleTable::parse_rows(&self.rules)?,
            self.resolution,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = FuzzyConfig::default();
        let text = cfg.to_toml_string();
        assert_eq!(FuzzyConfig::from_toml_str(&text).unwrap(), cfg);
        cfg.build().unwrap();
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = FuzzyConfig::from_toml_str(
            "resolution = 101\n[u]\ngain = 90.0\nshapes = ['shoulder','gaussian','gaussian','gaussian','gaussian','gaussian','shoulder']\n",
        )
        .unwrap();
        assert_eq!(cfg.resolution, 101);
        assert_eq!(cfg.u.gain, 90.0);
        assert_eq!(cfg.e, FuzzyConfig::default().e);
        let c = cfg.build().unwrap();
        assert_eq!(c.u_max(), 90.0);
    }

    #[test]
    fn bad_label_and_unknown_key_are_errors() {
        let mut cfg = FuzzyConfig::default();
        cfg.rules[0] = "NB NB NM NM NS NS XX".into();
        assert_eq!(
            cfg.build().unwrap_err(),
            FuzzyError::UnknownLabel("XX".into())
        );
        assert!(FuzzyConfig::from_toml_str("bogus = 1").is_err());
    }
}
