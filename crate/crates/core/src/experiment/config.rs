use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::bci::DriverModel;
use crate::fuzzy::FuzzyConfig;
use crate::shared::{Scheme, SharedConfig};
use crate::track::StadiumTrack;
use crate::vehicle::VehicleParams;

/// Which command reaches the plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The brain setpoint drives the plant directly.
    BrainOnly,
    SharedThreshold,
    SharedCost,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::BrainOnly, Mode::SharedThreshold, Mode::SharedCost];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::BrainOnly => "brain-only",
            Mode::SharedThreshold => "shared-threshold",
            Mode::SharedCost => "shared-cost",
        }
    }

    pub fn scheme(self) -> Option<Scheme> {
        match self {
            Mode::BrainOnly => None,
            Mode::SharedThreshold => Some(Scheme::Threshold),
            Mode::SharedCost => Some(Scheme::Cost),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ExperimentError::Config {
                field: "mode".into(),
                reason: format!(
                    "unknown mode {s:?}; expected brain-only, shared-threshold or shared-cost"
                ),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem shared by every export of a run.
    pub name: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            name: "run".into(),
        }
    }
}

/// Everything that determines a run. Loaded from TOML; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Step, seconds.
    pub dt: f64,
    /// Simulated-time cap, seconds.
    pub max_time: f64,
    pub seed: u64,
    pub track: StadiumTrack,
    pub vehicle: VehicleParams,
    pub driver: DriverModel,
    /// The scheme is taken from `mode`.
    pub shared: SharedConfig,
    pub fuzzy: FuzzyConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::SharedThreshold,
            dt: 0.01,
            max_time: 120.0,
            seed: 0,
            track: StadiumTrack::default(),
            vehicle: VehicleParams::default(),
            driver: DriverModel::default(),
            shared: SharedConfig::default(),
            fuzzy: FuzzyConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn with_mode(mode: Mode) -> Self {
        RunConfig {
            mode,
            ..Default::default()
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ExperimentError> {
        toml::from_str(s).map_err(|e| ExperimentError::Config {
            field: "file".into(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ExperimentError::Config { reason, .. } => ExperimentError::Config {
                field: path.display().to_string(),
                reason,
            },
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Shared-control parameters with the scheme implied by `mode`.
    pub fn shared_config(&self) -> SharedConfig {
        SharedConfig {
            scheme: self.mode.scheme().unwrap_or(Scheme::Threshold),
            ..self.shared
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let cfg = |field: &str, reason: String| ExperimentError::Config {
            field: field.into(),
            reason,
        };
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(cfg("dt", format!("must lie in (0, 0.1], got {}", self.dt)));
        }
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return Err(cfg(
                "max_time",
                format!("must be positive, got {}", self.max_time),
            ));
        }
        self.track.validate().map_err(|e| match e {
            crate::track::TrackError::InvalidParams { field, reason } => {
                cfg(&format!("track.{field}"), reason)
            }
            other => cfg("track", other.to_string()),
        })?;
        self.vehicle.validate().map_err(|e| match e {
            crate::vehicle::VehicleError::InvalidParams { field, reason } => {
                cfg(&format!("vehicle.{field}"), reason)
            }
            other => cfg("vehicle", other.to_string()),
        })?;
        self.driver
            .validate()
            .map_err(|e| cfg(&format!("driver.{}", e.field), e.reason))?;
        self.shared
            .validate()
            .map_err(|e| cfg(&format!("shared.{}", e.field), e.reason))?;
        self.fuzzy
            .build()
            .map_err(|e| cfg("fuzzy", e.to_string()))?;
        if self.fuzzy.lookup_size < 2 {
            return Err(cfg("fuzzy.lookup_size", "must be at least 2".into()));
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(cfg(
                "output.name",
                "must be a plain non-empty file stem".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(RunConfig::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }

    #[test]
    fn partial_file() {
        let c = RunConfig::from_toml_str("mode = 'brain-only'\nseed = 4\n[driver]\nstep = 60.0\n")
            .unwrap();
        assert_eq!(c.mode, Mode::BrainOnly);
        assert_eq!(c.seed, 4);
        assert_eq!(c.driver.step, 60.0);
        assert_eq!(c.driver.threshold, DriverModel::default().threshold);
    }

    #[test]
    fn errors_carry_field_names() {
        let field = |c: RunConfig| match c.validate() {
            Err(ExperimentError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(
            field(RunConfig {
                dt: 0.5,
                ..Default::default()
            }),
            "dt"
        );
        let mut c = RunConfig::default();
        c.vehicle.speed = -1.0;
        assert_eq!(field(c), "vehicle.speed");
        let mut c = RunConfig::default();
        c.driver.delay = -1.0;
        assert_eq!(field(c), "driver.delay");
        let mut c = RunConfig::default();
        c.track.width = 200.0;
        assert_eq!(field(c), "track.width");
        assert!(RunConfig::from_toml_str("nonsense = 1").is_err());
    }

    #[test]
    fn mode_parsing() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("fuzzy-only".parse::<Mode>().is_err());
        assert_eq!(
            RunConfig::with_mode(Mode::SharedCost)
                .shared_config()
                .scheme,
            Scheme::Cost
        );
    }
}
