use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use brainsteer::experiment::Mode;
use brainsteer::RunConfig;
use clap::Args;

/// Config file plus per-field overrides. Precedence: flag, then environment
/// (output directory only), then file, then built-in defaults.
#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// TOML run configuration; see docs/formats.md.
    #[arg(long, short, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Set any field by dotted path, e.g. `fuzzy.e.gain=0.3`. Repeatable.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,

    #[arg(long, help_heading = "Run")]
    pub mode: Option<Mode>,
    /// Integration step, seconds.
    #[arg(long, help_heading = "Run")]
    pub dt: Option<f64>,
    /// Simulated-time cap, seconds.
    #[arg(long, help_heading = "Run")]
    pub max_time: Option<f64>,
    #[arg(long, help_heading = "Run")]
    pub seed: Option<u64>,

    #[arg(long, help_heading = "Track")]
    pub track_straight: Option<f64>,
    #[arg(long, help_heading = "Track")]
    pub track_arc: Option<f64>,
    #[arg(long, help_heading = "Track")]
    pub track_width: Option<f64>,

    #[arg(long, help_heading = "Vehicle")]
    pub wheelbase: Option<f64>,
    #[arg(long, help_heading = "Vehicle")]
    pub steering_ratio: Option<f64>,
    /// Degrees.
    #[arg(long, help_heading = "Vehicle")]
    pub max_wheel_angle: Option<f64>,
    /// Metres per second.
    #[arg(long, help_heading = "Vehicle")]
    pub speed: Option<f64>,
    /// Wheel-angle slew limit, degrees per second.
    #[arg(long, help_heading = "Vehicle")]
    pub steer_rate: Option<f64>,

    /// Deviation that prompts a command, metres; `inf` disables the driver.
    #[arg(long, help_heading = "Driver")]
    pub driver_threshold: Option<f64>,
    /// Steering-wheel change per command, degrees.
    #[arg(long, help_heading = "Driver")]
    pub command_step: Option<f64>,
    /// Minimum spacing of accepted commands, seconds.
    #[arg(long, help_heading = "Driver")]
    pub command_interval: Option<f64>,
    /// Decoding delay, seconds.
    #[arg(long, help_heading = "Driver")]
    pub command_delay: Option<f64>,
    /// Probability a command is decoded as the opposite direction.
    #[arg(long, help_heading = "Driver")]
    pub error_prob: Option<f64>,
    /// Look-ahead horizon, seconds.
    #[arg(long, help_heading = "Driver")]
    pub preview: Option<f64>,

    /// Arbiter switching deviation, metres.
    #[arg(long, help_heading = "Shared control")]
    pub shared_threshold: Option<f64>,
    /// Release fraction of the switching threshold.
    #[arg(long, help_heading = "Shared control")]
    pub hysteresis: Option<f64>,
    /// Weight on output change in the cost scheme.
    #[arg(long, help_heading = "Shared control")]
    pub smoothness: Option<f64>,

    /// Output-universe samples for centroid defuzzification (odd).
    #[arg(long, help_heading = "Fuzzy")]
    pub fuzzy_resolution: Option<usize>,
    /// Lookup-table nodes per axis.
    #[arg(long, help_heading = "Fuzzy")]
    pub lookup_size: Option<usize>,
    /// Deviation gain (saturation), metres.
    #[arg(long, help_heading = "Fuzzy")]
    pub e_gain: Option<f64>,
    /// Deviation-rate gain, metres per second.
    #[arg(long, help_heading = "Fuzzy")]
    pub de_gain: Option<f64>,
    /// Output gain, steering-wheel degrees.
    #[arg(long, help_heading = "Fuzzy")]
    pub u_gain: Option<f64>,

    /// Export directory.
    #[arg(long, env = "BRAINSTEER_OUT_DIR", help_heading = "Output")]
    pub out_dir: Option<PathBuf>,
    /// File stem for exports.
    #[arg(long, help_heading = "Output")]
    pub name: Option<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if !self.set.is_empty() {
            cfg = apply_sets(&cfg, &self.set)?;
        }
        macro_rules! put {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$($field).+ = v; })*
            };
        }
        put! {
            mode => mode, dt => dt, max_time => max_time, seed => seed,
            track_straight => track.straight, track_arc => track.arc, track_width => track.width,
            wheelbase => vehicle.wheelbase, steering_ratio => vehicle.steering_ratio,
            max_wheel_angle => vehicle.max_wheel_angle, speed => vehicle.speed, steer_rate => vehicle.steer_rate,
            driver_threshold => driver.threshold, command_step => driver.step, command_interval => driver.interval,
            command_delay => driver.delay, error_prob => driver.error_prob, preview => driver.preview,
            shared_threshold => shared.threshold, hysteresis => shared.hysteresis, smoothness => shared.smoothness,
            fuzzy_resolution => fuzzy.resolution, lookup_size => fuzzy.lookup_size,
            e_gain => fuzzy.e.gain, de_gain => fuzzy.de.gain, u_gain => fuzzy.u.gain,
            out_dir => output.dir, name => output.name,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Applies `path=value` assignments through the TOML form so every field,
/// including arrays, is reachable and type-checked by the same deserializer.
fn apply_sets(cfg: &RunConfig, sets: &[String]) -> Result<RunConfig> {
    let mut doc: toml::Table =
        toml::from_str(&cfg.to_toml_string()).context("re-reading configuration")?;
    for s in sets {
        let (path, raw) = s
            .split_once('=')
            .ok_or_else(|| anyhow!("--set {s:?}: expected PATH=VALUE"))?;
        let value = parse_value(raw.trim());
        let keys: Vec<&str> = path.trim().split('.').collect();
        let (last, parents) = keys.split_last().expect("split yields at least one key");
        let mut table = &mut doc;
        for k in parents {
            table = table
                .entry(k.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| anyhow!("--set {path}: {k} is not a table"))?;
        }
        if last.is_empty() {
            bail!("--set {s:?}: empty field name");
        }
        table.insert(last.to_string(), value);
    }
    let text = toml::to_string(&doc).context("serializing configuration")?;
    RunConfig::from_toml_str(&text).map_err(|e| anyhow!("--set: {e}"))
}

/// TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
