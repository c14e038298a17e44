use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Mode, RunConfig};
use super::metrics::{compute_metrics, RunMetrics};
use super::schedule::Schedule;
use super::ExperimentError;
use crate::bci::{self, BrainCommand, BrainState, Direction, Rejection};
use crate::fuzzy::LookupTable;
use crate::shared::{self, ArbiterState, SharedConfig, Source};
use crate::track::{deviation_rate, TrackPose};
use crate::vehicle::VehicleState;

/// Distance beyond the road edge (m) at which a run is abandoned.
pub const OFF_ROAD_MARGIN: f64 = 2.0;

/// One row of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub e: f64,
    pub de: f64,
    pub u_brain: f64,
    pub u_fuzzy: f64,
    pub u_out: f64,
    pub source: Source,
    /// Unwrapped centerline progress, meters.
    pub progress: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    LapCompleted,
    OffRoad,
    TimeLimit,
}

/// Where brain commands come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DriverSource {
    /// The simulated driver decides every step.
    Model,
    /// Recorded commands requested at their step.
    Scripted(Schedule),
    /// Commands arrive through [`Simulation::request`].
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub samples: Vec<Sample>,
    /// Delivered brain commands in delivery order.
    pub commands: Vec<BrainCommand>,
    pub metrics: RunMetrics,
    pub outcome: Outcome,
}

/// The closed loop, advanced one step at a time. Batch runs and interactive
/// sessions both drive this type.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: RunConfig,
    shared: SharedConfig,
    lookup: Arc<LookupTable>,
    driver: DriverSource,
    vehicle: VehicleState,
    brain: BrainState,
    arbiter: ArbiterState,
    rng: ChaCha8Rng,
    step: usize,
    prev_e: Option<f64>,
    prev_s: f64,
    progress: f64,
    last_out: (f64, Source),
    samples: Vec<Sample>,
    outcome: Option<Outcome>,
    rejected_script: usize,
}

/// Builds the lookup grid a config describes.
pub fn build_lookup(cfg: &RunConfig) -> Result<LookupTable, ExperimentError> {
    let c = cfg.fuzzy.build().map_err(|e| ExperimentError::Config {
        field: "fuzzy".into(),
        reason: e.to_string(),
    })?;
    LookupTable::build(&c, cfg.fuzzy.lookup_size).map_err(|e| ExperimentError::Config {
        field: "fuzzy.lookup_size".into(),
        reason: e.to_string(),
    })
}

impl Simulation {
    pub fn new(cfg: RunConfig, driver: DriverSource) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        let lookup = Arc::new(build_lookup(&cfg)?);
        Self::with_lookup(cfg, driver, lookup)
    }

    /// Reuses a prebuilt grid; it must come from `cfg.fuzzy`.
    pub fn with_lookup(
        cfg: RunConfig,
        driver: DriverSource,
        lookup: Arc<LookupTable>,
    ) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        let start = cfg.track.project(0.0, 0.0)?;
        Ok(Simulation {
            shared: cfg.shared_config(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            lookup,
            driver,
            vehicle: VehicleState::default(),
            brain: BrainState::default(),
            arbiter: ArbiterState::default(),
            step: 0,
            prev_e: None,
            prev_s: start.s,
            progress: 0.0,
            last_out: (0.0, Source::Brain),
            samples: Vec::new(),
            outcome: None,
            rejected_script: 0,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn lookup(&self) -> &Arc<LookupTable> {
        &self.lookup
    }

    /// Index of the next observation.
    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Simulated time of the next observation.
    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn is_finished(&self) -> bool {
        self.outcome.is_some()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn brain(&self) -> &BrainState {
        &self.brain
    }

    pub fn arbiter(&self) -> &ArbiterState {
        &self.arbiter
    }

    pub fn vehicle(&self) -> &VehicleState {
        &self.vehicle
    }

    /// Scripted commands refused by the rate limit during replay.
    pub fn rejected_script_commands(&self) -> usize {
        self.rejected_script
    }

    /// Requests a command at the current simulated time, ahead of the next step.
    pub fn request(&mut self, dir: Direction) -> Result<BrainCommand, Rejection> {
        let t = self.time();
        self.brain
            .request(dir.sign(), t, &self.cfg.driver, &mut self.rng)
    }

    /// Observes, decides and (unless the run ends here) moves the vehicle by one step.
    pub fn advance(&mut self) -> Result<Sample, ExperimentError> {
        if let Some(outcome) = self.outcome {
            return Err(ExperimentError::Finished(outcome));
        }
        let dt = self.cfg.dt;
        let t = self.time();
        let track = self.cfg.track;
        let pose = track.project(self.vehicle.x, self.vehicle.y)?;
        let de = match self.prev_e {
            Some(prev) => deviation_rate(&TrackPose { e: prev, ..pose }, &pose, dt),
            None => 0.0,
        };
        self.prev_e = Some(pose.e);
        self.progress += track.progress_delta(self.prev_s, pose.s);
        self.prev_s = pose.s;

        let outcome = if self.progress >= track.total_length() {
            Some(Outcome::LapCompleted)
        } else if pose.e.abs() > track.half_width() + OFF_ROAD_MARGIN {
            Some(Outcome::OffRoad)
        } else if t >= self.cfg.max_time - 1e-9 {
            Some(Outcome::TimeLimit)
        } else {
            None
        };
        // The assist acts on the tracking error, the negated deviation.
        let u_fuzzy = self.lookup.eval(-pose.e, -de);
        if let Some(outcome) = outcome {
            // No control decisions on the final observation.
            let (u_out, source) = self.last_out;
            let row = self.row(t, pose.e, de, u_fuzzy, u_out, source);
            self.outcome = Some(outcome);
            return Ok(row);
        }

        self.drive(pose.e, t);
        let u_brain = self.brain.deliver(t);
        let (u_out, source) = match self.cfg.mode {
            Mode::BrainOnly => (u_brain, Source::Brain),
            _ => shared::arbitrate(u_brain, u_fuzzy, pose.e, &self.shared, &mut self.arbiter),
        };
        self.last_out = (u_out, source);
        let row = self.row(t, pose.e, de, u_fuzzy, u_out, source);
        self.vehicle = self.vehicle.step(&self.cfg.vehicle, u_out, dt)?;
        self.step += 1;
        Ok(row)
    }

    fn drive(&mut self, e: f64, t: f64) {
        match &self.driver {
            DriverSource::Model => {
                let m = self.cfg.driver;
                let (track, vehicle, params) = (&self.cfg.track, &self.vehicle, &self.cfg.vehicle);
                let predict = |u: f64| {
                    (m.preview > 0.0)
                        .then(|| bci::preview_deviation(track, vehicle, params, u, m.preview))
                        .flatten()
                };
                bci::decide(e, predict, t, &m, &mut self.brain, &mut self.rng);
            }
            DriverSource::Scripted(schedule) => {
                let dirs: Vec<Direction> = schedule.at(self.step).map(|c| c.command).collect();
                for d in dirs {
                    if self
                        .brain
                        .request(d.sign(), t, &self.cfg.driver, &mut self.rng)
                        .is_err()
                    {
                        self.rejected_script += 1;
                    }
                }
            }
            DriverSource::External => {}
        }
    }

    fn row(&mut self, t: f64, e: f64, de: f64, u_fuzzy: f64, u_out: f64, source: Source) -> Sample {
        let v = self.vehicle;
        let s = Sample {
            t,
            x: v.x,
            y: v.y,
            psi: v.psi,
            e,
            de,
            u_brain: self.brain.u_brain,
            u_fuzzy,
            u_out,
            source,
            progress: self.progress,
        };
        self.samples.push(s);
        s
    }

    /// Steps until the run ends.
    pub fn run_to_end(&mut self) -> Result<(), ExperimentError> {
        while !self.is_finished() {
            self.advance()?;
        }
        Ok(())
    }

    pub fn metrics(&self) -> RunMetrics {
        compute_metrics(&self.samples, self.brain.regulations, &self.cfg)
    }

    pub fn into_result(self) -> RunResult {
        let metrics = self.metrics();
        RunResult {
            samples: self.samples,
            commands: self.brain.delivered,
            metrics,
            outcome: self.outcome.unwrap_or(Outcome::TimeLimit),
        }
    }
}

/// Runs one scenario with the simulated driver.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunResult, ExperimentError> {
    run_with_driver(cfg, DriverSource::Model)
}

pub fn run_with_driver(
    cfg: &RunConfig,
    driver: DriverSource,
) -> Result<RunResult, ExperimentError> {
    let mut sim = Simulation::new(cfg.clone(), driver)?;
    sim.run_to_end()?;
    Ok(sim.into_result())
}
