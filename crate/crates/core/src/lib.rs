//! Shared-control lane keeping for a simulated brain-controlled vehicle.
//!
//! A driver model issues slow, discrete steering-wheel setpoint changes; a
//! Mamdani fuzzy controller supplies corrective steering; an arbiter decides
//! what reaches a kinematic bicycle plant driving a stadium-shaped road.

pub mod bci;
pub mod experiment;
pub mod fuzzy;
pub mod session;
pub mod shared;
pub mod track;
pub mod vehicle;

pub use bci::{BrainCommand, BrainState, Direction, DriverModel};
pub use experiment::{Mode, RunConfig, RunMetrics, RunResult, Sample, Simulation};
pub use fuzzy::{LookupTable, MamdaniController};
pub use shared::{ArbiterState, Scheme, SharedConfig, Source};
pub use track::{StadiumTrack, TrackPose};
pub use vehicle::{VehicleParams, VehicleState};
