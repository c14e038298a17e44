use std::path::Path;

use serde::{Deserialize, Serialize};

use super::export::write_atomic;
use super::ExperimentError;
use crate::bci::Direction;

/// A command requested immediately before the observation at `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCommand {
    pub step: usize,
    /// `step * dt`, informational; replay keys on `step`.
    pub t: f64,
    pub command: Direction,
}

/// Command stream recorded from an interactive session, replayable in batch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    pub commands: Vec<ScheduledCommand>,
}

impl Schedule {
    pub fn push(&mut self, c: ScheduledCommand) {
        debug_assert!(self.commands.last().is_none_or(|l| l.step <= c.step));
        self.commands.push(c);
    }

    /// Commands due at `step`, in recorded order.
    pub fn at(&self, step: usize) -> impl Iterator<Item = &ScheduledCommand> {
        let start = self.commands.partition_point(|c| c.step < step);
        self.commands[start..]
            .iter()
            .take_while(move |c| c.step == step)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, ExperimentError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["step", "t", "command"])
            .map_err(ExperimentError::Csv)?;
        for c in &self.commands {
            w.write_record([
                c.step.to_string(),
                c.t.to_string(),
                c.command.as_str().to_string(),
            ])
            .map_err(ExperimentError::Csv)?;
        }
        w.into_inner()
            .map_err(|e| ExperimentError::Csv(e.into_error().into()))
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, ExperimentError> {
        let mut r = csv::Reader::from_reader(bytes);
        let mut commands: Vec<ScheduledCommand> = Vec::new();
        for row in r.deserialize() {
            let c: ScheduledCommand = row.map_err(ExperimentError::Csv)?;
            if commands.last().is_some_and(|l| l.step > c.step) {
                return Err(ExperimentError::Config {
                    field: "schedule".into(),
                    reason: format!(
                        "steps must be nondecreasing (step {} after {})",
                        c.step,
                        commands.last().unwrap().step
                    ),
                });
            }
            commands.push(c);
        }
        Ok(Schedule { commands })
    }

    pub fn save(&self, path: &Path) -> Result<(), ExperimentError> {
        write_atomic(path, &self.to_csv()?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let bytes = std::fs::read(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv(&bytes)
    }
}
