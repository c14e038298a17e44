//! Simulated brain-control driver: discrete steering-wheel setpoint changes
//! issued through a channel with a minimum interval, a recognition delay and
//! a misrecognition probability.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::track::StadiumTrack;
use crate::vehicle::{VehicleParams, VehicleState};

/// Brain setpoint bound, steering-wheel degrees.
pub const SETPOINT_LIMIT: f64 = 180.0;

/// Slack on time comparisons so `k * dt` arithmetic does not miss a boundary.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriverModel {
    /// Deviation magnitude (m) at which the driver acts.
    pub threshold: f64,
    /// Setpoint change per command, steering-wheel degrees.
    pub step: f64,
    /// Minimum time between issued commands, seconds.
    pub interval: f64,
    /// Recognition delay between issue and effect, seconds.
    pub delay: f64,
    /// Probability that a command is recognized with the wrong sign.
    pub error_prob: f64,
    /// Look-ahead used to judge the deviation, seconds; 0 reacts to the
    /// current deviation only.
    pub preview: f64,
}

impl Default for DriverModel {
    fn default() -> Self {
        DriverModel {
            threshold: 1.0,
            step: 75.0,
            interval: 1.0,
            delay: 0.5,
            error_prob: 0.0,
            preview: 3.0,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid driver parameter {field}: {reason}")]
pub struct DriverError {
    pub field: &'static str,
    pub reason: String,
}

impl DriverModel {
    pub fn validate(&self) -> Result<(), DriverError> {
        let bad = |field, reason: &str| {
            Err(DriverError {
                field,
                reason: reason.into(),
            })
        };
        // NaN fails every comparison below; an infinite threshold disables the driver.
        if !(self.threshold > 0.0) {
            return bad("threshold", "must be positive");
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step", "must be positive and finite");
        }
        if !(self.interval > 0.0 && self.interval.is_finite()) {
            return bad("interval", "must be positive and finite");
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return bad("delay", "must be non-negative and finite");
        }
        if !(0.0..=1.0).contains(&self.error_prob) {
            return bad("error_prob", "must lie in [0, 1]");
        }
        if !(self.preview >= 0.0 && self.preview.is_finite()) {
            return bad("preview", "must be non-negative and finite");
        }
        Ok(())
    }
}

/// Steering direction of a discrete command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    /// Sign of the setpoint change; positive steers left.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Left => 1.0,
            Direction::Right => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrainCommand {
    pub issued: f64,
    pub delivery: f64,
    /// Signed setpoint change after recognition, degrees.
    pub delta: f64,
}

/// Why a command request was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    RateLimited,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BrainState {
    /// Held steering-wheel setpoint, degrees.
    pub u_brain: f64,
    pub pending: VecDeque<BrainCommand>,
    pub last_issue: Option<f64>,
    /// Commands delivered so far; equals `delivered.len()`.
    pub regulations: usize,
    pub delivered: Vec<BrainCommand>,
}

impl BrainState {
    /// Setpoint once every pending command has landed.
    pub fn committed_setpoint(&self) -> f64 {
        self.pending.iter().fold(self.u_brain, |u, c| {
            (u + c.delta).clamp(-SETPOINT_LIMIT, SETPOINT_LIMIT)
        })
    }

    /// True if a command issued at `t` respects the minimum interval.
    pub fn can_issue(&self, t: f64, m: &DriverModel) -> bool {
        self.last_issue
            .is_none_or(|last| t - last >= m.interval - TIME_EPS)
    }

    /// Issues a command steering toward `direction` (+1 left, -1 right).
    ///
    /// One uniform draw is consumed per accepted command whatever `error_prob`
    /// is, so runs that differ only in `error_prob` stay aligned.
    pub fn request<R: Rng + ?Sized>(
        &mut self,
        direction: f64,
        t: f64,
        m: &DriverModel,
        rng: &mut R,
    ) -> Result<BrainCommand, Rejection> {
        if !self.can_issue(t, m) {
            return Err(Rejection::RateLimited);
        }
        let flip = rng.gen::<f64>() < m.error_prob;
        let sign = if flip {
            -direction.signum()
        } else {
            direction.signum()
        };
        let cmd = BrainCommand {
            issued: t,
            delivery: t + m.delay,
            delta: sign * m.step,
        };
        self.pending.push_back(cmd);
        self.last_issue = Some(t);
        Ok(cmd)
    }

    /// Applies every pending command due by `t`, in issue order.
    pub fn deliver(&mut self, t: f64) -> f64 {
        while let Some(c) = self.pending.front().copied() {
            if c.delivery > t + TIME_EPS {
                break;
            }
            self.pending.pop_front();
            self.u_brain = (self.u_brain + c.delta).clamp(-SETPOINT_LIMIT, SETPOINT_LIMIT);
            self.regulations += 1;
            self.delivered.push(c);
        }
        self.u_brain
    }
}

/// Threshold driver. `e` is the measured deviation; `predict(setpoint)`
/// returns the deviation the driver expects if that setpoint were held, or
/// `None` when the driver has no look-ahead.
///
/// The driver judges the deviation expected under its committed setpoint and,
/// when look-ahead is available, only issues a correction that it expects to
/// reduce that deviation.
pub fn decide<R: Rng + ?Sized>(
    e: f64,
    predict: impl Fn(f64) -> Option<f64>,
    t: f64,
    m: &DriverModel,
    st: &mut BrainState,
    rng: &mut R,
) -> Option<BrainCommand> {
    let committed = st.committed_setpoint();
    let judged = predict(committed).unwrap_or(e);
    if judged.abs() < m.threshold || !st.can_issue(t, m) {
        return None;
    }
    let direction = -judged.signum();
    let corrected = (committed + direction * m.step).clamp(-SETPOINT_LIMIT, SETPOINT_LIMIT);
    if let Some(after) = predict(corrected) {
        if after.abs() >= judged.abs() {
            return None;
        }
    }
    st.request(direction, t, m, rng).ok()
}

/// Deviation after driving `horizon` seconds on the arc that `setpoint`
/// would settle to, starting from the current pose.
pub fn preview_deviation(
    track: &StadiumTrack,
    state: &VehicleState,
    params: &VehicleParams,
    setpoint: f64,
    horizon: f64,
) -> Option<f64> {
    let k = params.curvature_for(setpoint);
    let d = params.speed * horizon;
    let (x, y) = if k.abs() < 1e-12 {
        (state.x + d * state.psi.cos(), state.y + d * state.psi.sin())
    } else {
        (
            state.x + ((state.psi + k * d).sin() - state.psi.sin()) / k,
            state.y - ((state.psi + k * d).cos() - state.psi.cos()) / k,
        )
    };
    track.project(x, y).ok().map(|p| p.e)
}
