//! Step-wise interactive sessions: a human replaces the simulated driver and
//! sends discrete commands through the same delayed, rate-limited channel.
//!
//! Messages are JSON objects carrying a protocol version `v` and a `type`.
//! Every client message is answered by at least one `state` frame or an
//! `error`; see `docs/protocol.md` for the field-by-field schema.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bci::Direction;
use crate::experiment::{
    build_lookup, DriverSource, ExperimentError, MetricsReport, Outcome, RunConfig, Sample,
    Schedule, ScheduledCommand, Simulation,
};
use crate::fuzzy::LookupTable;
use crate::shared::Source;
use crate::track::PolylinePoint;

pub const PROTOCOL_VERSION: u32 = 1;

/// Polyline spacing (m) of the track message.
const TRACK_SPACING: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pacing {
    /// Advances only on `tick`.
    #[default]
    Lockstep,
    /// Advances with the wall clock scaled by the real-time factor.
    Realtime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriverKind {
    /// Commands come from the client.
    #[default]
    Human,
    /// The simulated driver acts; client commands are still accepted.
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Left,
    Right,
    None,
}

fn one() -> usize {
    1
}

fn unit_factor() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClientBody {
    Config {
        config: Box<RunConfig>,
    },
    Start {
        #[serde(default)]
        mode: Pacing,
        #[serde(default = "unit_factor")]
        realtime_factor: f64,
        #[serde(default)]
        driver: DriverKind,
    },
    Command {
        command: CommandKind,
    },
    Tick {
        #[serde(default = "one")]
        steps: usize,
    },
    Pause,
    Resume,
    Reset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientMessage {
    pub v: u32,
    #[serde(flatten)]
    pub body: ClientBody,
}

/// Snapshot sent after every step and as the acknowledgement of most messages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// Index of the sample this frame shows; `None` before the first step.
    pub step: Option<usize>,
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
    pub regulations: usize,
    /// Commands issued but not yet delivered.
    pub pending: usize,
    /// Seconds until the next command will be accepted.
    pub cooldown: f64,
    pub progress: f64,
    pub paused: bool,
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Notice {
    Accepted,
    RateLimited,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ServerBody {
    State {
        frame: Frame,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        notice: Option<Notice>,
    },
    Track {
        width: f64,
        total_length: f64,
        threshold: f64,
        points: Vec<PolylinePoint>,
    },
    Metrics {
        report: MetricsReport,
    },
    Error {
        code: ErrorCode,
        message: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        report: Option<MetricsReport>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    Malformed,
    Version,
    NotStarted,
    Running,
    Paused,
    SessionOver,
    InvalidConfig,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerMessage {
    pub v: u32,
    #[serde(flatten)]
    pub body: ServerBody,
}

impl ServerMessage {
    fn new(body: ServerBody) -> Self {
        ServerMessage {
            v: PROTOCOL_VERSION,
            body,
        }
    }

    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        Self::new(ServerBody::Error {
            code,
            message: message.into(),
            report: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }
}

#[derive(Debug)]
struct Clock {
    origin: Instant,
    steps_at_origin: usize,
}

/// One client's simulation plus pacing state. Handling is strictly
/// sequential: each call finishes its step(s) before returning.
#[derive(Debug)]
pub struct Session {
    id: u64,
    cfg: RunConfig,
    lookup: Arc<LookupTable>,
    sim: Option<Simulation>,
    pacing: Pacing,
    factor: f64,
    driver: DriverKind,
    paused: bool,
    clock: Option<Clock>,
    schedule: Schedule,
}

impl Session {
    pub fn new(id: u64, cfg: RunConfig) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        let lookup = Arc::new(build_lookup(&cfg)?);
        Ok(Session {
            id,
            cfg,
            lookup,
            sim: None,
            pacing: Pacing::Lockstep,
            factor: 1.0,
            driver: DriverKind::Human,
            paused: false,
            clock: None,
            schedule: Schedule::default(),
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn simulation(&self) -> Option<&Simulation> {
        self.sim.as_ref()
    }

    /// Accepted client commands of the current run, in batch replay format.
    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn is_running(&self) -> bool {
        self.sim.as_ref().is_some_and(|s| !s.is_finished())
    }

    pub fn pacing(&self) -> Pacing {
        self.pacing
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    /// Parses and handles one text message.
    pub fn handle_text(&mut self, text: &str, now: Instant) -> Vec<ServerMessage> {
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                return vec![ServerMessage::error(
                    ErrorCode::Malformed,
                    format!("invalid JSON: {e}"),
                )]
            }
        };
        match value.get("v").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(PROTOCOL_VERSION) => {}
            Some(v) => {
                return vec![ServerMessage::error(
                    ErrorCode::Version,
                    format!(
                        "unsupported protocol version {v}; this server speaks {PROTOCOL_VERSION}"
                    ),
                )]
            }
            None => {
                return vec![ServerMessage::error(
                    ErrorCode::Malformed,
                    "missing protocol version field v",
                )]
            }
        }
        match serde_json::from_value::<ClientMessage>(value) {
            Ok(msg) => self.handle(msg.body, now),
            Err(e) => vec![ServerMessage::error(ErrorCode::Malformed, e.to_string())],
        }
    }

    pub fn handle(&mut self, msg: ClientBody, now: Instant) -> Vec<ServerMessage> {
        match msg {
            ClientBody::Config { config } => self.configure(*config),
            ClientBody::Start {
                mode,
                realtime_factor,
                driver,
            } => self.start(mode, realtime_factor, driver, now),
            ClientBody::Command { command } => self.command(command),
            ClientBody::Tick { steps } => self.tick(steps),
            ClientBody::Pause => self.pause(),
            ClientBody::Resume => self.resume(now),
            ClientBody::Reset => self.reset(),
        }
    }

    fn configure(&mut self, cfg: RunConfig) -> Vec<ServerMessage> {
        if self.is_running() {
            return vec![ServerMessage::error(
                ErrorCode::Running,
                "configuration changes are accepted only between runs",
            )];
        }
        if let Err(e) = cfg.validate() {
            return vec![ServerMessage::error(
                ErrorCode::InvalidConfig,
                e.to_string(),
            )];
        }
        let lookup = if cfg.fuzzy == self.cfg.fuzzy {
            Arc::clone(&self.lookup)
        } else {
            match build_lookup(&cfg) {
                Ok(l) => Arc::new(l),
                Err(e) => {
                    return vec![ServerMessage::error(
                        ErrorCode::InvalidConfig,
                        e.to_string(),
                    )]
                }
            }
        };
        self.cfg = cfg;
        self.lookup = lookup;
        self.sim = None;
        self.schedule = Schedule::default();
        vec![self.state(None)]
    }

    fn start(
        &mut self,
        pacing: Pacing,
        factor: f64,
        driver: DriverKind,
        now: Instant,
    ) -> Vec<ServerMessage> {
        if self.is_running() {
            return vec![ServerMessage::error(
                ErrorCode::Running,
                "a run is already in progress; send reset first",
            )];
        }
        if !(factor > 0.0 && factor.is_finite()) {
            return vec![ServerMessage::error(
                ErrorCode::Malformed,
                "realtime_factor must be positive",
            )];
        }
        let source = match driver {
            DriverKind::Human => DriverSource::External,
            DriverKind::Model => DriverSource::Model,
        };
        match Simulation::with_lookup(self.cfg.clone(), source, Arc::clone(&self.lookup)) {
            Ok(sim) => self.sim = Some(sim),
            Err(e) => {
                return vec![ServerMessage::error(
                    ErrorCode::InvalidConfig,
                    e.to_string(),
                )]
            }
        }
        self.pacing = pacing;
        self.factor = factor;
        self.driver = driver;
        self.paused = false;
        self.schedule = Schedule::default();
        self.clock = (pacing == Pacing::Realtime).then_some(Clock {
            origin: now,
            steps_at_origin: 0,
        });
        vec![self.track_message(), self.state(None)]
    }

    fn command(&mut self, kind: CommandKind) -> Vec<ServerMessage> {
        let Some(sim) = self.sim.as_mut() else {
            return vec![ServerMessage::error(
                ErrorCode::NotStarted,
                "send start before commands",
            )];
        };
        if let Some(outcome) = sim.outcome() {
            return vec![self.over(outcome)];
        }
        let dir = match kind {
            CommandKind::Left => Direction::Left,
            CommandKind::Right => Direction::Right,
            CommandKind::None => return vec![self.state(None)],
        };
        let step = sim.step_index();
        let t = sim.time();
        let notice = match sim.request(dir) {
            Ok(_) => {
                self.schedule.push(ScheduledCommand {
                    step,
                    t,
                    command: dir,
                });
                Notice::Accepted
            }
            Err(_) => Notice::RateLimited,
        };
        vec![self.state(Some(notice))]
    }

    fn tick(&mut self, steps: usize) -> Vec<ServerMessage> {
        match &self.sim {
            None => {
                return vec![ServerMessage::error(
                    ErrorCode::NotStarted,
                    "send start before tick",
                )]
            }
            Some(sim) => {
                if let Some(outcome) = sim.outcome() {
                    return vec![self.over(outcome)];
                }
            }
        }
        if self.paused {
            return vec![ServerMessage::error(
                ErrorCode::Paused,
                "session is paused; send resume",
            )];
        }
        if self.pacing == Pacing::Realtime {
            return vec![ServerMessage::error(
                ErrorCode::Running,
                "tick is only valid in lockstep mode",
            )];
        }
        if steps == 0 {
            return vec![self.state(None)];
        }
        self.advance(steps)
    }

    fn advance(&mut self, steps: usize) -> Vec<ServerMessage> {
        let mut out = Vec::with_capacity(steps + 1);
        for _ in 0..steps {
            let sim = self.sim.as_mut().expect("started");
            match sim.advance() {
                Ok(_) => out.push(self.state(None)),
                Err(e) => {
                    out.push(ServerMessage::error(ErrorCode::Internal, e.to_string()));
                    break;
                }
            }
            let sim = self.sim.as_ref().expect("started");
            if sim.is_finished() {
                out.push(ServerMessage::new(ServerBody::Metrics {
                    report: self.report(),
                }));
                break;
            }
        }
        out
    }

    fn pause(&mut self) -> Vec<ServerMessage> {
        if self.sim.is_none() {
            return vec![ServerMessage::error(
                ErrorCode::NotStarted,
                "nothing to pause",
            )];
        }
        self.paused = true;
        self.clock = None;
        vec![self.state(None)]
    }

    fn resume(&mut self, now: Instant) -> Vec<ServerMessage> {
        let Some(sim) = &self.sim else {
            return vec![ServerMessage::error(
                ErrorCode::NotStarted,
                "nothing to resume",
            )];
        };
        self.paused = false;
        if self.pacing == Pacing::Realtime {
            self.clock = Some(Clock {
                origin: now,
                steps_at_origin: sim.step_index(),
            });
        }
        vec![self.state(None)]
    }

    fn reset(&mut self) -> Vec<ServerMessage> {
        self.sim = None;
        self.paused = false;
        self.clock = None;
        self.schedule = Schedule::default();
        vec![self.state(None)]
    }

    /// Steps due by `now` in real-time mode; empty otherwise.
    pub fn poll(&mut self, now: Instant) -> Vec<ServerMessage> {
        let (Some(clock), Some(sim)) = (&self.clock, &self.sim) else {
            return Vec::new();
        };
        if self.paused || sim.is_finished() {
            return Vec::new();
        }
        let elapsed = now.saturating_duration_since(clock.origin).as_secs_f64() * self.factor;
        let target = clock.steps_at_origin + (elapsed / self.cfg.dt).floor() as usize;
        let due = target.saturating_sub(sim.step_index());
        if due == 0 {
            return Vec::new();
        }
        self.advance(due)
    }

    /// Wall-clock time until the next real-time step is due.
    pub fn next_due(&self, now: Instant) -> Option<Duration> {
        let (clock, sim) = (self.clock.as_ref()?, self.sim.as_ref()?);
        if self.paused || sim.is_finished() {
            return None;
        }
        let next =
            (sim.step_index() + 1 - clock.steps_at_origin) as f64 * self.cfg.dt / self.factor;
        let at = clock.origin + Duration::from_secs_f64(next);
        Some(at.saturating_duration_since(now))
    }

    fn report(&self) -> MetricsReport {
        let sim = self.sim.as_ref().expect("started");
        MetricsReport {
            mode: self.cfg.mode,
            seed: self.cfg.seed,
            outcome: sim.outcome().unwrap_or(Outcome::TimeLimit),
            samples: sim.samples().len(),
            metrics: sim.metrics(),
        }
    }

    fn over(&self, outcome: Outcome) -> ServerMessage {
        ServerMessage::new(ServerBody::Error {
            code: ErrorCode::SessionOver,
            message: format!("session over ({outcome:?})"),
            report: Some(self.report()),
        })
    }

    fn track_message(&self) -> ServerMessage {
        let t = &self.cfg.track;
        ServerMessage::new(ServerBody::Track {
            width: t.width,
            total_length: t.total_length(),
            threshold: self.cfg.shared.threshold,
            points: t.polyline(TRACK_SPACING),
        })
    }

    /// Current frame: the latest sample, or the initial pose before any step.
    pub fn frame(&self) -> Frame {
        let Some(sim) = &self.sim else {
            return self.idle_frame(0, 0, 0.0);
        };
        let brain = sim.brain();
        let cooldown = brain.last_issue.map_or(0.0, |last| {
            (last + self.cfg.driver.interval - sim.time()).max(0.0)
        });
        let base = |s: &Sample, step: Option<usize>| Frame {
            step,
            t: s.t,
            x: s.x,
            y: s.y,
            psi: s.psi,
            e: s.e,
            de: s.de,
            u_brain: s.u_brain,
            u_fuzzy: s.u_fuzzy,
            u_out: s.u_out,
            source: s.source,
            regulations: brain.regulations,
            pending: brain.pending.len(),
            cooldown,
            progress: s.progress,
            paused: self.paused,
            outcome: sim.outcome(),
        };
        match sim.samples().last() {
            Some(s) => base(s, Some(sim.samples().len() - 1)),
            None => {
                let v = sim.vehicle();
                let e = self.cfg.track.project(v.x, v.y).map_or(0.0, |p| p.e);
                Frame {
                    x: v.x,
                    y: v.y,
                    psi: v.psi,
                    e,
                    ..self.idle_frame(brain.regulations, brain.pending.len(), cooldown)
                }
            }
        }
    }

    fn idle_frame(&self, regulations: usize, pending: usize, cooldown: f64) -> Frame {
        Frame {
            step: None,
            t: 0.0,
            x: 0.0,
            y: 0.0,
            psi: 0.0,
            e: 0.0,
            de: 0.0,
            u_brain: 0.0,
            u_fuzzy: 0.0,
            u_out: 0.0,
            source: Source::Brain,
            regulations,
            pending,
            cooldown,
            progress: 0.0,
            paused: self.paused,
            outcome: None,
        }
    }

    fn state(&self, notice: Option<Notice>) -> ServerMessage {
        ServerMessage::new(ServerBody::State {
            frame: self.frame(),
            notice,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(s: &mut Session, text: &str) -> Vec<ServerMessage> {
        s.handle_text(text, Instant::now())
    }

    fn started() -> Session {
        let mut s = Session::new(1, RunConfig::default()).unwrap();
        let out = msg(&mut s, r#"{"v":1,"type":"start","mode":"lockstep"}"#);
        assert!(matches!(out[0].body, ServerBody::Track { .. }));
        s
    }

    fn frame(m: &ServerMessage) -> (Frame, Option<Notice>) {
        match &m.body {
            ServerBody::State { frame, notice } => (*frame, *notice),
            other => panic!("expected state, got {other:?}"),
        }
    }

    fn code(m: &ServerMessage) -> ErrorCode {
        match &m.body {
            ServerBody::Error { code, .. } => *code,
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn tick_emits_one_frame_per_step() {
        let mut s = started();
        let out = msg(&mut s, r#"{"v":1,"type":"tick","steps":3}"#);
        assert_eq!(out.len(), 3);
        assert_eq!(frame(&out[2]).0.step, Some(2));
        assert!((frame(&out[2]).0.t - 0.02).abs() < 1e-12);
    }

    #[test]
    fn right_command_delivers_after_delay() {
        let mut s = started();
        let (_, notice) = frame(&msg(&mut s, r#"{"v":1,"type":"command","command":"right"}"#)[0]);
        assert_eq!(notice, Some(Notice::Accepted));
        let delay_steps = (s.config().driver.delay / s.config().dt).round() as usize;
        let out = msg(
            &mut s,
            &format!(r#"{{"v":1,"type":"tick","steps":{}}}"#, delay_steps + 1),
        );
        assert_eq!(frame(&out[delay_steps - 1]).0.u_brain, 0.0);
        assert_eq!(frame(&out[delay_steps]).0.u_brain, -75.0);
        assert_eq!(frame(&out[delay_steps]).0.regulations, 1);
    }

    #[test]
    fn second_command_within_interval_is_rate_limited() {
        let mut s = started();
        msg(&mut s, r#"{"v":1,"type":"command","command":"left"}"#);
        msg(&mut s, r#"{"v":1,"type":"tick","steps":10}"#);
        let (_, notice) = frame(&msg(&mut s, r#"{"v":1,"type":"command","command":"left"}"#)[0]);
        assert_eq!(notice, Some(Notice::RateLimited));
        assert_eq!(s.schedule().commands.len(), 1);
    }

    #[test]
    fn pause_freezes_the_clock() {
        let mut s = started();
        msg(&mut s, r#"{"v":1,"type":"pause"}"#);
        let out = msg(&mut s, r#"{"v":1,"type":"command","command":"left"}"#);
        assert_eq!(frame(&out[0]).1, Some(Notice::Accepted));
        assert_eq!(
            code(&msg(&mut s, r#"{"v":1,"type":"tick"}"#)[0]),
            ErrorCode::Paused
        );
        assert_eq!(s.simulation().unwrap().step_index(), 0);
        msg(&mut s, r#"{"v":1,"type":"resume"}"#);
        let out = msg(&mut s, r#"{"v":1,"type":"tick","steps":51}"#);
        assert_eq!(frame(&out[49]).0.u_brain, 0.0);
        assert_eq!(frame(&out[50]).0.u_brain, 75.0);
    }

    #[test]
    fn malformed_messages_leave_session_steppable() {
        let mut s = started();
        msg(&mut s, r#"{"v":1,"type":"tick","steps":5}"#);
        for bad in [
            "not json",
            r#"{"type":"tick"}"#,
            r#"{"v":2,"type":"tick"}"#,
            r#"{"v":1,"type":"warp"}"#,
            r#"{"v":1,"type":"command","command":"up"}"#,
            r#"{"v":1,"type":"tick","steps":-1}"#,
        ] {
            let out = msg(&mut s, bad);
            assert_eq!(out.len(), 1);
            assert!(
                matches!(code(&out[0]), ErrorCode::Malformed | ErrorCode::Version),
                "{bad}"
            );
        }
        let out = msg(&mut s, r#"{"v":1,"type":"tick"}"#);
        assert_eq!(frame(&out[0]).0.step, Some(5));
    }

    #[test]
    fn config_rejected_mid_run_and_accepted_after_reset() {
        let mut s = started();
        let cfg = serde_json::json!({"v":1,"type":"config","config":{"mode":"shared-cost"}});
        assert_eq!(code(&msg(&mut s, &cfg.to_string())[0]), ErrorCode::Running);
        msg(&mut s, r#"{"v":1,"type":"reset"}"#);
        let out = msg(&mut s, &cfg.to_string());
        assert!(matches!(out[0].body, ServerBody::State { .. }));
        assert_eq!(s.config().mode, crate::experiment::Mode::SharedCost);
        let bad = serde_json::json!({"v":1,"type":"config","config":{"dt":1.0}});
        assert_eq!(
            code(&msg(&mut s, &bad.to_string())[0]),
            ErrorCode::InvalidConfig
        );
    }

    #[test]
    fn finished_session_reports_session_over() {
        let mut s = Session::new(
            1,
            RunConfig {
                max_time: 0.05,
                ..Default::default()
            },
        )
        .unwrap();
        msg(&mut s, r#"{"v":1,"type":"start"}"#);
        let out = msg(&mut s, r#"{"v":1,"type":"tick","steps":100}"#);
        assert!(matches!(
            out.last().unwrap().body,
            ServerBody::Metrics { .. }
        ));
        assert_eq!(out.len(), 7);
        let out = msg(&mut s, r#"{"v":1,"type":"tick"}"#);
        assert_eq!(code(&out[0]), ErrorCode::SessionOver);
        assert!(matches!(
            &out[0].body,
            ServerBody::Error {
                report: Some(_),
                ..
            }
        ));
    }

    #[test]
    fn realtime_poll_follows_the_clock() {
        let mut s = Session::new(1, RunConfig::default()).unwrap();
        let t0 = Instant::now();
        s.handle_text(
            r#"{"v":1,"type":"start","mode":"realtime","realtime_factor":2.0}"#,
            t0,
        );
        assert!(s.poll(t0).is_empty());
        let out = s.poll(t0 + Duration::from_millis(100));
        assert_eq!(out.len(), 20);
        assert_eq!(
            code(&s.handle_text(r#"{"v":1,"type":"tick"}"#, t0)[0]),
            ErrorCode::Running
        );
        s.handle_text(r#"{"v":1,"type":"pause"}"#, t0 + Duration::from_millis(100));
        assert!(s.poll(t0 + Duration::from_millis(500)).is_empty());
        s.handle_text(
            r#"{"v":1,"type":"resume"}"#,
            t0 + Duration::from_millis(500),
        );
        assert_eq!(s.poll(t0 + Duration::from_millis(550)).len(), 10);
        assert!(s.next_due(t0 + Duration::from_millis(550)).unwrap() <= Duration::from_millis(5));
    }

    #[test]
    fn messages_serialize_with_version_and_type() {
        let s = started();
        let json = s.state(Some(Notice::RateLimited)).to_json();
        assert!(
            json.starts_with(r#"{"v":1,"type":"state","frame":{"step":null,"t":0.0,"#),
            "{json}"
        );
        assert!(json.ends_with(r#""notice":"rate-limited"}"#));
        let err = ServerMessage::error(ErrorCode::NotStarted, "x").to_json();
        assert_eq!(
            err,
            r#"{"v":1,"type":"error","code":"not-started","message":"x"}"#
        );
    }
}
