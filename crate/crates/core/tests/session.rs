use std::time::Instant;

use brainsteer::experiment::{
    run_scenario, run_with_driver, DriverSource, Mode, RunConfig, Schedule,
};
use brainsteer::session::{ServerBody, Session};

fn frames(out: &[brainsteer::session::ServerMessage]) -> usize {
    out.iter()
        .filter(|m| matches!(m.body, ServerBody::State { .. }))
        .count()
}

/// Human policy reacting to the last frame: steer back when the car drifts.
fn drive(cfg: &RunConfig, trigger: f64) -> Session {
    let mut s = Session::new(3, cfg.clone()).unwrap();
    let now = Instant::now();
    s.handle_text(r#"{"v":1,"type":"start"}"#, now);
    loop {
        let out = s.handle_text(r#"{"v":1,"type":"tick","steps":1}"#, now);
        let ServerBody::State { frame, .. } = out[0].body else {
            break;
        };
        if frame.outcome.is_some() {
            break;
        }
        if frame.e.abs() > trigger && frame.cooldown == 0.0 {
            let dir = if frame.e > 0.0 { "right" } else { "left" };
            s.handle_text(
                &format!(r#"{{"v":1,"type":"command","command":"{dir}"}}"#),
                now,
            );
        }
    }
    s
}

#[test]
fn recorded_schedule_replays_identically() {
    for mode in Mode::ALL {
        let cfg = RunConfig::with_mode(mode);
        let s = drive(&cfg, 0.1);
        let schedule = s.schedule().clone();
        assert!(!schedule.commands.is_empty());
        // through the file format, as the CLI does
        let reloaded = Schedule::from_csv(&schedule.to_csv().unwrap()).unwrap();
        assert_eq!(reloaded, schedule);
        let replay = run_with_driver(&cfg, DriverSource::Scripted(reloaded)).unwrap();
        let live = s.simulation().unwrap();
        assert_eq!(live.samples(), replay.samples.as_slice(), "{mode}");
        assert_eq!(live.brain().delivered, replay.commands);
    }
}

#[test]
fn model_driven_session_matches_batch() {
    let cfg = RunConfig::with_mode(Mode::SharedThreshold);
    let mut s = Session::new(4, cfg.clone()).unwrap();
    let now = Instant::now();
    s.handle_text(r#"{"v":1,"type":"start","driver":"model"}"#, now);
    let out = s.handle_text(r#"{"v":1,"type":"tick","steps":100000}"#, now);
    assert!(matches!(
        out.last().unwrap().body,
        ServerBody::Metrics { .. }
    ));
    let batch = run_scenario(&cfg).unwrap();
    assert_eq!(frames(&out), batch.samples.len());
    assert_eq!(s.simulation().unwrap().samples(), batch.samples.as_slice());
}

#[test]
fn every_client_message_is_acknowledged() {
    let mut s = Session::new(5, RunConfig::default()).unwrap();
    let now = Instant::now();
    for text in [
        r#"{"v":1,"type":"tick"}"#,
        r#"{"v":1,"type":"start"}"#,
        r#"{"v":1,"type":"command","command":"none"}"#,
        r#"{"v":1,"type":"command","command":"left"}"#,
        r#"{"v":1,"type":"pause"}"#,
        r#"{"v":1,"type":"resume"}"#,
        r#"{"v":1,"type":"tick","steps":2}"#,
        r#"{"v":1,"type":"reset"}"#,
        r#"{"v":1,"type":"config","config":{}}"#,
        "{}",
    ] {
        let out = s.handle_text(text, now);
        assert!(
            out.iter()
                .any(|m| matches!(m.body, ServerBody::State { .. } | ServerBody::Error { .. })),
            "{text}"
        );
    }
}
