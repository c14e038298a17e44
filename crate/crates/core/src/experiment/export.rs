use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Mode, RunConfig};
use super::metrics::RunMetrics;
use super::sim::{Outcome, RunResult, Sample};
use super::ExperimentError;
use crate::bci::BrainCommand;

/// Files written for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportPaths {
    pub trajectory: PathBuf,
    pub commands: PathBuf,
    pub metrics: PathBuf,
    pub plot: PathBuf,
}

impl ExportPaths {
    pub fn new(dir: &Path, name: &str) -> Self {
        ExportPaths {
            trajectory: dir.join(format!("{name}.trajectory.csv")),
            commands: dir.join(format!("{name}.commands.csv")),
            metrics: dir.join(format!("{name}.metrics.json")),
            plot: dir.join(format!("{name}.svg")),
        }
    }
}

/// Contents of the metrics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: Mode,
    pub seed: u64,
    pub outcome: Outcome,
    pub samples: usize,
    #[serde(flatten)]
    pub metrics: RunMetrics,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

/// Writes every file or none: all contents go to temporaries first, then
/// each is renamed over its target.
pub fn write_all_atomic(files: &[(&Path, &[u8])]) -> Result<(), ExperimentError> {
    let mut written: Vec<PathBuf> = Vec::new();
    let cleanup = |written: &[PathBuf]| {
        for p in written {
            let _ = std::fs::remove_file(p);
        }
    };
    for (path, bytes) in files {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            if let Err(e) = std::fs::create_dir_all(parent) {
                cleanup(&written);
                return Err(io_err(parent)(e));
            }
        }
        let tmp = temp_path(path);
        if let Err(e) = std::fs::write(&tmp, bytes) {
            cleanup(&written);
            return Err(io_err(path)(e));
        }
        written.push(tmp);
    }
    for ((path, _), tmp) in files.iter().zip(&written) {
        std::fs::rename(tmp, path).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    write_all_atomic(&[(path, bytes)])
}

pub fn trajectory_csv(samples: &[Sample]) -> Result<Vec<u8>, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in samples {
        w.serialize(s).map_err(ExperimentError::Csv)?;
    }
    w.into_inner()
        .map_err(|e| ExperimentError::Csv(e.into_error().into()))
}

pub fn parse_trajectory(bytes: &[u8]) -> Result<Vec<Sample>, ExperimentError> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(ExperimentError::Csv)
}

pub fn commands_csv(commands: &[BrainCommand]) -> Result<Vec<u8>, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["issued", "delivery", "delta"])
        .map_err(ExperimentError::Csv)?;
    for c in commands {
        w.serialize((c.issued, c.delivery, c.delta))
            .map_err(ExperimentError::Csv)?;
    }
    w.into_inner()
        .map_err(|e| ExperimentError::Csv(e.into_error().into()))
}

pub fn parse_commands(bytes: &[u8]) -> Result<Vec<BrainCommand>, ExperimentError> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(ExperimentError::Csv)
}

pub fn metrics_json(r: &RunResult, cfg: &RunConfig) -> Vec<u8> {
    let report = MetricsReport {
        mode: cfg.mode,
        seed: cfg.seed,
        outcome: r.outcome,
        samples: r.samples.len(),
        metrics: r.metrics,
    };
    let mut out = serde_json::to_vec_pretty(&report).expect("metrics serialize");
    out.push(b'\n');
    out
}

/// Top-down plot: road edges, centerline, vehicle path and one marker per
/// delivered brain command at the vehicle position when it took effect.
pub fn plot_svg(r: &RunResult, cfg: &RunConfig) -> String {
    let track = &cfg.track;
    let edge = track.polyline(2.0);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    let mut extend = |x: f64, y: f64| {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    };
    for p in &edge {
        extend(p.left_x, p.left_y);
        extend(p.right_x, p.right_y);
    }
    for s in &r.samples {
        extend(s.x, s.y);
    }
    let pad = 10.0;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    // world y points up, svg y points down
    let px = |x: f64| x - x0 + pad;
    let py = |y: f64| y1 - y + pad;
    let poly = |pts: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut s = String::new();
        for (x, y) in pts {
            let _ = write!(s, "{:.2},{:.2} ", px(x), py(y));
        }
        s.trim_end().to_string()
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {w:.2} {h:.2}">"#,
        w * 2.0,
        h * 2.0
    );
    let _ = writeln!(
        svg,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    for (class, pts) in [
        ("edge", poly(&mut edge.iter().map(|p| (p.left_x, p.left_y)))),
        (
            "edge",
            poly(&mut edge.iter().map(|p| (p.right_x, p.right_y))),
        ),
    ] {
        let _ = writeln!(
            svg,
            r##"<polyline class="{class}" fill="none" stroke="#444444" stroke-width="0.4" points="{pts}"/>"##
        );
    }
    let center = poly(&mut edge.iter().map(|p| (p.x, p.y)));
    let _ = writeln!(
        svg,
        r##"<polyline class="centerline" fill="none" stroke="#999999" stroke-width="0.25" stroke-dasharray="3 2" points="{center}"/>"##
    );
    let path = poly(&mut r.samples.iter().map(|s| (s.x, s.y)));
    let _ = writeln!(
        svg,
        r##"<polyline class="path" fill="none" stroke="#1f6fd1" stroke-width="0.35" points="{path}"/>"##
    );
    for c in &r.commands {
        let Some(s) = sample_at(&r.samples, c.delivery) else {
            continue;
        };
        let color = if c.delta > 0.0 { "#2a9d3a" } else { "#d1452a" };
        let _ = writeln!(
            svg,
            r#"<circle class="command" cx="{:.2}" cy="{:.2}" r="1.2" fill="{color}"><title>t={:.2} delta={}</title></circle>"#,
            px(s.x),
            py(s.y),
            c.delivery,
            c.delta
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Last sample at or before `t`.
fn sample_at(samples: &[Sample], t: f64) -> Option<&Sample> {
    let i = samples.partition_point(|s| s.t <= t + 1e-9);
    samples.get(i.checked_sub(1)?)
}

/// Writes trajectory, commands, metrics and plot for a run.
pub fn export(r: &RunResult, cfg: &RunConfig, paths: &ExportPaths) -> Result<(), ExperimentError> {
    if r.samples.is_empty() {
        return Err(ExperimentError::EmptySeries);
    }
    let traj = trajectory_csv(&r.samples)?;
    let cmds = commands_csv(&r.commands)?;
    let metrics = metrics_json(r, cfg);
    let plot = plot_svg(r, cfg);
    write_all_atomic(&[
        (&paths.trajectory, &traj),
        (&paths.commands, &cmds),
        (&paths.metrics, &metrics),
        (&paths.plot, plot.as_bytes()),
    ])
}
