use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::{Mode, RunConfig};
use super::metrics::RunMetrics;
use super::sim::{run_scenario, RunResult};
use super::ExperimentError;

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mode: Mode,
    pub error_threshold: f64,
    pub command_step: f64,
    pub regulations: usize,
    pub max_abs_e: f64,
    pub rms_e: f64,
    pub switches: usize,
    pub lap_completed: bool,
}

impl ComparisonRow {
    pub fn from_metrics(mode: Mode, m: &RunMetrics) -> Self {
        ComparisonRow {
            mode,
            error_threshold: m.error_threshold,
            command_step: m.command_step,
            regulations: m.regulations,
            max_abs_e: m.max_abs_e,
            rms_e: m.rms_e,
            switches: m.switches,
            lap_completed: m.lap_completed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: [ComparisonRow; 2],
    pub results: [RunResult; 2],
}

/// Runs both configurations concurrently. The second run takes the first
/// one's seed and driver so the two differ only in what they are meant to.
pub fn compare(a: &RunConfig, b: &RunConfig) -> Result<Comparison, ExperimentError> {
    let b = RunConfig {
        seed: a.seed,
        driver: a.driver,
        ..b.clone()
    };
    let (ra, rb) = std::thread::scope(|s| {
        let ha = s.spawn(|| run_scenario(a));
        let hb = s.spawn(|| run_scenario(&b));
        (
            ha.join().expect("scenario thread"),
            hb.join().expect("scenario thread"),
        )
    });
    let (ra, rb) = (ra?, rb?);
    Ok(Comparison {
        rows: [
            ComparisonRow::from_metrics(a.mode, &ra.metrics),
            ComparisonRow::from_metrics(b.mode, &rb.metrics),
        ],
        results: [ra, rb],
    })
}

/// Fixed-width text table.
pub fn render_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:>11} {:>10} {:>11} {:>10} {:>9} {:>8} {:>5}",
        "mode", "threshold_m", "step_deg", "regulations", "max_e_m", "rms_e_m", "switches", "lap"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<18} {:>11.3} {:>10.1} {:>11} {:>10.4} {:>9.4} {:>8} {:>5}",
            r.mode.as_str(),
            r.error_threshold,
            r.command_step,
            r.regulations,
            r.max_abs_e,
            r.rms_e,
            r.switches,
            if r.lap_completed { "yes" } else { "no" }
        );
    }
    out
}

pub fn rows_csv(rows: &[ComparisonRow]) -> Result<Vec<u8>, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(ExperimentError::Csv)?;
    }
    w.into_inner()
        .map_err(|e| ExperimentError::Csv(e.into_error().into()))
}

/// Per-seed metrics plus aggregates for a range of seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSweep {
    pub mode: Mode,
    pub runs: Vec<(u64, RunMetrics)>,
    pub completed: usize,
    pub mean_max_abs_e: f64,
    pub worst_max_abs_e: f64,
    pub mean_regulations: f64,
}

/// Runs `cfg` once per seed, in parallel.
pub fn sweep_seeds(cfg: &RunConfig, seeds: &[u64]) -> Result<SeedSweep, ExperimentError> {
    let results: Vec<Result<RunResult, ExperimentError>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let c = RunConfig {
                    seed,
                    ..cfg.clone()
                };
                s.spawn(move || run_scenario(&c))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread"))
            .collect()
    });
    let mut runs = Vec::with_capacity(seeds.len());
    for (seed, r) in seeds.iter().zip(results) {
        runs.push((*seed, r?.metrics));
    }
    let n = runs.len().max(1) as f64;
    Ok(SeedSweep {
        mode: cfg.mode,
        completed: runs.iter().filter(|(_, m)| m.lap_completed).count(),
        mean_max_abs_e: runs.iter().map(|(_, m)| m.max_abs_e_all).sum::<f64>() / n,
        worst_max_abs_e: runs
            .iter()
            .map(|(_, m)| m.max_abs_e_all)
            .fold(0.0, f64::max),
        mean_regulations: runs.iter().map(|(_, m)| m.regulations as f64).sum::<f64>() / n,
        runs,
    })
}
