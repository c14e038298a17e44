use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::sim::Sample;
use crate::shared::Source;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Largest |e| over on-road samples, meters.
    pub max_abs_e: f64,
    /// Root mean square of e over on-road samples, meters.
    pub rms_e: f64,
    /// Largest |e| over every sample, including any off-road tail.
    pub max_abs_e_all: f64,
    pub regulations: usize,
    pub switches: usize,
    /// Driver action threshold, meters.
    pub error_threshold: f64,
    /// Setpoint change per brain command, degrees.
    pub command_step: f64,
    pub lap_completed: bool,
    /// Some sample lay beyond the road edge.
    pub off_road: bool,
    /// Largest change of the delivered command between consecutive samples, degrees.
    pub max_step_du: f64,
    /// Time of the last sample, seconds.
    pub duration: f64,
}

/// Metrics of a trajectory. `regulations` is the delivered-command count.
pub fn compute_metrics(samples: &[Sample], regulations: usize, cfg: &RunConfig) -> RunMetrics {
    let hw = cfg.track.half_width();
    let (mut max_on, mut sq, mut n_on, mut max_all) = (0.0f64, 0.0, 0usize, 0.0f64);
    let (mut switches, mut max_du, mut prev_u) = (0usize, 0.0f64, 0.0);
    let mut prev_src: Option<Source> = None;
    for s in samples {
        let a = s.e.abs();
        max_all = max_all.max(a);
        if a <= hw {
            max_on = max_on.max(a);
            sq += s.e * s.e;
            n_on += 1;
        }
        let changed = match prev_src {
            Some(p) => p != s.source,
            // the arbiter starts out on the brain
            None => s.source == Source::Fuzzy,
        };
        switches += usize::from(changed);
        prev_src = Some(s.source);
        max_du = max_du.max((s.u_out - prev_u).abs());
        prev_u = s.u_out;
    }
    let total = cfg.track.total_length();
    RunMetrics {
        max_abs_e: max_on,
        rms_e: if n_on > 0 {
            (sq / n_on as f64).sqrt()
        } else {
            0.0
        },
        max_abs_e_all: max_all,
        regulations,
        switches,
        error_threshold: cfg.driver.threshold,
        command_step: cfg.driver.step,
        lap_completed: samples.last().is_some_and(|s| s.progress >= total),
        off_road: max_all > hw,
        max_step_du: max_du,
        duration: samples.last().map_or(0.0, |s| s.t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(es: &[f64]) -> Vec<Sample> {
        es.iter()
            .enumerate()
            .map(|(k, &e)| Sample {
                t: k as f64 * 0.01,
                x: 0.0,
                y: e,
                psi: 0.0,
                e,
                de: 0.0,
                u_brain: 0.0,
                u_fuzzy: 0.0,
                u_out: 0.0,
                source: Source::Brain,
                progress: 0.0,
            })
            .collect()
    }

    #[test]
    fn zero_series() {
        let m = compute_metrics(&rows(&[0.0; 10]), 0, &RunConfig::default());
        assert_eq!((m.max_abs_e, m.rms_e), (0.0, 0.0));
        assert!(!m.off_road && !m.lap_completed);
    }

    #[test]
    fn small_series_arithmetic() {
        let m = compute_metrics(&rows(&[0.3, -0.4, 0.5]), 2, &RunConfig::default());
        assert_eq!(m.max_abs_e, 0.5);
        assert!((m.rms_e - (0.5f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((m.rms_e - 0.408).abs() < 1e-3);
        assert_eq!(m.regulations, 2);
        assert!(m.rms_e <= m.max_abs_e);
    }

    #[test]
    fn off_road_samples_excluded_from_error_stats() {
        let m = compute_metrics(&rows(&[1.0, 5.0, 6.5]), 0, &RunConfig::default());
        assert_eq!(m.max_abs_e, 1.0);
        assert_eq!(m.max_abs_e_all, 6.5);
        assert!(m.off_road);
    }

    #[test]
    fn switches_and_command_steps() {
        let mut r = rows(&[0.0; 5]);
        let srcs = [
            Source::Brain,
            Source::Fuzzy,
            Source::Fuzzy,
            Source::Brain,
            Source::Brain,
        ];
        let outs = [0.0, 30.0, 10.0, 75.0, 75.0];
        for ((s, src), u) in r.iter_mut().zip(srcs).zip(outs) {
            s.source = src;
            s.u_out = u;
        }
        let m = compute_metrics(&r, 0, &RunConfig::default());
        assert_eq!(m.switches, 2);
        assert_eq!(m.max_step_du, 65.0);
    }
}
