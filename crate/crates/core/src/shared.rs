//! Arbitration between the brain setpoint and the fuzzy assist.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Hard switch on |e| with hysteresis.
    #[default]
    Threshold,
    /// Minimizer of a deviation-weighted quadratic cost.
    Cost,
}

/// Which input the delivered command came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Brain,
    Fuzzy,
    Blend,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Brain => "brain",
            Source::Fuzzy => "fuzzy",
            Source::Blend => "blend",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharedConfig {
    /// Chosen by the run mode, so not part of the file format.
    #[serde(skip)]
    pub scheme: Scheme,
    /// Deviation (m) above which the assist takes over.
    pub threshold: f64,
    /// Release at `hysteresis * threshold`; 1 disables hysteresis.
    pub hysteresis: f64,
    /// Weight pulling the cost-scheme output toward the previous output.
    pub smoothness: f64,
}

impl Default for SharedConfig {
    fn default() -> Self {
        SharedConfig {
            scheme: Scheme::Threshold,
            threshold: 0.2,
            hysteresis: 0.8,
            smoothness: 0.2,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid shared-control parameter {field}: {reason}")]
pub struct SharedError {
    pub field: &'static str,
    pub reason: String,
}

impl SharedConfig {
    pub fn validate(&self) -> Result<(), SharedError> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(SharedError {
                field: "threshold",
                reason: "must be positive".into(),
            });
        }
        if !(self.hysteresis > 0.0 && self.hysteresis <= 1.0) {
            return Err(SharedError {
                field: "hysteresis",
                reason: "must lie in (0, 1]".into(),
            });
        }
        if !(self.smoothness >= 0.0 && self.smoothness.is_finite()) {
            return Err(SharedError {
                field: "smoothness",
                reason: "must be non-negative".into(),
            });
        }
        Ok(())
    }

    /// `(w_brain, w_fuzzy)` for a deviation; they always sum to one.
    pub fn cost_weights(&self, e: f64) -> (f64, f64) {
        let r = e.abs() / self.threshold;
        ((1.0 - r).max(0.0), r.min(1.0))
    }

    /// J(u) minimized by the cost scheme.
    pub fn cost(&self, u: f64, u_brain: f64, u_fuzzy: f64, u_prev: f64, e: f64) -> f64 {
        let (wb, wf) = self.cost_weights(e);
        wb * (u - u_brain).powi(2)
            + wf * (u - u_fuzzy).powi(2)
            + self.smoothness * (u - u_prev).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArbiterStep {
    pub u_brain: f64,
    pub u_fuzzy: f64,
    pub e: f64,
    pub u_out: f64,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArbiterState {
    /// Threshold-scheme owner; always brain or fuzzy.
    pub active: Source,
    pub u_prev: f64,
    pub switches: usize,
    pub log: Vec<ArbiterStep>,
}

impl Default for ArbiterState {
    fn default() -> Self {
        ArbiterState {
            active: Source::Brain,
            u_prev: 0.0,
            switches: 0,
            log: Vec::new(),
        }
    }
}

impl ArbiterState {
    fn record(
        &mut self,
        u_brain: f64,
        u_fuzzy: f64,
        e: f64,
        u_out: f64,
        source: Source,
    ) -> (f64, Source) {
        self.u_prev = u_out;
        self.log.push(ArbiterStep {
            u_brain,
            u_fuzzy,
            e,
            u_out,
            source,
        });
        (u_out, source)
    }
}

/// Pure switching: the output is exactly one of the two inputs.
pub fn arbitrate_threshold(
    u_brain: f64,
    u_fuzzy: f64,
    e: f64,
    cfg: &SharedConfig,
    st: &mut ArbiterState,
) -> (f64, Source) {
    let next = match st.active {
        Source::Fuzzy if e.abs() < cfg.hysteresis * cfg.threshold => Source::Brain,
        Source::Fuzzy => Source::Fuzzy,
        _ if e.abs() > cfg.threshold => Source::Fuzzy,
        _ => Source::Brain,
    };
    if next != st.active {
        st.switches += 1;
        st.active = next;
    }
    let u = if next == Source::Fuzzy {
        u_fuzzy
    } else {
        u_brain
    };
    st.record(u_brain, u_fuzzy, e, u, next)
}

/// Closed-form minimizer of the weighted quadratic cost.
pub fn arbitrate_cost(
    u_brain: f64,
    u_fuzzy: f64,
    e: f64,
    cfg: &SharedConfig,
    st: &mut ArbiterState,
) -> (f64, Source) {
    let (wb, wf) = cfg.cost_weights(e);
    let ws = cfg.smoothness;
    let u = (wb * u_brain + wf * u_fuzzy + ws * st.u_prev) / (wb + wf + ws);
    st.record(u_brain, u_fuzzy, e, u, Source::Blend)
}

pub fn arbitrate(
    u_brain: f64,
    u_fuzzy: f64,
    e: f64,
    cfg: &SharedConfig,
    st: &mut ArbiterState,
) -> (f64, Source) {
    match cfg.scheme {
        Scheme::Threshold => arbitrate_threshold(u_brain, u_fuzzy, e, cfg, st),
        Scheme::Cost => arbitrate_cost(u_brain, u_fuzzy, e, cfg, st),
    }
}
