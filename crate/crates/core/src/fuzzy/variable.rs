use serde::{Deserialize, Serialize};

use super::label::LinguisticLabel;
use super::membership::{MembershipFunction, Side};
use super::FuzzyError;

/// Default label centers in normalized units: narrow near zero, wide at the edges.
pub const DEFAULT_CENTERS: [f64; 7] = [-1.0, -0.6, -0.25, 0.0, 0.25, 0.6, 1.0];

/// Lowest and highest admissible height at which neighbouring sets cross.
pub const CROSSING_BOUNDS: (f64, f64) = (0.4, 0.6);

/// Every normalized point must belong to some set at least this much.
pub const MIN_COVERAGE: f64 = 0.4;

/// Shape family requested for one label; parameters are derived from the
/// neighbouring centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Triangle,
    Gaussian,
    Shoulder,
}

/// Triangles/gaussians for e and u, gaussians throughout for de.
pub const MIXED_SHAPES: [ShapeKind; 7] = [
    ShapeKind::Shoulder,
    ShapeKind::Gaussian,
    ShapeKind::Triangle,
    ShapeKind::Triangle,
    ShapeKind::Triangle,
    ShapeKind::Gaussian,
    ShapeKind::Shoulder,
];

pub const SMOOTH_SHAPES: [ShapeKind; 7] = [
    ShapeKind::Shoulder,
    ShapeKind::Gaussian,
    ShapeKind::Gaussian,
    ShapeKind::Gaussian,
    ShapeKind::Gaussian,
    ShapeKind::Gaussian,
    ShapeKind::Shoulder,
];

/// Sigma that puts a gaussian at one half a distance `gap / 2` from its center.
pub fn half_crossing_sigma(gap: f64) -> f64 {
    gap / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
}

/// A linguistic variable: seven membership functions on `[-1, 1]` and the
/// gain mapping normalized units to physical ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyVariable {
    pub name: String,
    /// Physical units per normalized unit (m, m/s or steering-wheel degrees).
    pub gain: f64,
    pub sets: [MembershipFunction; 7],
}

impl FuzzyVariable {
    /// Builds the seven sets from centers and shape kinds.
    ///
    /// Triangles put their feet on the neighbouring centers, gaussians use
    /// the gap to each neighbour for the width on that side, and shoulders
    /// (first and last label only) saturate toward the universe edge.
    pub fn from_layout(
        name: impl Into<String>,
        gain: f64,
        centers: [f64; 7],
        shapes: [ShapeKind; 7],
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        if !(gain.is_finite() && gain > 0.0) {
            return Err(FuzzyError::InvalidVariable(format!(
                "{name}: gain must be positive"
            )));
        }
        if centers.iter().any(|c| !c.is_finite() || c.abs() > 1.0) {
            return Err(FuzzyError::InvalidVariable(format!(
                "{name}: centers must lie in [-1, 1]"
            )));
        }
        if !centers.windows(2).all(|w| w[0] < w[1]) {
            return Err(FuzzyError::InvalidVariable(format!(
                "{name}: centers must be strictly increasing"
            )));
        }
        let mut sets = [MembershipFunction::Triangle {
            left: 0.0,
            peak: 0.0,
            right: 0.0,
        }; 7];
        for i in 0..7 {
            let c = centers[i];
            let left_gap = (i > 0).then(|| c - centers[i - 1]);
            let right_gap = (i < 6).then(|| centers[i + 1] - c);
            sets[i] = match (shapes[i], left_gap, right_gap) {
                (ShapeKind::Shoulder, None, Some(g)) => MembershipFunction::Shoulder {
                    center: c,
                    sigma: half_crossing_sigma(g),
                    side: Side::Left,
                },
                (ShapeKind::Shoulder, Some(g), None) => MembershipFunction::Shoulder {
                    center: c,
                    sigma: half_crossing_sigma(g),
                    side: Side::Right,
                },
                (ShapeKind::Triangle, Some(_), Some(_)) => MembershipFunction::Triangle {
                    left: centers[i - 1],
                    peak: c,
                    right: centers[i + 1],
                },
                (ShapeKind::Gaussian, Some(l), Some(r)) => MembershipFunction::Gaussian {
                    center: c,
                    sigma_left: half_crossing_sigma(l),
                    sigma_right: half_crossing_sigma(r),
                },
                (kind, _, _) => {
                    return Err(FuzzyError::InvalidVariable(format!(
                        "{name}: {kind:?} not allowed for label {}",
                        LinguisticLabel::ALL[i]
                    )))
                }
            };
        }
        let var = FuzzyVariable { name, gain, sets };
        var.validate()?;
        Ok(var)
    }

    /// Lateral deviation `e` in meters.
    pub fn deviation(gain: f64) -> Self {
        Self::from_layout("e", gain, DEFAULT_CENTERS, MIXED_SHAPES).expect("default layout")
    }

    /// Deviation rate `de` in meters per second.
    pub fn deviation_rate(gain: f64) -> Self {
        Self::from_layout("de", gain, DEFAULT_CENTERS, SMOOTH_SHAPES).expect("default layout")
    }

    /// Steering-wheel angle `u` in degrees.
    pub fn steering(gain: f64) -> Self {
        Self::from_layout("u", gain, DEFAULT_CENTERS, MIXED_SHAPES).expect("default layout")
    }

    pub fn set(&self, label: LinguisticLabel) -> &MembershipFunction {
        &self.sets[label.index()]
    }

    /// Physical value to the clamped normalized universe.
    pub fn normalize(&self, x: f64) -> f64 {
        (x / self.gain).clamp(-1.0, 1.0)
    }

    /// Membership degree of `x` (physical units) in each of the seven sets.
    pub fn fuzzify(&self, x: f64) -> [f64; 7] {
        let n = self.normalize(x);
        self.sets.map(|s| s.eval(n))
    }

    /// Checks crossing heights, coverage and mirror symmetry.
    pub fn validate(&self) -> Result<(), FuzzyError> {
        for i in 0..6 {
            let h = self.crossing_height(i);
            if !(CROSSING_BOUNDS.0..=CROSSING_BOUNDS.1).contains(&h) {
                return Err(FuzzyError::InvalidVariable(format!(
                    "{}: {} and {} cross at {h:.3}",
                    self.name,
                    LinguisticLabel::ALL[i],
                    LinguisticLabel::ALL[i + 1]
                )));
            }
        }
        for k in 0..=2000 {
            let x = -1.0 + k as f64 / 1000.0;
            let best = self.sets.iter().map(|s| s.eval(x)).fold(0.0, f64::max);
            if best < MIN_COVERAGE {
                return Err(FuzzyError::InvalidVariable(format!(
                    "{}: coverage gap at {x:.3}",
                    self.name
                )));
            }
        }
        for i in 0..7 {
            let a = self.sets[i];
            let b = self.sets[6 - i].mirrored();
            for k in 0..=200 {
                let x = -1.0 + k as f64 / 100.0;
                if (a.eval(x) - b.eval(x)).abs() > 1e-12 {
                    return Err(FuzzyError::InvalidVariable(format!(
                        "{}: sets are not mirror-symmetric",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Height at which set `i` and set `i + 1` intersect between their peaks.
    pub fn crossing_height(&self, i: usize) -> f64 {
        let (a, b) = (self.sets[i], self.sets[i + 1]);
        let (mut lo, mut hi) = (a.peak(), b.peak());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if a.eval(mid) > b.eval(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        0.5 * (a.eval(x) + b.eval(x))
    }
}
