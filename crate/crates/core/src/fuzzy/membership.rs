use serde::{Deserialize, Serialize};

/// Which way a shoulder saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Membership function over the normalized universe `[-1, 1]`.
///
/// Gaussians may carry a different width on each side of their center so that
/// every adjacent pair can cross at exactly one half, even when the center
/// spacing is uneven.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum MembershipFunction {
    Triangle {
        left: f64,
        peak: f64,
        right: f64,
    },
    Gaussian {
        center: f64,
        sigma_left: f64,
        sigma_right: f64,
    },
    Shoulder {
        center: f64,
        sigma: f64,
        side: Side,
    },
}

fn gauss(d: f64, sigma: f64) -> f64 {
    (-(d * d) / (2.0 * sigma * sigma)).exp()
}

impl MembershipFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MembershipFunction::Triangle { left, peak, right } => {
                if x <= left || x >= right {
                    0.0
                } else if x <= peak {
                    (x - left) / (peak - left)
                } else {
                    (right - x) / (right - peak)
                }
            }
            MembershipFunction::Gaussian {
                center,
                sigma_left,
                sigma_right,
            } => {
                let sigma = if x < center { sigma_left } else { sigma_right };
                gauss(x - center, sigma)
            }
            MembershipFunction::Shoulder {
                center,
                sigma,
                side,
            } => match side {
                Side::Left if x <= center => 1.0,
                Side::Right if x >= center => 1.0,
                _ => gauss(x - center, sigma),
            },
        }
    }

    /// Abscissa where membership is 1 (for shoulders, the start of the plateau).
    pub fn peak(&self) -> f64 {
        match *self {
            MembershipFunction::Triangle { peak, .. } => peak,
            MembershipFunction::Gaussian { center, .. } => center,
            MembershipFunction::Shoulder { center, .. } => center,
        }
    }

    /// The same function reflected about zero.
    pub fn mirrored(&self) -> Self {
        match *self {
            MembershipFunction::Triangle { left, peak, right } => MembershipFunction::Triangle {
                left: -right,
                peak: -peak,
                right: -left,
            },
            MembershipFunction::Gaussian {
                center,
                sigma_left,
                sigma_right,
            } => MembershipFunction::Gaussian {
                center: -center,
                sigma_left: sigma_right,
                sigma_right: sigma_left,
            },
            MembershipFunction::Shoulder {
                center,
                sigma,
                side,
            } => MembershipFunction::Shoulder {
                center: -center,
                sigma,
                side: match side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                },
            },
        }
    }
}
