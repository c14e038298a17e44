//! Counterclockwise stadium road: two straights joined by two semicircles.
//!
//! The lap starts at the origin heading along +x. The first semicircle is
//! centred at `(straight, R)`, the second at `(0, R)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TrackError {
    #[error("off-world: point ({x:.3}, {y:.3}) is {distance:.3} m from the centerline")]
    OffWorld { x: f64, y: f64, distance: f64 },
    #[error("invalid track parameter {field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StadiumTrack {
    /// Length of each straight, meters.
    pub straight: f64,
    /// Centerline length of each semicircle, meters.
    pub arc: f64,
    /// Road width, meters.
    pub width: f64,
}

impl Default for StadiumTrack {
    fn default() -> Self {
        StadiumTrack {
            straight: 200.0,
            arc: 157.0,
            width: 8.2,
        }
    }
}

/// Position of a point relative to the centerline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPose {
    /// Arc-length progress in `[0, total_length)`.
    pub s: f64,
    /// Signed lateral deviation; positive left of the travel direction.
    pub e: f64,
    /// Centerline heading at `s`, radians.
    pub heading: f64,
}

impl StadiumTrack {
    pub fn validate(&self) -> Result<(), TrackError> {
        for (field, v) in [
            ("straight", self.straight),
            ("arc", self.arc),
            ("width", self.width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(TrackError::InvalidParams {
                    field,
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
        }
        if self.radius() <= self.width / 2.0 {
            return Err(TrackError::InvalidParams {
                field: "width",
                reason: format!(
                    "half width must be below the arc radius {:.3}",
                    self.radius()
                ),
            });
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.arc / PI
    }

    pub fn total_length(&self) -> f64 {
        2.0 * self.straight + 2.0 * self.arc
    }

    pub fn half_width(&self) -> f64 {
        self.width / 2.0
    }

    /// Centerline `(x, y, heading)` at progress `s`, wrapped onto one lap.
    pub fn centerline_point(&self, s: f64) -> (f64, f64, f64) {
        let (l, a, r) = (self.straight, self.arc, self.radius());
        let s = s.rem_euclid(self.total_length());
        if s < l {
            (s, 0.0, 0.0)
        } else if s < l + a {
            let th = (s - l) / r;
            (l + r * th.sin(), r - r * th.cos(), th)
        } else if s < 2.0 * l + a {
            (l - (s - l - a), 2.0 * r, PI)
        } else {
            let th = (s - 2.0 * l - a) / r;
            (-r * th.sin(), r + r * th.cos(), PI + th)
        }
    }

    /// Point offset `e` along the left normal of the centerline at `s`.
    pub fn offset_point(&self, s: f64, e: f64) -> (f64, f64) {
        let (x, y, h) = self.centerline_point(s);
        (x - e * h.sin(), y + e * h.cos())
    }

    /// Nearest-segment projection; ties go to the candidate with the smaller |e|.
    pub fn project(&self, x: f64, y: f64) -> Result<TrackPose, TrackError> {
        let (l, a, r) = (self.straight, self.arc, self.radius());
        let total = self.total_length();
        let mut best: Option<TrackPose> = None;
        let mut consider = |pose: TrackPose| {
            if best.is_none_or(|b| pose.e.abs() < b.e.abs()) {
                best = Some(pose);
            }
        };
        if (0.0..=l).contains(&x) {
            consider(TrackPose {
                s: x,
                e: y,
                heading: 0.0,
            });
            consider(TrackPose {
                s: l + a + (l - x),
                e: 2.0 * r - y,
                heading: PI,
            });
        }
        if x >= l {
            let (dx, dy) = (x - l, y - r);
            let th = dy.atan2(dx) + FRAC_PI_2;
            consider(TrackPose {
                s: l + r * th,
                e: r - dx.hypot(dy),
                heading: th,
            });
        }
        if x <= 0.0 {
            let (dx, dy) = (x, y - r);
            let mut th = dy.atan2(dx) - FRAC_PI_2;
            if th < 0.0 {
                th += TAU;
            }
            consider(TrackPose {
                s: 2.0 * l + a + r * th,
                e: r - dx.hypot(dy),
                heading: PI + th,
            });
        }
        let Some(mut pose) = best else {
            return Err(TrackError::OffWorld {
                x,
                y,
                distance: f64::NAN,
            });
        };
        if pose.e.abs() > r + 10.0 * self.width || !pose.e.is_finite() {
            return Err(TrackError::OffWorld {
                x,
                y,
                distance: pose.e.abs(),
            });
        }
        pose.s = pose.s.rem_euclid(total);
        if pose.s >= total {
            pose.s = 0.0;
        }
        pose.heading = pose.heading.rem_euclid(TAU);
        Ok(pose)
    }

    /// Signed progress from `prev_s` to `cur_s`, unwrapped across the lap seam.
    pub fn progress_delta(&self, prev_s: f64, cur_s: f64) -> f64 {
        let total = self.total_length();
        let mut d = cur_s - prev_s;
        if d < -total / 2.0 {
            d += total;
        } else if d > total / 2.0 {
            d -= total;
        }
        d
    }

    /// Centerline and both edges sampled every `spacing` meters, closing the loop.
    pub fn polyline(&self, spacing: f64) -> Vec<PolylinePoint> {
        let n = (self.total_length() / spacing).ceil().max(4.0) as usize;
        let hw = self.half_width();
        (0..=n)
            .map(|k| {
                let s = self.total_length() * k as f64 / n as f64;
                let (x, y, heading) = self.centerline_point(s);
                let (left_x, left_y) = self.offset_point(s, hw);
                let (right_x, right_y) = self.offset_point(s, -hw);
                PolylinePoint {
                    s,
                    x,
                    y,
                    heading,
                    left_x,
                    left_y,
                    right_x,
                    right_y,
                }
            })
            .collect()
    }

    /// Writes [`polyline`](Self::polyline) as CSV with a header row.
    pub fn write_polyline<W: Write>(&self, spacing: f64, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in self.polyline(spacing) {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Backward-difference rate of the lateral deviation.
pub fn deviation_rate(prev: &TrackPose, cur: &TrackPose, dt: f64) -> f64 {
    (cur.e - prev.e) / dt
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolylinePoint {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub left_x: f64,
    pub left_y: f64,
    pub right_x: f64,
    pub right_y: f64,
}
