//! Constant-speed kinematic bicycle driven by a steering-wheel angle command.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VehicleError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid vehicle parameter {field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// Meters.
    pub wheelbase: f64,
    /// Steering-wheel degrees per road-wheel degree.
    pub steering_ratio: f64,
    /// Road-wheel degrees.
    pub max_wheel_angle: f64,
    /// Meters per second, held constant.
    pub speed: f64,
    /// Road-wheel degrees per second.
    pub steer_rate: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            wheelbase: 2.7,
            // A 75 degree wheel setpoint then holds the default 157 m semicircle:
            // atan(2.7 / (157 / pi)) = 3.093 road-wheel degrees.
            steering_ratio: 24.25,
            max_wheel_angle: 30.0,
            speed: 10.0,
            steer_rate: 30.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), VehicleError> {
        let fields = [
            ("wheelbase", self.wheelbase),
            ("steering_ratio", self.steering_ratio),
            ("max_wheel_angle", self.max_wheel_angle),
            ("speed", self.speed),
            ("steer_rate", self.steer_rate),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(VehicleError::InvalidParams {
                    field,
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
        }
        if self.max_wheel_angle >= 90.0 {
            return Err(VehicleError::InvalidParams {
                field: "max_wheel_angle",
                reason: "must be below 90 degrees".into(),
            });
        }
        Ok(())
    }

    /// Road-wheel angle (degrees) reached in steady state for a steering-wheel command.
    pub fn wheel_target(&self, steering_wheel: f64) -> f64 {
        (steering_wheel / self.steering_ratio).clamp(-self.max_wheel_angle, self.max_wheel_angle)
    }

    /// Path curvature (1/m) for a steering-wheel command held long enough to settle.
    pub fn curvature_for(&self, steering_wheel: f64) -> f64 {
        self.wheel_target(steering_wheel).to_radians().tan() / self.wheelbase
    }
}

/// Pose and actuator state. Positive `delta` turns the vehicle left
/// (counterclockwise heading change).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Radians, counterclockwise from +x.
    pub psi: f64,
    /// Road-wheel degrees.
    pub delta: f64,
    pub t: f64,
}

impl VehicleState {
    pub fn at_pose(x: f64, y: f64, psi: f64) -> Self {
        VehicleState {
            x,
            y,
            psi,
            delta: 0.0,
            t: 0.0,
        }
    }

    /// Advances by `dt`: the road wheel slews toward the commanded angle at the
    /// rate limit, then the pose is integrated with RK4 holding that angle.
    pub fn step(
        &self,
        p: &VehicleParams,
        steering_wheel_cmd: f64,
        dt: f64,
    ) -> Result<Self, VehicleError> {
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(VehicleError::InvalidState(format!(
                "dt must lie in (0, 0.1], got {dt}"
            )));
        }
        let finite = [
            self.x,
            self.y,
            self.psi,
            self.delta,
            self.t,
            steering_wheel_cmd,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(VehicleError::InvalidState(
                "non-finite state or command".into(),
            ));
        }
        let max_step = p.steer_rate * dt;
        let target = p.wheel_target(steering_wheel_cmd);
        let delta = (self.delta + (target - self.delta).clamp(-max_step, max_step))
            .clamp(-p.max_wheel_angle, p.max_wheel_angle);

        let v = p.speed;
        let yaw_rate = v / p.wheelbase * delta.to_radians().tan();
        let f = |psi: f64| (v * psi.cos(), v * psi.sin());
        let (k1x, k1y) = f(self.psi);
        let (k2x, k2y) = f(self.psi + 0.5 * dt * yaw_rate);
        let (k3x, k3y) = (k2x, k2y);
        let (k4x, k4y) = f(self.psi + dt * yaw_rate);
        Ok(VehicleState {
            x: self.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            y: self.y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            psi: self.psi + dt * yaw_rate,
            delta,
            t: self.t + dt,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn settle(p: &VehicleParams, delta: f64) -> VehicleState {
        VehicleState {
            delta,
            ..VehicleState::default()
        }
        .step(p, delta * p.steering_ratio, 0.01)
        .map(|s| VehicleState {
            x: 0.0,
            y: 0.0,
            psi: 0.0,
            t: 0.0,
            ..s
        })
        .unwrap()
    }

    #[test]
    fn straight_line_one_second() {
        let p = VehicleParams::default();
        let mut s = VehicleState::default();
        for _ in 0..100 {
            s = s.step(&p, 0.0, 0.01).unwrap();
        }
        assert!((s.x - 10.0).abs() < 1e-9);
        assert_eq!(s.y, 0.0);
        assert_eq!(s.psi, 0.0);
        assert!((s.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_speed_only_slews() {
        let p = VehicleParams {
            speed: 0.0,
            ..Default::default()
        };
        let s = VehicleState::default().step(&p, 240.0, 0.1).unwrap();
        assert_eq!((s.x, s.y, s.psi), (0.0, 0.0, 0.0));
        assert!((s.delta - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slew_and_clamp() {
        let p = VehicleParams::default();
        let mut s = VehicleState::default();
        for _ in 0..500 {
            let n = s.step(&p, 10_000.0, 0.01).unwrap();
            assert!((n.delta - s.delta).abs() <= p.steer_rate * 0.01 + 1e-12);
            s = n;
        }
        assert_eq!(s.delta, p.max_wheel_angle);
    }

    #[test]
    fn circle_radius_and_closure() {
        let p = VehicleParams::default();
        let delta: f64 = 5.0;
        let radius = p.wheelbase / delta.to_radians().tan();
        let mut s = settle(&p, delta);
        let period = 2.0 * std::f64::consts::PI * radius / p.speed;
        // largest step <= 0.01 that divides the period evenly
        let steps = (period / 0.01).ceil() as usize;
        let dt = period / steps as f64;
        let (mut max_y, mut min_y) = (f64::MIN, f64::MAX);
        for _ in 0..steps {
            s = s.step(&p, delta * p.steering_ratio, dt).unwrap();
            max_y = max_y.max(s.y);
            min_y = min_y.min(s.y);
        }
        let diameter = max_y - min_y;
        assert!((diameter / 2.0 - radius).abs() / radius < 1e-3);
        assert!(s.x.hypot(s.y) < 1e-3, "closure {}", s.x.hypot(s.y));
    }

    #[test]
    fn rk4_converges_at_high_order() {
        let p = VehicleParams::default();
        let run = |dt: f64| {
            let mut s = settle(&p, 12.0);
            let n = (1.0 / dt).round() as usize;
            for _ in 0..n {
                s = s.step(&p, 12.0 * p.steering_ratio, dt).unwrap();
            }
            (s.x, s.y)
        };
        // exact arc for comparison
        let r = p.wheelbase / 12f64.to_radians().tan();
        let th = p.speed / r;
        let exact = (r * th.sin(), r * (1.0 - th.cos()));
        let err = |a: (f64, f64)| (a.0 - exact.0).hypot(a.1 - exact.1);
        let (e1, e2) = (err(run(0.1)), err(run(0.05)));
        assert!(e1 > 0.0);
        let order = (e1 / e2).log2();
        assert!(order >= 3.5, "order {order}");
    }

    #[test]
    fn rejects_bad_input() {
        let p = VehicleParams::default();
        let s = VehicleState::default();
        assert!(s.step(&p, f64::NAN, 0.01).is_err());
        assert!(s.step(&p, 0.0, 0.2).is_err());
        assert!(s.step(&p, 0.0, 0.0).is_err());
        let bad = VehicleParams {
            wheelbase: 0.0,
            ..p
        };
        assert!(matches!(
            bad.validate(),
            Err(VehicleError::InvalidParams {
                field: "wheelbase",
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn deterministic_and_rate_limited(cmds in proptest::collection::vec(-400.0f64..400.0, 1..50)) {
            let p = VehicleParams::default();
            let (mut a, mut b) = (VehicleState::default(), VehicleState::default());
            for c in cmds {
                let n = a.step(&p, c, 0.01).unwrap();
                prop_assert!((n.delta - a.delta).abs() <= p.steer_rate * 0.01 + 1e-12);
                a = n;
                b = b.step(&p, c, 0.01).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }
}
