//! Drive kinematics for differential-drive (VSSS) and omnidirectional (SSL) robots.

use crate::entities::Field;

/// Body twist in the robot frame: forward speed, lateral speed (m/s) and yaw rate (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

/// Clamps every wheel target to `[-max, max]`.
pub fn clamp_wheels(wheels: &mut [f64], max: f64) {
    for w in wheels {
        *w = w.clamp(-max, max);
    }
}

/// Forward kinematics of a differential drive from (left, right) wheel speeds in rad/s.
/// Returns forward speed in m/s and yaw rate in rad/s (counter-clockwise positive).
pub fn diff_drive_body_velocity(left: f64, right: f64, wheel_radius: f64, axle: f64) -> (f64, f64) {
    let v = wheel_radius * (left + right) / 2.0;
    let omega = wheel_radius * (right - left) / axle;
    (v, omega)
}

/// Speed of omni wheel `i` mounted at `angle` (radians from the forward axis).
#[inline]
fn omni_wheel_speed(angle: f64, twist: Twist, lever: f64, wheel_radius: f64) -> f64 {
    (-angle.sin() * twist.vx + angle.cos() * twist.vy + lever * twist.omega) / wheel_radius
}

/// Wheel speeds (rad/s) implied by a robot-frame twist, written into `out`.
pub fn omni_wheel_speeds_into(twist: Twist, field: &Field, out: &mut [f64]) {
    let lever = field.axle_length / 2.0;
    for (w, angle) in out.iter_mut().zip(&field.wheel_angles_deg) {
        *w = omni_wheel_speed(angle.to_radians(), twist, lever, field.wheel_radius);
    }
}

pub fn omni_wheel_speeds(twist: Twist, field: &Field) -> Vec<f64> {
    let mut out = vec![0.0; field.wheel_angles_deg.len()];
    omni_wheel_speeds_into(twist, field, &mut out);
    out
}

/// Scales a requested twist uniformly so no implied wheel speed exceeds the
/// motor limit. Twists already within limits come back untouched.
pub fn omni_wheel_saturation(twist: Twist, field: &Field) -> Twist {
    let lever = field.axle_length / 2.0;
    let peak = field
        .wheel_angles_deg
        .iter()
        .map(|a| omni_wheel_speed(a.to_radians(), twist, lever, field.wheel_radius).abs())
        .fold(0.0, f64::max);
    if peak <= field.max_wheel_rad_s {
        return twist;
    }
    let k = field.max_wheel_rad_s / peak;
    Twist {
        vx: twist.vx * k,
        vy: twist.vy * k,
        omega: twist.omega * k,
    }
}

/// Rotates a world-frame vector into the frame of a robot with heading `theta` (radians).
#[inline]
pub fn world_to_local(vx: f64, vy: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c * vx + s * vy, -s * vx + c * vy)
}

#[inline]
pub fn local_to_world(vx: f64, vy: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (c * vx - s * vy, s * vx + c * vy)
}
