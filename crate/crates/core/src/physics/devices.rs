//! Kicker, dribbler and the IR ball-contact sensor. All three share the same
//! kick-zone predicate.

use crate::entities::{Ball, Field, Frame, Robot};
use crate::error::{Error, Result};

use super::SimConfig;

/// Slack on the closed kick-zone bounds so placements exactly on the edge
/// survive rounding in the trigonometry.
const ANGLE_EPS: f64 = 1e-9;
const DIST_EPS: f64 = 1e-12;

/// Ball inside the kick zone of a robot at `(rx, ry)` facing `theta_deg`.
///
/// The front face is the plane tangent to the robot's nose; the gap is
/// measured from that plane to the nearest point of the ball.
#[inline]
pub(crate) fn in_kick_zone(
    rx: f64,
    ry: f64,
    theta_deg: f64,
    bx: f64,
    by: f64,
    field: &Field,
    config: &SimConfig,
) -> bool {
    let (s, c) = theta_deg.to_radians().sin_cos();
    let dx = bx - rx;
    let dy = by - ry;
    let along = dx * c + dy * s;
    let lateral = -dx * s + dy * c;
    let front_gap = along - field.robot_radius - field.ball_radius;
    if front_gap > config.kick_zone_depth + DIST_EPS {
        return false;
    }
    let bearing = lateral.atan2(along).abs();
    bearing <= config.kick_zone_half_angle.to_radians() + ANGLE_EPS
}

/// Where a held ball sits: half the zone depth in front of the robot face.
#[inline]
pub fn hold_point(rx: f64, ry: f64, theta_deg: f64, field: &Field, config: &SimConfig) -> (f64, f64) {
    let (s, c) = theta_deg.to_radians().sin_cos();
    let reach = field.robot_radius + field.ball_radius + config.kick_zone_depth / 2.0;
    (rx + c * reach, ry + s * reach)
}

/// New ball velocity after a kick along `theta_deg`: the component along the
/// heading is raised to `kick_speed` if it was smaller.
#[inline]
pub(crate) fn kicked_velocity(vx: f64, vy: f64, theta_deg: f64, kick_speed: f64) -> (f64, f64) {
    let (s, c) = theta_deg.to_radians().sin_cos();
    let along = vx * c + vy * s;
    if along >= kick_speed {
        return (vx, vy);
    }
    let boost = kick_speed - along;
    (vx + boost * c, vy + boost * s)
}

pub fn ir_sense(robot: &Robot, ball: &Ball, field: &Field, config: &SimConfig) -> bool {
    in_kick_zone(robot.x, robot.y, robot.theta, ball.x, ball.y, field, config)
}

pub fn apply_kick(frame: &Frame, robot: &Robot, kick_power: f64, field: &Field, config: &SimConfig) -> Result<Frame> {
    if !(0.0..=1.0).contains(&kick_power) {
        return Err(Error::Command(format!("kick power {kick_power} outside [0, 1]")));
    }
    let mut out = frame.clone();
    if kick_power > 0.0 && ir_sense(robot, &frame.ball, field, config) {
        let (vx, vy) = kicked_velocity(
            frame.ball.vx,
            frame.ball.vy,
            robot.theta,
            kick_power * field.max_kick_speed,
        );
        out.ball.vx = vx;
        out.ball.vy = vy;
    }
    Ok(out)
}

/// Pins the ball to the robot's hold point when the dribbler is on, the ball
/// is in the kick zone and the robot is not faster than the hold cap.
pub fn apply_dribbler(frame: &Frame, robot: &Robot, field: &Field, config: &SimConfig) -> Frame {
    let mut out = frame.clone();
    if robot.dribbler_on
        && robot.speed() <= config.dribbler_hold_speed_cap
        && ir_sense(robot, &frame.ball, field, config)
    {
        let (x, y) = hold_point(robot.x, robot.y, robot.theta, field, config);
        out.ball = Ball { x, y, vx: robot.vx, vy: robot.vy };
    }
    out
}
