//! Observation encoding.
//!
//! Layout: `[ball x, y, vx, vy]`, then for each robot
//! `[x, y, sin θ, cos θ, vx, vy, vθ]` plus `ir` (0 or 1) for SSL. The agent
//! itself comes first, then its teammates and then the opponents, each group
//! by ascending id. `x` is scaled by half the field length, `y` by half the
//! width, velocities by the configured maxima, and every entry is clipped to
//! `[-OBS_CLIP, OBS_CLIP]`.

use crate::entities::{Ball, Field, Frame, League, Robot, Team};
use crate::physics::SimConfig;

pub const OBS_CLIP: f64 = 1.25;
pub const BALL_FEATURES: usize = 4;

pub fn robot_features(league: League) -> usize {
    match league {
        League::Vsss => 7,
        League::Ssl => 8,
    }
}

pub fn observation_size(league: League, n_robots: usize) -> usize {
    BALL_FEATURES + n_robots * robot_features(league)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObsNorm {
    pub half_length: f64,
    pub half_width: f64,
    pub robot_speed: f64,
    pub ball_speed: f64,
    /// deg/s
    pub yaw_rate: f64,
    pub with_ir: bool,
}

impl ObsNorm {
    pub fn new(field: &Field, config: &SimConfig) -> Self {
        // all wheels spinning the same way at the cap
        let yaw = field.wheel_radius * field.max_wheel_rad_s / (field.axle_length / 2.0);
        ObsNorm {
            half_length: field.length / 2.0,
            half_width: field.width / 2.0,
            robot_speed: field.max_robot_speed(),
            ball_speed: config.ball_speed_cap,
            yaw_rate: yaw.to_degrees(),
            with_ir: field.league == League::Ssl,
        }
    }
}

#[inline]
fn clip(v: f64) -> f64 {
    v.clamp(-OBS_CLIP, OBS_CLIP)
}

pub fn push_ball(out: &mut Vec<f64>, ball: &Ball, n: &ObsNorm) {
    out.extend([
        clip(ball.x / n.half_length),
        clip(ball.y / n.half_width),
        clip(ball.vx / n.ball_speed),
        clip(ball.vy / n.ball_speed),
    ]);
}

pub fn push_robot(out: &mut Vec<f64>, robot: &Robot, n: &ObsNorm) {
    let (s, c) = robot.theta.to_radians().sin_cos();
    out.extend([
        clip(robot.x / n.half_length),
        clip(robot.y / n.half_width),
        s,
        c,
        clip(robot.vx / n.robot_speed),
        clip(robot.vy / n.robot_speed),
        clip(robot.vtheta / n.yaw_rate),
    ]);
    if n.with_ir {
        out.push(if robot.ir { 1.0 } else { 0.0 });
    }
}

/// Observation of `frame` as seen by the robot `(team, id)`.
pub fn observe(frame: &Frame, team: Team, id: u32, n: &ObsNorm) -> Vec<f64> {
    let per_robot = if n.with_ir { 8 } else { 7 };
    let mut out = Vec::with_capacity(BALL_FEATURES + frame.robot_count() * per_robot);
    push_ball(&mut out, &frame.ball, n);
    let own = frame.team(team);
    if let Some(me) = own.get(&id) {
        push_robot(&mut out, me, n);
    }
    for r in own.values().filter(|r| r.id != id) {
        push_robot(&mut out, r, n);
    }
    for r in frame.team(team.opponent()).values() {
        push_robot(&mut out, r, n);
    }
    out
}
