//! Deterministic fixed-timestep 2D physics for VSSS and SSL robots.
//!
//! One call to [`Simulator::step`] advances exactly one control period
//! (`control_dt`), split into `substeps` semi-implicit Euler substeps. Each
//! substep runs, in order: drive tracking and integration, ball rolling,
//! collision resolution (robot–robot, robot–wall, robot–ball, ball–wall),
//! then dribbler holds. Kicks fire once, before the first substep.
//!
//! The [`Frame`] is the whole state: stepping from a frame that was saved and
//! reloaded produces exactly the same future as stepping the original.

mod ball;
mod collision;
mod devices;
mod kinematics;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::entities::{normalize_angle_deg, Ball, Field, Frame, League, Robot, Team};
use crate::error::{Error, Result};

pub use ball::integrate_ball;
pub use collision::resolve_collisions;
pub use devices::{apply_dribbler, apply_kick, hold_point, ir_sense};
pub use kinematics::{
    clamp_wheels, diff_drive_body_velocity, local_to_world, omni_wheel_saturation, omni_wheel_speeds,
    omni_wheel_speeds_into, world_to_local, Twist,
};

use collision::Walls;
use devices::{in_kick_zone, kicked_velocity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Command period in seconds.
    pub control_dt: f64,
    /// Physics substeps per control step.
    pub substeps: u32,
    pub restitution_robot_ball: f64,
    pub restitution_wall_ball: f64,
    /// Also used for robot–wall contacts.
    pub restitution_robot_robot: f64,
    /// Rolling friction, m/s².
    pub ball_deceleration: f64,
    pub ball_speed_cap: f64,
    /// Time constant of the first-order lag between commanded and actual body velocity.
    pub motor_time_constant: f64,
    /// How far past contact the kick zone reaches, meters.
    pub kick_zone_depth: f64,
    /// Degrees either side of the heading.
    pub kick_zone_half_angle: f64,
    pub dribbler_hold_speed_cap: f64,
    /// Robots may drive into the goal pockets.
    pub robots_enter_goals: bool,
    /// Closes the goal mouths for every body (containment tests).
    pub close_goal_mouths: bool,
    pub rng_seed: u64,
}

impl SimConfig {
    pub fn vsss() -> Self {
        SimConfig {
            control_dt: 0.025,
            substeps: 5,
            restitution_robot_ball: 0.5,
            restitution_wall_ball: 0.7,
            restitution_robot_robot: 0.0,
            ball_deceleration: 0.6,
            ball_speed_cap: 8.0,
            motor_time_constant: 0.05,
            kick_zone_depth: 0.01,
            kick_zone_half_angle: 15.0,
            dribbler_hold_speed_cap: 1.5,
            robots_enter_goals: false,
            close_goal_mouths: false,
            rng_seed: 0,
        }
    }

    pub fn ssl() -> Self {
        SimConfig {
            ball_deceleration: 0.35,
            ..Self::vsss()
        }
    }

    pub fn for_league(league: League) -> Self {
        match league {
            League::Vsss => Self::vsss(),
            League::Ssl => Self::ssl(),
        }
    }

    pub fn substep_dt(&self) -> f64 {
        self.control_dt / self.substeps as f64
    }

    /// Number of control steps covering `seconds`.
    pub fn steps_for(&self, seconds: f64) -> u64 {
        (seconds / self.control_dt).round() as u64
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        if !(self.control_dt.is_finite() && self.control_dt > 0.0) {
            return Err(Error::Config("control_dt must be positive".into()));
        }
        if self.substeps == 0 {
            return Err(Error::Config("substeps must be at least 1".into()));
        }
        unit("restitution_robot_ball", self.restitution_robot_ball)?;
        unit("restitution_wall_ball", self.restitution_wall_ball)?;
        unit("restitution_robot_robot", self.restitution_robot_robot)?;
        for (name, v) in [
            ("ball_deceleration", self.ball_deceleration),
            ("kick_zone_depth", self.kick_zone_depth),
            ("kick_zone_half_angle", self.kick_zone_half_angle),
            ("dribbler_hold_speed_cap", self.dribbler_hold_speed_cap),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (name, v) in [
            ("ball_speed_cap", self.ball_speed_cap),
            ("motor_time_constant", self.motor_time_constant),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// How a robot is driven during one control step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Per-wheel targets in rad/s, clamped per wheel. Differential drive only.
    Wheels(Vec<f64>),
    /// World-frame velocity (m/s) and angular rate (deg/s), saturated through
    /// the omni wheel limits. Omnidirectional robots only.
    Velocity { vx: f64, vy: f64, vtheta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotCommand {
    pub team: Team,
    pub id: u32,
    pub drive: Drive,
    pub kick_power: f64,
    pub dribbler_on: bool,
}

impl RobotCommand {
    pub fn wheels(team: Team, id: u32, left: f64, right: f64) -> Self {
        RobotCommand { team, id, drive: Drive::Wheels(vec![left, right]), kick_power: 0.0, dribbler_on: false }
    }

    pub fn velocity(team: Team, id: u32, vx: f64, vy: f64, vtheta: f64) -> Self {
        RobotCommand {
            team,
            id,
            drive: Drive::Velocity { vx, vy, vtheta },
            kick_power: 0.0,
            dribbler_on: false,
        }
    }

    pub fn with_kick(mut self, power: f64) -> Self {
        self.kick_power = power;
        self
    }

    pub fn with_dribbler(mut self, on: bool) -> Self {
        self.dribbler_on = on;
        self
    }

    fn validate(&self, field: &Field) -> Result<()> {
        let nan = match &self.drive {
            Drive::Wheels(w) => w.iter().any(|v| !v.is_finite()),
            Drive::Velocity { vx, vy, vtheta } => ![vx, vy, vtheta].iter().all(|v| v.is_finite()),
        };
        if nan || !self.kick_power.is_finite() {
            return Err(Error::Command(format!("{} robot {}: non-finite command", self.team, self.id)));
        }
        if !(0.0..=1.0).contains(&self.kick_power) {
            return Err(Error::Command(format!(
                "{} robot {}: kick power {} outside [0, 1]",
                self.team, self.id, self.kick_power
            )));
        }
        match (&self.drive, field.league) {
            (Drive::Wheels(w), League::Vsss) if w.len() == 2 => Ok(()),
            (Drive::Wheels(w), League::Vsss) => Err(Error::Command(format!(
                "{} robot {}: expected 2 wheel targets, got {}",
                self.team,
                self.id,
                w.len()
            ))),
            (Drive::Velocity { .. }, League::Ssl) => Ok(()),
            _ => Err(Error::Command(format!(
                "{} robot {}: drive mode does not match the {:?} robot model",
                self.team, self.id, field.league
            ))),
        }
    }
}

/// Working copy of a robot during a control step.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Body {
    x: f64,
    y: f64,
    /// degrees
    theta: f64,
    vx: f64,
    vy: f64,
    /// degrees per second
    vtheta: f64,
    /// position at the start of the substep
    px: f64,
    py: f64,
}

impl Body {
    fn from_robot(r: &Robot) -> Self {
        Body { x: r.x, y: r.y, theta: r.theta, vx: r.vx, vy: r.vy, vtheta: r.vtheta, px: r.x, py: r.y }
    }

    fn write_pose(&self, r: &mut Robot) {
        r.x = self.x;
        r.y = self.y;
        r.theta = self.theta;
        r.vx = self.vx;
        r.vy = self.vy;
        r.vtheta = self.vtheta;
    }

    fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct BallBody {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    px: f64,
    py: f64,
}

impl BallBody {
    fn from_ball(b: &Ball) -> Self {
        BallBody { x: b.x, y: b.y, vx: b.vx, vy: b.vy, px: b.x, py: b.y }
    }

    fn to_ball(self) -> Ball {
        Ball { x: self.x, y: self.y, vx: self.vx, vy: self.vy }
    }
}

#[derive(Debug, Clone, Copy)]
enum Target {
    /// Forward speed (m/s) and yaw rate (deg/s) in the body frame.
    Differential { v: f64, vtheta: f64 },
    /// Fixed world-frame velocity for the whole control step.
    World { vx: f64, vy: f64, vtheta: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Actuation {
    target: Target,
    kick_power: f64,
    dribble: bool,
    /// Kicked this control step; no dribbler hold until the next one.
    released: bool,
}

/// A single simulator instance. Not shareable between threads, but movable,
/// and any number of instances can run side by side.
#[derive(Debug, Clone)]
pub struct Simulator {
    field: Field,
    config: SimConfig,
    frame: Frame,
    walls: Walls,
    bodies: Vec<Body>,
    actuation: Vec<Actuation>,
}

impl Simulator {
    pub fn new(field: Field, config: SimConfig, frame: Frame) -> Result<Self> {
        field.validate()?;
        config.validate()?;
        let walls = Walls::build(&field, &config);
        let mut sim = Simulator {
            field,
            config,
            frame: Frame::new(Ball::default()),
            walls,
            bodies: Vec::new(),
            actuation: Vec::new(),
        };
        sim.load(frame)?;
        Ok(sim)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn into_frame(self) -> Frame {
        self.frame
    }

    /// Replaces the state. Headings are normalized and IR flags recomputed;
    /// step counter and time are kept from the frame.
    pub fn load(&mut self, mut frame: Frame) -> Result<()> {
        let wheels = self.field.wheel_count();
        for (team, map) in [(Team::Blue, &mut frame.robots_blue), (Team::Yellow, &mut frame.robots_yellow)] {
            for (&id, robot) in map.iter_mut() {
                if robot.id != id || robot.team != team {
                    return Err(Error::Config(format!(
                        "robot stored under ({team}, {id}) claims to be ({}, {})",
                        robot.team, robot.id
                    )));
                }
                let finite = [robot.x, robot.y, robot.vx, robot.vy, robot.vtheta]
                    .iter()
                    .all(|v| v.is_finite());
                if !finite {
                    return Err(Error::Config(format!("({team}, {id}) has a non-finite state")));
                }
                robot.theta = normalize_angle_deg(robot.theta)?;
                robot.wheel_speeds.resize(wheels, 0.0);
            }
        }
        let b = frame.ball;
        if ![b.x, b.y, b.vx, b.vy].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("ball has a non-finite state".into()));
        }
        self.frame = frame;
        self.refresh_ir();
        Ok(())
    }

    fn refresh_ir(&mut self) {
        let (bx, by) = (self.frame.ball.x, self.frame.ball.y);
        let (field, config) = (&self.field, &self.config);
        for r in self.frame.robots_blue.values_mut().chain(self.frame.robots_yellow.values_mut()) {
            r.ir = in_kick_zone(r.x, r.y, r.theta, bx, by, field, config);
        }
    }

    /// Advances one control period. Robots without a command coast with zero targets.
    pub fn step(&mut self, commands: &[RobotCommand]) -> Result<&Frame> {
        self.apply_commands(commands)?;
        self.integrate();
        Ok(&self.frame)
    }

    fn apply_commands(&mut self, commands: &[RobotCommand]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for cmd in commands {
            if !seen.insert((cmd.team, cmd.id)) {
                return Err(Error::Command(format!("duplicate command for ({}, {})", cmd.team, cmd.id)));
            }
            self.frame.robot(cmd.team, cmd.id)?;
            cmd.validate(&self.field)?;
        }

        let field = &self.field;
        self.actuation.clear();
        for robot in self.frame.robots_blue.values_mut().chain(self.frame.robots_yellow.values_mut()) {
            let cmd = commands.iter().find(|c| c.team == robot.team && c.id == robot.id);
            let (kick_power, dribble) = cmd.map_or((0.0, false), |c| (c.kick_power, c.dribbler_on));
            let target = match (field.league, cmd.map(|c| &c.drive)) {
                (League::Vsss, drive) => {
                    let (l, r) = match drive {
                        Some(Drive::Wheels(w)) => (w[0], w[1]),
                        _ => (0.0, 0.0),
                    };
                    robot.wheel_speeds.clear();
                    robot.wheel_speeds.extend([l, r]);
                    clamp_wheels(&mut robot.wheel_speeds, field.max_wheel_rad_s);
                    let (v, omega) = diff_drive_body_velocity(
                        robot.wheel_speeds[0],
                        robot.wheel_speeds[1],
                        field.wheel_radius,
                        field.axle_length,
                    );
                    Target::Differential { v, vtheta: omega.to_degrees() }
                }
                (League::Ssl, drive) => {
                    let (vx, vy, vtheta) = match drive {
                        Some(Drive::Velocity { vx, vy, vtheta }) => (*vx, *vy, *vtheta),
                        _ => (0.0, 0.0, 0.0),
                    };
                    let heading = robot.theta.to_radians();
                    let (lx, ly) = world_to_local(vx, vy, heading);
                    let twist = omni_wheel_saturation(Twist { vx: lx, vy: ly, omega: vtheta.to_radians() }, field);
                    robot.wheel_speeds.resize(field.wheel_count(), 0.0);
                    omni_wheel_speeds_into(twist, field, &mut robot.wheel_speeds);
                    let (wx, wy) = local_to_world(twist.vx, twist.vy, heading);
                    Target::World { vx: wx, vy: wy, vtheta: twist.omega.to_degrees() }
                }
            };
            robot.kick_power = kick_power;
            robot.dribbler_on = dribble;
            self.actuation.push(Actuation { target, kick_power, dribble, released: false });
        }
        Ok(())
    }

    fn integrate(&mut self) {
        let field = &self.field;
        let config = &self.config;
        let dt = config.substep_dt();
        let alpha = (dt / config.motor_time_constant).min(1.0);

        self.bodies.clear();
        self.bodies.extend(self.frame.robots().map(Body::from_robot));
        let bodies = &mut self.bodies;
        let mut ball = BallBody::from_ball(&self.frame.ball);

        // Kicks use the state at the start of the control step. A robot that
        // kicked does not hold the ball again until the next control step.
        for (body, act) in bodies.iter().zip(self.actuation.iter_mut()) {
            if act.kick_power > 0.0 && in_kick_zone(body.x, body.y, body.theta, ball.x, ball.y, field, config) {
                let (vx, vy) = kicked_velocity(ball.vx, ball.vy, body.theta, act.kick_power * field.max_kick_speed);
                ball.vx = vx;
                ball.vy = vy;
                act.released = true;
            }
        }

        for _ in 0..config.substeps {
            for (body, act) in bodies.iter_mut().zip(&self.actuation) {
                let (tvx, tvy, tvtheta) = match act.target {
                    Target::Differential { v, vtheta } => {
                        let (s, c) = body.theta.to_radians().sin_cos();
                        (v * c, v * s, vtheta)
                    }
                    Target::World { vx, vy, vtheta } => (vx, vy, vtheta),
                };
                body.vx += (tvx - body.vx) * alpha;
                body.vy += (tvy - body.vy) * alpha;
                body.vtheta += (tvtheta - body.vtheta) * alpha;
                body.px = body.x;
                body.py = body.y;
                body.x += body.vx * dt;
                body.y += body.vy * dt;
                body.theta = wrap_degrees(body.theta + body.vtheta * dt);
            }

            ball.px = ball.x;
            ball.py = ball.y;
            ball::integrate_in_place(&mut ball.x, &mut ball.y, &mut ball.vx, &mut ball.vy, dt, config.ball_deceleration);

            collision::resolve_all(bodies, &mut ball, &self.walls, field, config);

            for (body, act) in bodies.iter().zip(&self.actuation) {
                if !act.dribble || act.released || body.speed() > config.dribbler_hold_speed_cap {
                    continue;
                }
                if in_kick_zone(body.x, body.y, body.theta, ball.x, ball.y, field, config) {
                    let (hx, hy) = hold_point(body.x, body.y, body.theta, field, config);
                    ball.x = hx;
                    ball.y = hy;
                    ball.vx = body.vx;
                    ball.vy = body.vy;
                    // keep the held ball on the robot's side of every wall
                    ball.px = body.x;
                    ball.py = body.y;
                    collision::ball_vs_walls(&mut ball, &self.walls, field, config);
                    break;
                }
            }

            let speed = ball.vx.hypot(ball.vy);
            if speed > config.ball_speed_cap {
                let k = config.ball_speed_cap / speed;
                ball.vx *= k;
                ball.vy *= k;
            }
        }

        let frame = &mut self.frame;
        for (body, robot) in bodies
            .iter()
            .zip(frame.robots_blue.values_mut().chain(frame.robots_yellow.values_mut()))
        {
            body.write_pose(robot);
        }
        frame.ball = ball.to_ball();
        frame.step_count += 1;
        frame.sim_time = frame.step_count as f64 * config.control_dt;
        self.refresh_ir();
    }
}

#[inline]
fn wrap_degrees(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Pure form of [`Simulator::step`]: the frame after one control period.
pub fn step(frame: &Frame, commands: &[RobotCommand], config: &SimConfig, field: &Field) -> Result<Frame> {
    let mut sim = Simulator::new(field.clone(), config.clone(), frame.clone())?;
    sim.step(commands)?;
    Ok(sim.into_frame())
}
