//! Shared state structures: ball, robots, frames and field geometry.
//!
//! Positions are in meters with the field center as origin and +x pointing
//! at the yellow goal. Robot heading and angular speed are expressed in
//! degrees here; the physics converts to radians internally.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Blue,
    Yellow,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Blue => Team::Yellow,
            Team::Yellow => Team::Blue,
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Team::Blue => f.write_str("blue"),
            Team::Yellow => f.write_str("yellow"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ball {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl Ball {
    pub fn at(x: f64, y: f64) -> Self {
        Ball { x, y, vx: 0.0, vy: 0.0 }
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Robot {
    pub id: u32,
    pub team: Team,
    pub x: f64,
    pub y: f64,
    /// Heading in degrees, `[0, 360)`.
    pub theta: f64,
    pub vx: f64,
    pub vy: f64,
    /// Angular speed in degrees per second.
    pub vtheta: f64,
    /// Per-wheel angular speed targets in rad/s (2 wheels for VSSS, 4 for SSL).
    pub wheel_speeds: Vec<f64>,
    /// Ball touches the kicking device.
    pub ir: bool,
    pub kick_power: f64,
    pub dribbler_on: bool,
}

impl Robot {
    pub fn new(team: Team, id: u32, x: f64, y: f64, theta: f64, n_wheels: usize) -> Self {
        Robot {
            id,
            team,
            x,
            y,
            theta: normalize_angle_deg(theta).unwrap_or(0.0),
            vx: 0.0,
            vy: 0.0,
            vtheta: 0.0,
            wheel_speeds: vec![0.0; n_wheels],
            ir: false,
            kick_power: 0.0,
            dribbler_on: false,
        }
    }

    pub fn key(&self) -> (Team, u32) {
        (self.team, self.id)
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }
}

/// Complete simulator state at one control step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frame {
    pub ball: Ball,
    pub robots_blue: BTreeMap<u32, Robot>,
    pub robots_yellow: BTreeMap<u32, Robot>,
    pub step_count: u64,
    pub sim_time: f64,
}

impl Frame {
    pub fn new(ball: Ball) -> Self {
        Frame {
            ball,
            robots_blue: BTreeMap::new(),
            robots_yellow: BTreeMap::new(),
            step_count: 0,
            sim_time: 0.0,
        }
    }

    /// Inserts a robot, replacing any robot with the same team and id.
    pub fn insert(&mut self, robot: Robot) {
        self.team_mut(robot.team).insert(robot.id, robot);
    }

    pub fn with_robot(mut self, robot: Robot) -> Self {
        self.insert(robot);
        self
    }

    pub fn team(&self, team: Team) -> &BTreeMap<u32, Robot> {
        match team {
            Team::Blue => &self.robots_blue,
            Team::Yellow => &self.robots_yellow,
        }
    }

    pub fn team_mut(&mut self, team: Team) -> &mut BTreeMap<u32, Robot> {
        match team {
            Team::Blue => &mut self.robots_blue,
            Team::Yellow => &mut self.robots_yellow,
        }
    }

    pub fn robot(&self, team: Team, id: u32) -> Result<&Robot> {
        self.team(team).get(&id).ok_or(Error::RobotNotFound { team, id })
    }

    pub fn robot_mut(&mut self, team: Team, id: u32) -> Result<&mut Robot> {
        self.team_mut(team)
            .get_mut(&id)
            .ok_or(Error::RobotNotFound { team, id })
    }

    /// Blue robots by ascending id, then yellow robots by ascending id.
    pub fn robots(&self) -> impl Iterator<Item = &Robot> {
        self.robots_blue.values().chain(self.robots_yellow.values())
    }

    pub fn robot_count(&self) -> usize {
        self.robots_blue.len() + self.robots_yellow.len()
    }
}

/// Looks up a robot by team color and id.
pub fn get_robot(frame: &Frame, team: Team, id: u32) -> Result<Robot> {
    frame.robot(team, id).cloned()
}

/// Maps any finite angle in degrees into `[0, 360)`.
pub fn normalize_angle_deg(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("angle {a} is not finite")));
    }
    let r = a.rem_euclid(360.0);
    // rem_euclid rounds tiny negative inputs up to exactly 360.0
    Ok(if r >= 360.0 { 0.0 } else { r })
}

/// Closed containment test against the field lines.
pub fn field_contains(field: &Field, x: f64, y: f64) -> bool {
    x.abs() <= field.length / 2.0 && y.abs() <= field.width / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum League {
    #[serde(rename = "VSSS")]
    Vsss,
    #[serde(rename = "SSL")]
    Ssl,
}

/// Static geometry and physical parameters of a league configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Field {
    pub league: League,
    pub length: f64,
    pub width: f64,
    pub goal_width: f64,
    pub goal_depth: f64,
    pub penalty_length: f64,
    pub penalty_width: f64,
    pub ball_radius: f64,
    pub robot_radius: f64,
    pub wheel_radius: f64,
    /// VSSS: distance between the two wheels. SSL: diameter of the circle
    /// the omni wheels sit on.
    pub axle_length: f64,
    /// Omni wheel mounting angles from the forward axis (SSL only).
    pub wheel_angles_deg: Vec<f64>,
    pub max_wheel_rad_s: f64,
    pub max_kick_speed: f64,
    /// Run-off area between the field lines and the enclosing walls.
    pub boundary_margin: f64,
    pub robot_mass: f64,
    pub ball_mass: f64,
    pub n_robots_blue: usize,
    pub n_robots_yellow: usize,
}

impl Field {
    pub fn vsss() -> Self {
        Field {
            league: League::Vsss,
            length: 1.5,
            width: 1.3,
            goal_width: 0.4,
            goal_depth: 0.1,
            penalty_length: 0.15,
            penalty_width: 0.7,
            ball_radius: 0.02135,
            robot_radius: 0.0375,
            wheel_radius: 0.026,
            axle_length: 0.075,
            wheel_angles_deg: Vec::new(),
            max_wheel_rad_s: 50.0,
            max_kick_speed: 0.0,
            boundary_margin: 0.0,
            robot_mass: 0.2,
            ball_mass: 0.046,
            n_robots_blue: 3,
            n_robots_yellow: 3,
        }
    }

    pub fn ssl() -> Self {
        Field {
            league: League::Ssl,
            length: 9.0,
            width: 6.0,
            goal_width: 1.0,
            goal_depth: 0.18,
            penalty_length: 1.0,
            penalty_width: 2.0,
            ball_radius: 0.0215,
            robot_radius: 0.09,
            wheel_radius: 0.0275,
            axle_length: 0.162,
            wheel_angles_deg: vec![60.0, 135.0, 225.0, 300.0],
            max_wheel_rad_s: 80.0,
            max_kick_speed: 6.5,
            boundary_margin: 0.3,
            robot_mass: 2.5,
            ball_mass: 0.046,
            n_robots_blue: 1,
            n_robots_yellow: 0,
        }
    }

    pub fn with_teams(mut self, n_blue: usize, n_yellow: usize) -> Self {
        self.n_robots_blue = n_blue;
        self.n_robots_yellow = n_yellow;
        self
    }

    pub fn wheel_count(&self) -> usize {
        match self.league {
            League::Vsss => 2,
            League::Ssl => self.wheel_angles_deg.len(),
        }
    }

    /// Top speed of a robot driving straight ahead with saturated wheels.
    pub fn max_robot_speed(&self) -> f64 {
        match self.league {
            League::Vsss => self.wheel_radius * self.max_wheel_rad_s,
            League::Ssl => {
                let binding = self
                    .wheel_angles_deg
                    .iter()
                    .map(|a| a.to_radians().sin().abs())
                    .fold(0.0, f64::max);
                self.wheel_radius * self.max_wheel_rad_s / binding.max(f64::EPSILON)
            }
        }
    }

    /// Half extents of the enclosing walls.
    pub fn wall_half_extents(&self) -> (f64, f64) {
        (
            self.length / 2.0 + self.boundary_margin,
            self.width / 2.0 + self.boundary_margin,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("width", self.width),
            ("goal_width", self.goal_width),
            ("goal_depth", self.goal_depth),
            ("penalty_length", self.penalty_length),
            ("penalty_width", self.penalty_width),
            ("ball_radius", self.ball_radius),
            ("robot_radius", self.robot_radius),
            ("wheel_radius", self.wheel_radius),
            ("axle_length", self.axle_length),
            ("max_wheel_rad_s", self.max_wheel_rad_s),
            ("robot_mass", self.robot_mass),
            ("ball_mass", self.ball_mass),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.boundary_margin.is_finite() && self.boundary_margin >= 0.0) {
            return Err(Error::Config("boundary_margin must be non-negative".into()));
        }
        if !(self.max_kick_speed.is_finite() && self.max_kick_speed >= 0.0) {
            return Err(Error::Config("max_kick_speed must be non-negative".into()));
        }
        if self.goal_width >= self.width {
            return Err(Error::Config(format!(
                "goal_width {} must be smaller than width {}",
                self.goal_width, self.width
            )));
        }
        match self.league {
            League::Vsss if !self.wheel_angles_deg.is_empty() => {
                return Err(Error::Config("VSSS robots have no omni wheel angles".into()))
            }
            League::Ssl if self.wheel_angles_deg.len() < 3 => {
                return Err(Error::Config("SSL robots need at least three omni wheels".into()))
            }
            _ => {}
        }
        if self.wheel_angles_deg.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("wheel angles must be finite".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let field: Field = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        field.validate()?;
        Ok(field)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let field: Field = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        field.validate()?;
        Ok(field)
    }

    /// Loads a field configuration; `.json` files are read as JSON, anything
    /// else as TOML.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("field serializes to TOML")
    }
}
