//! Carry the ball through the gates of a sparse row of static robots.
//!
//! The row is vertical at `row_x` in the opponent half. A gate is the open
//! interval of `y` between the circles of two neighbouring row robots. A gate
//! counts when the agent's center crosses the row line inside it, in either
//! direction, while the ball is on its sensor; each gate counts once.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::obs::{observation_size, observe, ObsNorm};
use super::reward::{compute_reward, Potential, RewardWeights};
use super::rules::{agent_in_contact, timed_out};
use super::{setup, ssl_command, Setup, SetupRequest, SslActionScale, EPISODE_SECONDS};
use crate::entities::{field_contains, Ball, Field, Frame, League, Robot, Team};
use crate::env::{Assessment, EnvOverrides, EnvSpec, Metrics, Task, TerminalCause};
use crate::error::{Error, Result};
use crate::physics::{hold_point, RobotCommand};

pub const DEFAULT_GATE_SPACING: f64 = 0.6;
/// Range of the row's distance ahead of the agent.
pub const ROW_X: (f64, f64) = (1.0, 2.0);
/// Range of the row's vertical offset.
pub const ROW_OFFSET: (f64, f64) = (-0.5, 0.5);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub lo: f64,
    pub hi: f64,
}

impl Gate {
    pub fn contains(&self, y: f64) -> bool {
        y > self.lo && y < self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DribblingEpisode {
    pub row_x: f64,
    pub gates: Vec<Gate>,
    pub consumed: Vec<bool>,
}

impl DribblingEpisode {
    /// Derives the row and its gates from the row robots of `frame`.
    pub fn from_frame(frame: &Frame, field: &Field) -> Self {
        let mut ys: Vec<f64> = frame.robots_yellow.values().map(|r| r.y).collect();
        ys.sort_by(f64::total_cmp);
        let row_x = frame.robots_yellow.values().map(|r| r.x).next().unwrap_or(0.0);
        let gates: Vec<Gate> = ys
            .windows(2)
            .map(|w| Gate { lo: w[0] + field.robot_radius, hi: w[1] - field.robot_radius })
            .collect();
        DribblingEpisode { row_x, consumed: vec![false; gates.len()], gates }
    }

    pub fn gates_passed(&self) -> usize {
        self.consumed.iter().filter(|&&c| c).count()
    }

    /// Registers the move `(x0, y0) -> (x1, y1)` and returns how many new
    /// gates it passed.
    pub fn advance(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, holding: bool) -> usize {
        if !holding || (x0 >= self.row_x) == (x1 >= self.row_x) {
            return 0;
        }
        let y = y0 + (self.row_x - x0) / (x1 - x0) * (y1 - y0);
        match self.gates.iter().position(|g| g.contains(y)) {
            Some(i) if !self.consumed[i] => {
                self.consumed[i] = true;
                1
            }
            _ => 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dribbling {
    setup: Setup,
    norm: ObsNorm,
    scale: SslActionScale,
    spacing: f64,
}

impl Dribbling {
    pub fn new(overrides: &EnvOverrides) -> Result<Self> {
        let setup = setup(
            SetupRequest {
                id: "SSL-Dribbling-v0",
                field: Field::ssl().with_teams(1, 4),
                weights: RewardWeights::ssl(),
                episode_seconds: EPISODE_SECONDS,
                n_controlled: 1,
                action_size: 5,
                default_opponents: 4,
                opponents: 2..=6,
                observation_size: |n| observation_size(League::Ssl, 1 + n),
            },
            overrides,
        )?;
        let spacing = overrides.gate_spacing.unwrap_or(DEFAULT_GATE_SPACING);
        let field = &setup.spec.field;
        let span = spacing * (setup.n_opponents - 1) as f64;
        if !(spacing.is_finite() && spacing > 2.0 * field.robot_radius) {
            return Err(Error::Config(format!(
                "gate_spacing must exceed a robot diameter ({}), got {spacing}",
                2.0 * field.robot_radius
            )));
        }
        if span / 2.0 + ROW_OFFSET.1 + field.robot_radius > field.width / 2.0 {
            return Err(Error::Config(format!("a row spanning {span} m does not fit the field")));
        }
        let norm = ObsNorm::new(field, &setup.spec.sim_config);
        Ok(Dribbling { setup, norm, scale: SslActionScale::default(), spacing })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
}

impl Task for Dribbling {
    type Episode = DribblingEpisode;

    fn spec(&self) -> &EnvSpec {
        &self.setup.spec
    }

    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame {
        let spec = &self.setup.spec;
        let row_x = rng.random_range(ROW_X.0..=ROW_X.1);
        let offset = rng.random_range(ROW_OFFSET.0..=ROW_OFFSET.1);
        let (bx, by) = hold_point(0.0, 0.0, 0.0, &spec.field, &spec.sim_config);
        let mut frame = Frame::new(Ball::at(bx, by)).with_robot(Robot::new(Team::Blue, 0, 0.0, 0.0, 0.0, 4));
        let n = self.setup.n_opponents;
        let mid = (n - 1) as f64 / 2.0;
        for i in 0..n {
            let y = offset + (i as f64 - mid) * self.spacing;
            frame.insert(Robot::new(Team::Yellow, i as u32, row_x, y, 180.0, 4));
        }
        frame
    }

    fn begin_episode(&self, frame: &Frame, _rng: &mut ChaCha8Rng) -> DribblingEpisode {
        DribblingEpisode::from_frame(frame, &self.setup.spec.field)
    }

    fn get_commands(&self, _episode: &mut DribblingEpisode, frame: &Frame, actions: &[f64]) -> Vec<RobotCommand> {
        let mut commands = vec![ssl_command(Team::Blue, 0, actions, self.scale)];
        commands.extend(
            frame
                .robots_yellow
                .keys()
                .map(|&id| RobotCommand::velocity(Team::Yellow, id, 0.0, 0.0, 0.0)),
        );
        commands
    }

    fn frame_to_observations(&self, frame: &Frame) -> Vec<Vec<f64>> {
        vec![observe(frame, Team::Blue, 0, &self.norm)]
    }

    fn calculate_reward_and_done(&self, episode: &mut DribblingEpisode, frame: &Frame, last: &Frame) -> Assessment {
        let spec = &self.setup.spec;
        let agent = frame.robot(Team::Blue, 0).expect("agent present");
        let before = last.robot(Team::Blue, 0).expect("agent present");
        let new_gates = episode.advance(before.x, before.y, agent.x, agent.y, agent.ir) as f64;
        let cause = if agent_in_contact(frame, &spec.field, agent) {
            Some(TerminalCause::Collision)
        } else if !field_contains(&spec.field, agent.x, agent.y) {
            Some(TerminalCause::ExitedField)
        } else if timed_out(frame, spec.max_steps) {
            Some(TerminalCause::Timeout)
        } else {
            None
        };
        let terms = compute_reward(
            frame,
            last,
            &spec.field,
            spec.sim_config.control_dt,
            &self.setup.weights,
            (Team::Blue, 0),
            Potential::AgentToBall,
            new_gates,
        );
        Assessment {
            terms: vec![terms],
            done: cause.is_some(),
            cause,
            metrics: Metrics::from([("gates".to_string(), episode.gates_passed() as f64)]),
        }
    }
}
