//! Score against static defenders spread over the opponent half.

use rand_chacha::ChaCha8Rng;

use super::obs::{observation_size, observe, ObsNorm};
use super::reward::{compute_reward, Potential, RewardWeights};
use super::rules::{agent_in_contact, ball_in_goal, in_attacking_half, timed_out};
use super::spawn::{Placer, Region};
use super::{setup, ssl_command, Setup, SetupRequest, SslActionScale, EPISODE_SECONDS};
use crate::entities::{Ball, Field, Frame, League, Robot, Team};
use crate::env::{Assessment, EnvOverrides, EnvSpec, Metrics, Task, TerminalCause};
use crate::error::Result;
use crate::physics::RobotCommand;

/// Closest distance of a spawned defender or ball to the halfway line.
pub(crate) const HALF_SPAWN_MIN_X: f64 = 0.5;
const SPAWN_INSET: f64 = 0.3;
const CLEARANCE: f64 = 0.1;

/// Terminal cause shared by the two half-court challenges.
pub(crate) fn half_court_cause(frame: &Frame, field: &Field, max_steps: u64) -> Option<TerminalCause> {
    let agent = frame.robot(Team::Blue, 0).expect("agent present");
    if ball_in_goal(field, &frame.ball, Team::Blue) {
        Some(TerminalCause::GoalScored)
    } else if agent_in_contact(frame, field, agent) {
        Some(TerminalCause::Collision)
    } else if !in_attacking_half(field, Team::Blue, frame.ball.x, frame.ball.y)
        || !in_attacking_half(field, Team::Blue, agent.x, agent.y)
    {
        Some(TerminalCause::ExitedField)
    } else if timed_out(frame, max_steps) {
        Some(TerminalCause::Timeout)
    } else {
        None
    }
}

pub(crate) fn half_court_assessment(setup: &Setup, frame: &Frame, last: &Frame) -> Assessment {
    let spec = &setup.spec;
    let cause = half_court_cause(frame, &spec.field, spec.max_steps);
    let goal = if cause == Some(TerminalCause::GoalScored) { 1.0 } else { 0.0 };
    let terms = compute_reward(
        frame,
        last,
        &spec.field,
        spec.sim_config.control_dt,
        &setup.weights,
        (Team::Blue, 0),
        Potential::AgentToBall,
        goal,
    );
    Assessment {
        terms: vec![terms],
        done: cause.is_some(),
        cause,
        metrics: Metrics::from([("goal_score".to_string(), goal)]),
    }
}

#[derive(Debug, Clone)]
pub struct StaticDefenders {
    setup: Setup,
    norm: ObsNorm,
    scale: SslActionScale,
}

impl StaticDefenders {
    pub fn new(overrides: &EnvOverrides) -> Result<Self> {
        let setup = setup(
            SetupRequest {
                id: "SSL-StaticDefenders-v0",
                field: Field::ssl().with_teams(1, 6),
                weights: RewardWeights::ssl(),
                episode_seconds: EPISODE_SECONDS,
                n_controlled: 1,
                action_size: 5,
                default_opponents: 6,
                opponents: 0..=11,
                observation_size: |n| observation_size(League::Ssl, 1 + n),
            },
            overrides,
        )?;
        let norm = ObsNorm::new(&setup.spec.field, &setup.spec.sim_config);
        Ok(StaticDefenders { setup, norm, scale: SslActionScale::default() })
    }

    /// Where the defenders and the ball are placed.
    pub fn spawn_region(&self) -> Region {
        let f = &self.setup.spec.field;
        Region {
            x: (HALF_SPAWN_MIN_X, f.length / 2.0 - SPAWN_INSET),
            y: (-f.width / 2.0 + SPAWN_INSET, f.width / 2.0 - SPAWN_INSET),
        }
    }
}

impl Task for StaticDefenders {
    type Episode = ();

    fn spec(&self) -> &EnvSpec {
        &self.setup.spec
    }

    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame {
        let field = &self.setup.spec.field;
        let region = self.spawn_region();
        let mut placer = Placer::new();
        placer.add(0.0, 0.0, field.robot_radius);
        let (bx, by) = placer.place(rng, region, field.ball_radius, CLEARANCE);
        let mut frame = Frame::new(Ball::at(bx, by)).with_robot(Robot::new(Team::Blue, 0, 0.0, 0.0, 0.0, 4));
        for id in 0..self.setup.n_opponents as u32 {
            let (x, y) = placer.place(rng, region, field.robot_radius, CLEARANCE);
            frame.insert(Robot::new(Team::Yellow, id, x, y, 180.0, 4));
        }
        frame
    }

    fn begin_episode(&self, _frame: &Frame, _rng: &mut ChaCha8Rng) {}

    fn get_commands(&self, _episode: &mut (), frame: &Frame, actions: &[f64]) -> Vec<RobotCommand> {
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

    fn calculate_reward_and_done(&self, _episode: &mut (), frame: &Frame, last: &Frame) -> Assessment {
        half_court_assessment(&self.setup, frame, last)
    }
}
