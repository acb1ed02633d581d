//! Drive to the ball until it sits on the IR sensor.

use rand_chacha::ChaCha8Rng;

use super::obs::{observation_size, observe, ObsNorm};
use super::reward::{compute_reward, Potential, RewardWeights};
use super::rules::timed_out;
use super::spawn::{heading, Placer, Region};
use super::{setup, ssl_command, Setup, SetupRequest, SslActionScale, EPISODE_SECONDS};
use crate::entities::{field_contains, Ball, Field, Frame, League, Robot, Team};
use crate::env::{Assessment, EnvOverrides, EnvSpec, Metrics, Task, TerminalCause};
use crate::error::Result;
use crate::physics::RobotCommand;

const SPAWN_INSET: f64 = 0.5;
/// Edge gap between the agent and the ball at reset.
const BALL_CLEARANCE: f64 = 0.3;
const CLEARANCE: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct GoToBall {
    setup: Setup,
    norm: ObsNorm,
    scale: SslActionScale,
}

impl GoToBall {
    pub fn new(overrides: &EnvOverrides) -> Result<Self> {
        let setup = setup(
            SetupRequest {
                id: "SSL-GoToBall-v0",
                field: Field::ssl().with_teams(1, 0),
                weights: RewardWeights::ssl(),
                episode_seconds: EPISODE_SECONDS,
                n_controlled: 1,
                action_size: 5,
                default_opponents: 0,
                opponents: 0..=11,
                observation_size: |n| observation_size(League::Ssl, 1 + n),
            },
            overrides,
        )?;
        let norm = ObsNorm::new(&setup.spec.field, &setup.spec.sim_config);
        Ok(GoToBall { setup, norm, scale: SslActionScale::default() })
    }

    pub fn spawn_region(&self) -> Region {
        let f = &self.setup.spec.field;
        Region {
            x: (-f.length / 2.0 + SPAWN_INSET, f.length / 2.0 - SPAWN_INSET),
            y: (-f.width / 2.0 + SPAWN_INSET, f.width / 2.0 - SPAWN_INSET),
        }
    }
}

impl Task for GoToBall {
    type Episode = ();

    fn spec(&self) -> &EnvSpec {
        &self.setup.spec
    }

    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame {
        let field = &self.setup.spec.field;
        let region = self.spawn_region();
        let mut placer = Placer::new();
        let (ax, ay) = placer.place(rng, region, field.robot_radius, CLEARANCE);
        let (bx, by) = placer.place(rng, region, field.ball_radius, BALL_CLEARANCE);
        let mut frame = Frame::new(Ball::at(bx, by)).with_robot(Robot::new(Team::Blue, 0, ax, ay, heading(rng), 4));
        for id in 0..self.setup.n_opponents as u32 {
            let (x, y) = placer.place(rng, region, field.robot_radius, CLEARANCE);
            frame.insert(Robot::new(Team::Yellow, id, x, y, heading(rng), 4));
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
        let spec = &self.setup.spec;
        let agent = frame.robot(Team::Blue, 0).expect("agent present");
        let cause = if agent.ir {
            Some(TerminalCause::BallReached)
        } else if !field_contains(&spec.field, agent.x, agent.y) {
            Some(TerminalCause::ExitedField)
        } else if timed_out(frame, spec.max_steps) {
            Some(TerminalCause::Timeout)
        } else {
            None
        };
        let reached = if cause == Some(TerminalCause::BallReached) { 1.0 } else { 0.0 };
        let terms = compute_reward(
            frame,
            last,
            &spec.field,
            spec.sim_config.control_dt,
            &self.setup.weights,
            (Team::Blue, 0),
            Potential::AgentToBall,
            reached,
        );
        Assessment {
            terms: vec![terms],
            done: cause.is_some(),
            cause,
            metrics: Metrics::from([("ball_reached".to_string(), reached)]),
        }
    }
}
