//! VSSS 3v3. Blue robots are the learners; every uncontrolled robot follows
//! its own Ornstein-Uhlenbeck process on the two wheel channels.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::obs::{observation_size, observe, ObsNorm};
use super::reward::{compute_reward, Potential, RewardWeights};
use super::rules::{ball_in_goal, timed_out};
use super::spawn::{heading, Placer, Region};
use super::{setup, vss_command, Setup, SetupRequest, EPISODE_SECONDS};
use crate::entities::{Ball, Field, Frame, League, Robot, Team};
use crate::env::{Assessment, EnvOverrides, EnvSpec, Metrics, RewardTerms, Task, TerminalCause};
use crate::error::Result;
use crate::ou::{OuParams, OuProcess};
use crate::physics::RobotCommand;

const SPAWN_INSET: f64 = 0.1;
const SPAWN_CLEARANCE: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct VssTask {
    setup: Setup,
    norm: ObsNorm,
    ou: OuParams,
}

#[derive(Debug, Clone)]
pub struct VssEpisode {
    noise: Vec<(Team, u32, OuProcess)>,
}

impl VssTask {
    pub fn single(overrides: &EnvOverrides) -> Result<Self> {
        Self::build("VSSS-SingleAgent-v0", 1, overrides)
    }

    pub fn multi(overrides: &EnvOverrides) -> Result<Self> {
        Self::build("VSSS-MultiAgent-v0", 3, overrides)
    }

    fn build(id: &str, n_controlled: usize, overrides: &EnvOverrides) -> Result<Self> {
        let setup = setup(
            SetupRequest {
                id,
                field: Field::vsss(),
                weights: RewardWeights::vsss(),
                episode_seconds: EPISODE_SECONDS,
                n_controlled,
                action_size: 2,
                default_opponents: 3,
                opponents: 0..=5,
                observation_size: |n| observation_size(League::Vsss, 3 + n),
            },
            overrides,
        )?;
        let norm = ObsNorm::new(&setup.spec.field, &setup.spec.sim_config);
        let ou = OuParams { dt: setup.spec.sim_config.control_dt, ..OuParams::default() };
        Ok(VssTask { setup, norm, ou })
    }

    pub fn weights(&self) -> &RewardWeights {
        &self.setup.weights
    }

    fn controlled(&self) -> impl Iterator<Item = u32> {
        0..self.setup.spec.n_controlled as u32
    }
}

impl Task for VssTask {
    type Episode = VssEpisode;

    fn spec(&self) -> &EnvSpec {
        &self.setup.spec
    }

    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame {
        let field = &self.setup.spec.field;
        let region = Region {
            x: (-field.length / 2.0 + SPAWN_INSET, field.length / 2.0 - SPAWN_INSET),
            y: (-field.width / 2.0 + SPAWN_INSET, field.width / 2.0 - SPAWN_INSET),
        };
        let mut placer = Placer::new();
        let (bx, by) = placer.place(rng, region, field.ball_radius, SPAWN_CLEARANCE);
        let mut frame = Frame::new(Ball::at(bx, by));
        for (team, n) in [(Team::Blue, field.n_robots_blue), (Team::Yellow, field.n_robots_yellow)] {
            for id in 0..n as u32 {
                let (x, y) = placer.place(rng, region, field.robot_radius, SPAWN_CLEARANCE);
                frame.insert(Robot::new(team, id, x, y, heading(rng), 2));
            }
        }
        frame
    }

    fn begin_episode(&self, frame: &Frame, rng: &mut ChaCha8Rng) -> VssEpisode {
        let n = self.setup.spec.n_controlled as u32;
        let noise = frame
            .robots()
            .filter(|r| !(r.team == Team::Blue && r.id < n))
            .map(|r| (r.team, r.id, OuProcess::new(2, self.ou, rng.random())))
            .collect();
        VssEpisode { noise }
    }

    fn get_commands(&self, episode: &mut VssEpisode, _frame: &Frame, actions: &[f64]) -> Vec<RobotCommand> {
        let field = &self.setup.spec.field;
        let mut commands: Vec<RobotCommand> = actions
            .chunks_exact(2)
            .zip(self.controlled())
            .map(|(a, id)| vss_command(Team::Blue, id, a, field))
            .collect();
        let mut buf = [0.0; 2];
        for (team, id, process) in &mut episode.noise {
            process.sample_into(&mut buf);
            commands.push(vss_command(*team, *id, &buf, field));
        }
        commands
    }

    fn frame_to_observations(&self, frame: &Frame) -> Vec<Vec<f64>> {
        self.controlled().map(|id| observe(frame, Team::Blue, id, &self.norm)).collect()
    }

    fn calculate_reward_and_done(&self, _episode: &mut VssEpisode, frame: &Frame, last: &Frame) -> Assessment {
        let spec = &self.setup.spec;
        let field = &spec.field;
        let cause = if ball_in_goal(field, &frame.ball, Team::Blue) {
            Some(TerminalCause::GoalScored)
        } else if ball_in_goal(field, &frame.ball, Team::Yellow) {
            Some(TerminalCause::GoalConceded)
        } else if timed_out(frame, spec.max_steps) {
            Some(TerminalCause::Timeout)
        } else {
            None
        };
        let goal = match cause {
            Some(TerminalCause::GoalScored) => 1.0,
            Some(TerminalCause::GoalConceded) => -1.0,
            _ => 0.0,
        };
        let terms: Vec<RewardTerms> = self
            .controlled()
            .map(|id| {
                compute_reward(
                    frame,
                    last,
                    field,
                    spec.sim_config.control_dt,
                    &self.setup.weights,
                    (Team::Blue, id),
                    Potential::AgentToBall,
                    goal,
                )
            })
            .collect();
        Assessment {
            terms,
            done: cause.is_some(),
            cause,
            metrics: Metrics::from([("goal_score".to_string(), goal)]),
        }
    }
}
