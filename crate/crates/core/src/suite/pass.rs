//! Passing between two blue robots.
//!
//! A pass starts with a kick: a robot commands a kick while the ball was on
//! its sensor at the start of the step. It completes when the ball reaches
//! the other robot's sensor. It fails first if the ball slows below
//! [`PASS_MIN_BALL_SPEED`], leaves the field, or comes back to the kicker
//! after having left it.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::obs::{observation_size, observe, ObsNorm};
use super::reward::{compute_reward, Potential, RewardWeights};
use super::rules::{kicked, timed_out, PASS_MIN_BALL_SPEED};
use super::spawn::{heading, Region};
use super::{setup, ssl_command, Setup, SetupRequest, SslActionScale, EPISODE_SECONDS};
use crate::entities::{field_contains, Ball, Field, Frame, League, Robot, Team};
use crate::env::{Assessment, EnvOverrides, EnvSpec, Metrics, Task, TerminalCause};
use crate::error::Result;
use crate::physics::{hold_point, RobotCommand};

pub const SINGLE_EPISODE_SECONDS: f64 = 3.0;
/// Range of the initial distance between the two robots.
pub const SPAWN_DISTANCE: (f64, f64) = (1.0, 3.0);
const SPAWN_INSET: f64 = 1.0;
const SPAWN_ATTEMPTS: usize = 256;
const MIN_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassEvent {
    Kicked { kicker: u32 },
    Completed { kicker: u32 },
    Failed { kicker: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct InFlight {
    kicker: u32,
    left: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PassTracker {
    in_flight: Option<InFlight>,
    completed: u32,
}

impl PassTracker {
    pub fn completed(&self) -> u32 {
        self.completed
    }

    pub fn kicker_in_flight(&self) -> Option<u32> {
        self.in_flight.map(|f| f.kicker)
    }

    /// Advances over the step `last -> frame` of the blue team.
    pub fn update(&mut self, frame: &Frame, last: &Frame, field: &Field) -> Option<PassEvent> {
        let mut event = None;
        if let Some(&id) = frame.robots_blue.keys().find(|&&id| kicked(frame, last, Team::Blue, id)) {
            self.in_flight = Some(InFlight { kicker: id, left: false });
            event = Some(PassEvent::Kicked { kicker: id });
        }
        let Some(flight) = self.in_flight.as_mut() else {
            return event;
        };
        let kicker = flight.kicker;
        let receiver_has_ball = frame.robots_blue.values().any(|r| r.id != kicker && r.ir);
        let kicker_has_ball = frame.robots_blue.get(&kicker).is_some_and(|r| r.ir);
        let failed = if receiver_has_ball {
            self.completed += 1;
            self.in_flight = None;
            return Some(PassEvent::Completed { kicker });
        } else if !field_contains(field, frame.ball.x, frame.ball.y) || frame.ball.speed() < PASS_MIN_BALL_SPEED {
            true
        } else if kicker_has_ball {
            flight.left
        } else {
            flight.left = true;
            false
        };
        if failed {
            self.in_flight = None;
            return Some(PassEvent::Failed { kicker });
        }
        event
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PassEpisode {
    pub tracker: PassTracker,
}

#[derive(Debug, Clone)]
pub struct PassEndurance {
    setup: Setup,
    norm: ObsNorm,
    scale: SslActionScale,
}

impl PassEndurance {
    /// Controls the holder; one pass within three seconds, scored by `1/d`.
    pub fn single(overrides: &EnvOverrides) -> Result<Self> {
        Self::build("SSL-PassEndurance-v0", 1, SINGLE_EPISODE_SECONDS, overrides)
    }

    /// Controls both robots; as many passes as possible in thirty seconds.
    pub fn multi(overrides: &EnvOverrides) -> Result<Self> {
        Self::build("SSL-PassEnduranceMA-v0", 2, EPISODE_SECONDS, overrides)
    }

    fn build(id: &str, n_controlled: usize, seconds: f64, overrides: &EnvOverrides) -> Result<Self> {
        let setup = setup(
            SetupRequest {
                id,
                field: Field::ssl().with_teams(2, 0),
                weights: RewardWeights::ssl(),
                episode_seconds: seconds,
                n_controlled,
                action_size: 5,
                default_opponents: 0,
                opponents: 0..=0,
                observation_size: |_| observation_size(League::Ssl, 2),
            },
            overrides,
        )?;
        let norm = ObsNorm::new(&setup.spec.field, &setup.spec.sim_config);
        Ok(PassEndurance { setup, norm, scale: SslActionScale::default() })
    }

    fn multi_agent(&self) -> bool {
        self.setup.spec.n_controlled == 2
    }

    pub fn spawn_region(&self) -> Region {
        let f = &self.setup.spec.field;
        Region {
            x: (-f.length / 2.0 + SPAWN_INSET, f.length / 2.0 - SPAWN_INSET),
            y: (-f.width / 2.0 + SPAWN_INSET, f.width / 2.0 - SPAWN_INSET),
        }
    }
}

impl Task for PassEndurance {
    type Episode = PassEpisode;

    fn spec(&self) -> &EnvSpec {
        &self.setup.spec
    }

    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame {
        let spec = &self.setup.spec;
        let region = self.spawn_region();
        let sample = |rng: &mut ChaCha8Rng| {
            (rng.random_range(region.x.0..=region.x.1), rng.random_range(region.y.0..=region.y.1))
        };
        let holder = sample(rng);
        let mut receiver = sample(rng);
        for _ in 0..SPAWN_ATTEMPTS {
            let d = (receiver.0 - holder.0).hypot(receiver.1 - holder.1);
            if (SPAWN_DISTANCE.0..=SPAWN_DISTANCE.1).contains(&d) {
                break;
            }
            receiver = sample(rng);
        }
        let theta = heading(rng);
        let (bx, by) = hold_point(holder.0, holder.1, theta, &spec.field, &spec.sim_config);
        let facing = (holder.1 - receiver.1).atan2(holder.0 - receiver.0).to_degrees();
        let mut receiver = Robot::new(Team::Blue, 1, receiver.0, receiver.1, facing, 4);
        receiver.dribbler_on = !self.multi_agent();
        Frame::new(Ball::at(bx, by))
            .with_robot(Robot::new(Team::Blue, 0, holder.0, holder.1, theta, 4))
            .with_robot(receiver)
    }

    fn begin_episode(&self, _frame: &Frame, _rng: &mut ChaCha8Rng) -> PassEpisode {
        PassEpisode::default()
    }

    fn get_commands(&self, _episode: &mut PassEpisode, _frame: &Frame, actions: &[f64]) -> Vec<RobotCommand> {
        let mut commands: Vec<RobotCommand> = actions
            .chunks_exact(5)
            .enumerate()
            .map(|(id, a)| ssl_command(Team::Blue, id as u32, a, self.scale))
            .collect();
        if !self.multi_agent() {
            commands.push(RobotCommand::velocity(Team::Blue, 1, 0.0, 0.0, 0.0).with_dribbler(true));
        }
        commands
    }

    fn frame_to_observations(&self, frame: &Frame) -> Vec<Vec<f64>> {
        (0..self.setup.spec.n_controlled as u32)
            .map(|id| observe(frame, Team::Blue, id, &self.norm))
            .collect()
    }

    fn calculate_reward_and_done(&self, episode: &mut PassEpisode, frame: &Frame, last: &Frame) -> Assessment {
        let spec = &self.setup.spec;
        let event = episode.tracker.update(frame, last, &spec.field);
        let cause = if matches!(event, Some(PassEvent::Failed { .. })) {
            Some(TerminalCause::PassFailed)
        } else if timed_out(frame, spec.max_steps) {
            Some(TerminalCause::Timeout)
        } else {
            None
        };
        let objective = if matches!(event, Some(PassEvent::Completed { .. })) { 1.0 } else { 0.0 };
        let shaping = if self.multi_agent() { Potential::AgentToBall } else { Potential::BallToRobot(Team::Blue, 1) };
        let terms = (0..spec.n_controlled as u32)
            .map(|id| {
                compute_reward(
                    frame,
                    last,
                    &spec.field,
                    spec.sim_config.control_dt,
                    &self.setup.weights,
                    (Team::Blue, id),
                    shaping,
                    objective,
                )
            })
            .collect();
        let mut metrics = Metrics::from([("pass_score".to_string(), episode.tracker.completed() as f64)]);
        if !self.multi_agent() {
            let r = frame.robot(Team::Blue, 1).expect("receiver present");
            let d = (frame.ball.x - r.x).hypot(frame.ball.y - r.y).max(MIN_DISTANCE);
            metrics.insert("inv_dist".to_string(), 1.0 / d);
        }
        Assessment { terms, done: cause.is_some(), cause, metrics }
    }
}
