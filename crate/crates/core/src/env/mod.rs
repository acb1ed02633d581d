//! Environment contract.
//!
//! A concrete environment is a [`Task`]: four hooks (initial frame,
//! commands, observations, reward/termination) plus an explicit per-episode
//! state value. [`Env`] wires a task to a [`Simulator`] and enforces the
//! stepping contract; [`Environment`] is the object-safe face used by the
//! registry, the CLI and bindings.

mod registry;

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entities::{Ball, Field, Frame};
use crate::error::{Error, Result};
use crate::physics::{RobotCommand, SimConfig, Simulator};

pub use registry::{make, make_with, EnvOverrides, ENV_IDS};

/// Attempts at drawing a non-overlapping initial frame before giving up.
pub const MAX_RESET_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub id: String,
    pub field: Field,
    pub sim_config: SimConfig,
    pub n_controlled: usize,
    pub observation_size: usize,
    pub action_size_per_agent: usize,
    pub episode_seconds: f64,
    /// Episode cap in control steps.
    pub max_steps: u64,
    pub seed: u64,
}

impl EnvSpec {
    pub fn action_len(&self) -> usize {
        self.n_controlled * self.action_size_per_agent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCause {
    GoalScored,
    GoalConceded,
    BallReached,
    ExitedField,
    Collision,
    PassFailed,
    Timeout,
}

impl TerminalCause {
    pub const ALL: [TerminalCause; 7] = [
        TerminalCause::GoalScored,
        TerminalCause::GoalConceded,
        TerminalCause::BallReached,
        TerminalCause::ExitedField,
        TerminalCause::Collision,
        TerminalCause::PassFailed,
        TerminalCause::Timeout,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TerminalCause::GoalScored => "goal_scored",
            TerminalCause::GoalConceded => "goal_conceded",
            TerminalCause::BallReached => "ball_reached",
            TerminalCause::ExitedField => "exited_field",
            TerminalCause::Collision => "collision",
            TerminalCause::PassFailed => "pass_failed",
            TerminalCause::Timeout => "timeout",
        }
    }
}

impl fmt::Display for TerminalCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Metrics = BTreeMap<String, f64>;

/// Unweighted reward components for one agent and one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardTerms {
    /// Objective events this step (goal +1/-1, ball reached, gate, pass).
    pub objective: f64,
    /// Shaping distance before minus after.
    pub distance_gradient: f64,
    /// Ball-to-opponent-goal distance before minus after (VSSS only).
    pub ball_goal_gradient: f64,
    /// Sum of absolute wheel speeds times the control period.
    pub energy: f64,
    pub total: f64,
}

/// What [`Task::calculate_reward_and_done`] decides for a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub terms: Vec<RewardTerms>,
    pub done: bool,
    pub cause: Option<TerminalCause>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Info {
    /// Set exactly when the step is terminal.
    pub cause: Option<TerminalCause>,
    pub sim_time: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    /// One observation vector per controlled agent.
    pub observations: Vec<Vec<f64>>,
    /// One reward per controlled agent.
    pub rewards: Vec<f64>,
    pub reward_terms: Vec<RewardTerms>,
    pub done: bool,
    pub info: Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub cause: TerminalCause,
    pub metrics: Metrics,
    pub steps: u64,
    pub sim_time: f64,
}

/// The four hooks an environment implements. Everything that changes during
/// an episode lives in `Episode`, which the hooks receive explicitly.
pub trait Task: Send {
    type Episode: Clone + fmt::Debug + Send;

    fn spec(&self) -> &EnvSpec;

    /// Initial positions of the ball and every robot.
    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame;

    /// Fresh per-episode state for an episode starting at `frame`.
    fn begin_episode(&self, frame: &Frame, rng: &mut ChaCha8Rng) -> Self::Episode;

    /// Commands for every robot that should move this step, controlled or not.
    /// `actions` is the row-major `n_controlled x action_size_per_agent` matrix.
    fn get_commands(&self, episode: &mut Self::Episode, frame: &Frame, actions: &[f64]) -> Vec<RobotCommand>;

    /// One observation vector per controlled agent.
    fn frame_to_observations(&self, frame: &Frame) -> Vec<Vec<f64>>;

    fn calculate_reward_and_done(&self, episode: &mut Self::Episode, frame: &Frame, last_frame: &Frame) -> Assessment;
}

/// True when any two robots, or the ball and a robot, interpenetrate.
pub fn bodies_overlap(frame: &Frame, field: &Field) -> bool {
    let robots: Vec<_> = frame.robots().collect();
    let rr = 2.0 * field.robot_radius;
    let rb = field.robot_radius + field.ball_radius;
    for (i, a) in robots.iter().enumerate() {
        if (a.x - frame.ball.x).hypot(a.y - frame.ball.y) < rb {
            return true;
        }
        if robots[i + 1..].iter().any(|b| (a.x - b.x).hypot(a.y - b.y) < rr) {
            return true;
        }
    }
    false
}

/// Object-safe environment interface.
pub trait Environment: Send {
    fn spec(&self) -> &EnvSpec;

    /// Starts an episode. With `Some(seed)` the environment RNG is reseeded
    /// first, so equal seeds give equal initial frames.
    fn reset(&mut self, seed: Option<u64>) -> Result<Vec<Vec<f64>>>;

    /// Starts an episode from a given frame instead of a sampled one.
    fn reset_from_frame(&mut self, frame: Frame) -> Result<Vec<Vec<f64>>>;

    fn step(&mut self, actions: &[f64]) -> Result<StepResult>;

    /// Current frame, once reset.
    fn frame(&self) -> Option<&Frame>;

    fn is_done(&self) -> bool;

    #[cfg(feature = "render")]
    fn render(&self, style: &crate::render::RenderStyle) -> Result<crate::render::Image> {
        let frame = self
            .frame()
            .ok_or_else(|| Error::State("render called before reset".into()))?;
        crate::render::render_frame(frame, &self.spec().field, style)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Running,
    Done,
}

pub struct Env<T: Task> {
    task: T,
    sim: Simulator,
    rng: ChaCha8Rng,
    episode: Option<T::Episode>,
    last_frame: Frame,
    phase: Phase,
}

impl<T: Task> Env<T> {
    pub fn new(task: T) -> Result<Self> {
        let spec = task.spec();
        let sim = Simulator::new(spec.field.clone(), spec.sim_config.clone(), Frame::new(Ball::default()))?;
        let rng = ChaCha8Rng::seed_from_u64(spec.seed);
        Ok(Env {
            task,
            sim,
            rng,
            episode: None,
            last_frame: Frame::new(Ball::default()),
            phase: Phase::Fresh,
        })
    }

    pub fn task(&self) -> &T {
        &self.task
    }

    pub fn episode(&self) -> Option<&T::Episode> {
        self.episode.as_ref()
    }

    fn start(&mut self, mut frame: Frame) -> Result<Vec<Vec<f64>>> {
        frame.step_count = 0;
        frame.sim_time = 0.0;
        self.sim.load(frame)?;
        self.episode = Some(self.task.begin_episode(self.sim.frame(), &mut self.rng));
        self.phase = Phase::Running;
        Ok(self.task.frame_to_observations(self.sim.frame()))
    }
}

impl<T: Task> Environment for Env<T> {
    fn spec(&self) -> &EnvSpec {
        self.task.spec()
    }

    fn reset(&mut self, seed: Option<u64>) -> Result<Vec<Vec<f64>>> {
        if let Some(seed) = seed {
            self.rng = ChaCha8Rng::seed_from_u64(seed);
        }
        let field = &self.task.spec().field;
        for _ in 0..MAX_RESET_ATTEMPTS {
            let frame = self.task.get_initial_positions_frame(&mut self.rng);
            if !bodies_overlap(&frame, field) {
                return self.start(frame);
            }
        }
        Err(Error::Setup(format!(
            "{}: no overlap-free initial frame after {MAX_RESET_ATTEMPTS} attempts",
            self.task.spec().id
        )))
    }

    fn reset_from_frame(&mut self, frame: Frame) -> Result<Vec<Vec<f64>>> {
        if bodies_overlap(&frame, &self.task.spec().field) {
            return Err(Error::Setup("initial frame has overlapping bodies".into()));
        }
        self.start(frame)
    }

    fn step(&mut self, actions: &[f64]) -> Result<StepResult> {
        match self.phase {
            Phase::Fresh => return Err(Error::State("step called before reset".into())),
            Phase::Done => return Err(Error::State("episode is done; call reset".into())),
            Phase::Running => {}
        }
        let spec = self.task.spec();
        if actions.len() != spec.action_len() {
            return Err(Error::Action(format!(
                "expected {} values ({} agents x {}), got {}",
                spec.action_len(),
                spec.n_controlled,
                spec.action_size_per_agent,
                actions.len()
            )));
        }
        if let Some(i) = actions.iter().position(|a| !a.is_finite()) {
            return Err(Error::Action(format!("action component {i} is not finite")));
        }
        let episode = self.episode.as_mut().expect("running episodes have state");
        let commands = self.task.get_commands(episode, self.sim.frame(), actions);
        self.last_frame.clone_from(self.sim.frame());
        self.sim.step(&commands)?;
        let frame = self.sim.frame();
        let observations = self.task.frame_to_observations(frame);
        let assessment = self.task.calculate_reward_and_done(episode, frame, &self.last_frame);
        if assessment.done {
            self.phase = Phase::Done;
        }
        Ok(StepResult {
            observations,
            rewards: assessment.terms.iter().map(|t| t.total).collect(),
            reward_terms: assessment.terms,
            done: assessment.done,
            info: Info {
                cause: assessment.cause,
                sim_time: frame.sim_time,
                metrics: assessment.metrics,
            },
        })
    }

    fn frame(&self) -> Option<&Frame> {
        (self.phase != Phase::Fresh).then(|| self.sim.frame())
    }

    fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }
}
