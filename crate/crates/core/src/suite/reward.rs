//! Dense reward shared by all environments:
//!
//! ```text
//! r = w_objective * objective
//!   + w_distance  * (d_prev - d_now)
//!   + w_ball_goal * (g_prev - g_now)
//!   - w_energy    * sum(|wheel_i|) * control_dt
//! ```
//!
//! `d` is the environment's shaping distance ([`Potential`]) and `g` the ball's
//! distance to the opponent goal center. Both gradients telescope over an
//! episode.

use serde::{Deserialize, Serialize};

use crate::entities::{Field, Frame, Team};
use crate::env::RewardTerms;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardWeights {
    pub objective: f64,
    pub distance: f64,
    pub ball_goal: f64,
    pub energy: f64,
}

impl RewardWeights {
    pub fn ssl() -> Self {
        RewardWeights { objective: 10.0, distance: 1.0, ball_goal: 0.0, energy: 0.02 }
    }

    pub fn vsss() -> Self {
        RewardWeights { objective: 10.0, distance: 1.0, ball_goal: 1.0, energy: 0.02 }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.objective, self.distance, self.ball_goal, self.energy].iter().all(|w| w.is_finite()) {
            Ok(())
        } else {
            Err(Error::Config("reward weights must be finite".into()))
        }
    }
}

/// Shaping distance of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    /// Agent center to ball.
    AgentToBall,
    /// Ball to the given robot's center.
    BallToRobot(Team, u32),
}

pub fn potential(frame: &Frame, agent: (Team, u32), p: Potential) -> f64 {
    let (team, id) = match p {
        Potential::AgentToBall => agent,
        Potential::BallToRobot(team, id) => (team, id),
    };
    let r = frame.robot(team, id).expect("shaping robot is part of the frame");
    (r.x - frame.ball.x).hypot(r.y - frame.ball.y)
}

/// Ball distance to the center of the goal `team` attacks.
pub fn ball_to_goal(frame: &Frame, field: &Field, team: Team) -> f64 {
    let gx = match team {
        Team::Blue => field.length / 2.0,
        Team::Yellow => -field.length / 2.0,
    };
    (frame.ball.x - gx).hypot(frame.ball.y)
}

/// Reward terms of `agent` for the step `last -> frame`.
#[allow(clippy::too_many_arguments)]
pub fn compute_reward(
    frame: &Frame,
    last: &Frame,
    field: &Field,
    control_dt: f64,
    weights: &RewardWeights,
    agent: (Team, u32),
    shaping: Potential,
    objective: f64,
) -> RewardTerms {
    let distance_gradient = potential(last, agent, shaping) - potential(frame, agent, shaping);
    let ball_goal_gradient = if weights.ball_goal != 0.0 {
        ball_to_goal(last, field, agent.0) - ball_to_goal(frame, field, agent.0)
    } else {
        0.0
    };
    let robot = frame.robot(agent.0, agent.1).expect("agent is part of the frame");
    let energy = robot.wheel_speeds.iter().map(|w| w.abs()).sum::<f64>() * control_dt;
    let total = weights.objective * objective + weights.distance * distance_gradient
        + weights.ball_goal * ball_goal_gradient
        - weights.energy * energy;
    RewardTerms { objective, distance_gradient, ball_goal_gradient, energy, total }
}
