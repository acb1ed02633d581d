//! The benchmark environments.
//!
//! | id | controlled | observation | action | cap |
//! |----|-----------:|------------:|-------:|----:|
//! | `VSSS-SingleAgent-v0` | 1 | 46 | 2 | 30 s |
//! | `VSSS-MultiAgent-v0` | 3 | 46 | 2 | 30 s |
//! | `SSL-GoToBall-v0` | 1 | 12 | 5 | 30 s |
//! | `SSL-StaticDefenders-v0` | 1 | 60 | 5 | 30 s |
//! | `SSL-ContestedPossession-v0` | 1 | 20 | 5 | 30 s |
//! | `SSL-Dribbling-v0` | 1 | 44 | 5 | 30 s |
//! | `SSL-PassEndurance-v0` | 1 | 20 | 5 | 3 s |
//! | `SSL-PassEnduranceMA-v0` | 2 | 20 | 5 | 30 s |
//!
//! VSSS actions are the two wheel power fractions. SSL actions are
//! `(vx, vy, vtheta, kick, dribble)` in the world frame; kick power is the
//! positive part of the fourth value and the dribbler is on when the fifth is
//! positive. All action components are clamped to `[-1, 1]`.

mod contested;
mod dribbling;
mod goto_ball;
pub mod obs;
mod pass;
pub mod reward;
pub mod rules;
mod spawn;
mod static_defenders;
mod vss;

use std::ops::RangeInclusive;

use crate::entities::{Field, Team};
use crate::env::{EnvOverrides, EnvSpec};
use crate::error::{Error, Result};
use crate::physics::{RobotCommand, SimConfig};

pub use contested::ContestedPossession;
pub use dribbling::{Dribbling, DribblingEpisode, Gate};
pub use goto_ball::GoToBall;
pub use pass::{PassEndurance, PassEvent, PassTracker};
pub use reward::{compute_reward, Potential, RewardWeights};
pub use static_defenders::StaticDefenders;
pub use vss::{VssEpisode, VssTask};

/// Default episode length of every environment except single-agent Pass Endurance.
pub const EPISODE_SECONDS: f64 = 30.0;

/// Per-step SSL action scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SslActionScale {
    /// m/s per unit action.
    pub linear: f64,
    /// deg/s per unit action.
    pub angular: f64,
}

impl Default for SslActionScale {
    fn default() -> Self {
        SslActionScale { linear: 2.5, angular: 600.0 }
    }
}

/// Maps one SSL action row to a command.
pub fn ssl_command(team: Team, id: u32, action: &[f64], scale: SslActionScale) -> RobotCommand {
    let a = |i: usize| action[i].clamp(-1.0, 1.0);
    RobotCommand::velocity(team, id, a(0) * scale.linear, a(1) * scale.linear, a(2) * scale.angular)
        .with_kick(a(3).max(0.0))
        .with_dribbler(a(4) > 0.0)
}

/// Maps one VSSS action row (left, right power fractions) to a wheel command.
pub fn vss_command(team: Team, id: u32, action: &[f64], field: &Field) -> RobotCommand {
    let w = field.max_wheel_rad_s;
    RobotCommand::wheels(team, id, action[0].clamp(-1.0, 1.0) * w, action[1].clamp(-1.0, 1.0) * w)
}

/// Resolved construction parameters shared by every task.
#[derive(Debug, Clone)]
pub(crate) struct Setup {
    pub spec: EnvSpec,
    pub weights: RewardWeights,
    pub n_opponents: usize,
}

pub(crate) struct SetupRequest<'a> {
    pub id: &'a str,
    pub field: Field,
    pub weights: RewardWeights,
    pub episode_seconds: f64,
    pub n_controlled: usize,
    pub action_size: usize,
    pub default_opponents: usize,
    pub opponents: RangeInclusive<usize>,
    /// Observation length for a given opponent count.
    pub observation_size: fn(usize) -> usize,
}

pub(crate) fn setup(req: SetupRequest<'_>, overrides: &EnvOverrides) -> Result<Setup> {
    let config = match &overrides.sim_config {
        Some(c) => c.clone(),
        None => SimConfig::for_league(req.field.league),
    };
    config.validate()?;
    let weights = overrides.weights.unwrap_or(req.weights);
    weights.validate()?;
    let n_opponents = overrides.n_opponents.unwrap_or(req.default_opponents);
    if !req.opponents.contains(&n_opponents) {
        return Err(Error::Config(format!(
            "{} supports {}..={} opponents, got {n_opponents}",
            req.id,
            req.opponents.start(),
            req.opponents.end()
        )));
    }
    if overrides.gate_spacing.is_some() && req.id != "SSL-Dribbling-v0" {
        return Err(Error::Config(format!("gate_spacing does not apply to {}", req.id)));
    }
    let episode_seconds = overrides.episode_seconds.unwrap_or(req.episode_seconds);
    if !(episode_seconds.is_finite() && episode_seconds > 0.0) {
        return Err(Error::Config(format!("episode_seconds must be positive, got {episode_seconds}")));
    }
    let max_steps = config.steps_for(episode_seconds);
    if max_steps == 0 {
        return Err(Error::Config("episode shorter than one control step".into()));
    }
    let n_blue = req.field.n_robots_blue;
    let field = req.field.with_teams(n_blue, n_opponents);
    field.validate()?;
    let seed = overrides.seed.unwrap_or(config.rng_seed);
    Ok(Setup {
        spec: EnvSpec {
            id: req.id.to_string(),
            field,
            sim_config: config,
            n_controlled: req.n_controlled,
            observation_size: (req.observation_size)(n_opponents),
            action_size_per_agent: req.action_size,
            episode_seconds,
            max_steps,
            seed,
        },
        weights,
        n_opponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::Drive;

    #[test]
    fn vss_full_forward() {
        let field = Field::vsss();
        let cmd = vss_command(Team::Blue, 0, &[1.0, 1.0], &field);
        assert_eq!(cmd.drive, Drive::Wheels(vec![50.0, 50.0]));
    }

    #[test]
    fn vss_action_clamped() {
        let field = Field::vsss();
        let cmd = vss_command(Team::Blue, 0, &[3.0, -2.0], &field);
        assert_eq!(cmd.drive, Drive::Wheels(vec![50.0, -50.0]));
    }

    #[test]
    fn ssl_zero_action_is_null_command() {
        let cmd = ssl_command(Team::Blue, 0, &[0.0; 5], SslActionScale::default());
        assert_eq!(cmd, RobotCommand::velocity(Team::Blue, 0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn ssl_kick_and_dribble_channels() {
        let s = SslActionScale::default();
        let cmd = ssl_command(Team::Blue, 1, &[0.0, 0.0, 0.0, -0.5, 0.0], s);
        assert_eq!((cmd.kick_power, cmd.dribbler_on), (0.0, false));
        let cmd = ssl_command(Team::Blue, 1, &[0.0, 0.0, 0.0, 2.0, 0.1], s);
        assert_eq!((cmd.kick_power, cmd.dribbler_on), (1.0, true));
    }
}
