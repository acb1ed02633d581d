//! Take the ball from a static opponent holding it on its dribbler and score.

use rand_chacha::ChaCha8Rng;

use super::obs::{observation_size, observe, ObsNorm};
use super::reward::RewardWeights;
use super::spawn::{heading, Placer, Region};
use super::static_defenders::{half_court_assessment, HALF_SPAWN_MIN_X};
use super::{setup, ssl_command, Setup, SetupRequest, SslActionScale, EPISODE_SECONDS};
use crate::entities::{Ball, Field, Frame, League, Robot, Team};
use crate::env::{Assessment, EnvOverrides, EnvSpec, Task};
use crate::error::Result;
use crate::physics::{hold_point, RobotCommand};

const SPAWN_INSET: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ContestedPossession {
    setup: Setup,
    norm: ObsNorm,
    scale: SslActionScale,
}

impl ContestedPossession {
    pub fn new(overrides: &EnvOverrides) -> Result<Self> {
        let setup = setup(
            SetupRequest {
                id: "SSL-ContestedPossession-v0",
                field: Field::ssl().with_teams(1, 1),
                weights: RewardWeights::ssl(),
                episode_seconds: EPISODE_SECONDS,
                n_controlled: 1,
                action_size: 5,
                default_opponents: 1,
                opponents: 1..=1,
                observation_size: |n| observation_size(League::Ssl, 1 + n),
            },
            overrides,
        )?;
        let norm = ObsNorm::new(&setup.spec.field, &setup.spec.sim_config);
        Ok(ContestedPossession { setup, norm, scale: SslActionScale::default() })
    }

    /// Where the opponent's center is placed.
    pub fn spawn_region(&self) -> Region {
        let f = &self.setup.spec.field;
        Region {
            x: (HALF_SPAWN_MIN_X, f.length / 2.0 - SPAWN_INSET),
            y: (-f.width / 2.0 + SPAWN_INSET, f.width / 2.0 - SPAWN_INSET),
        }
    }
}

impl Task for ContestedPossession {
    type Episode = ();

    fn spec(&self) -> &EnvSpec {
        &self.setup.spec
    }

    fn get_initial_positions_frame(&self, rng: &mut ChaCha8Rng) -> Frame {
        let spec = &self.setup.spec;
        let field = &spec.field;
        let mut placer = Placer::new();
        placer.add(0.0, 0.0, field.robot_radius);
        // the held ball reaches past the robot, so keep clear of the agent by its length
        let (x, y) = placer.place(rng, self.spawn_region(), field.robot_radius, 3.0 * field.ball_radius);
        let theta = heading(rng);
        let (bx, by) = hold_point(x, y, theta, field, &spec.sim_config);
        let mut opponent = Robot::new(Team::Yellow, 0, x, y, theta, 4);
        opponent.dribbler_on = true;
        Frame::new(Ball::at(bx, by))
            .with_robot(Robot::new(Team::Blue, 0, 0.0, 0.0, 0.0, 4))
            .with_robot(opponent)
    }

    fn begin_episode(&self, _frame: &Frame, _rng: &mut ChaCha8Rng) {}

    fn get_commands(&self, _episode: &mut (), _frame: &Frame, actions: &[f64]) -> Vec<RobotCommand> {
        vec![
            ssl_command(Team::Blue, 0, actions, self.scale),
            RobotCommand::velocity(Team::Yellow, 0, 0.0, 0.0, 0.0).with_dribbler(true),
        ]
    }

    fn frame_to_observations(&self, frame: &Frame) -> Vec<Vec<f64>> {
        vec![observe(frame, Team::Blue, 0, &self.norm)]
    }

    fn calculate_reward_and_done(&self, _episode: &mut (), frame: &Frame, last: &Frame) -> Assessment {
        half_court_assessment(&self.setup, frame, last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Env, Environment};

    #[test]
    fn opponent_starts_with_the_ball() {
        let mut env = Env::new(ContestedPossession::new(&EnvOverrides::default()).unwrap()).unwrap();
        for seed in 0..50 {
            let obs = env.reset(Some(seed)).unwrap();
            assert_eq!(obs[0].len(), 20);
            let frame = env.frame().unwrap();
            assert!(frame.robot(Team::Yellow, 0).unwrap().ir, "seed {seed}");
        }
    }

    #[test]
    fn held_ball_stays_put_under_zero_action() {
        let mut env = Env::new(ContestedPossession::new(&EnvOverrides::default()).unwrap()).unwrap();
        env.reset(Some(3)).unwrap();
        let before = env.frame().unwrap().ball;
        for _ in 0..40 {
            assert!(!env.step(&[0.0; 5]).unwrap().done);
        }
        let after = env.frame().unwrap().ball;
        assert!((after.x - before.x).hypot(after.y - before.y) < 1e-9);
    }
}
