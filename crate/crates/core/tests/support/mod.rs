//! Policies and episode recording shared by the integration and acceptance tests.
#![allow(dead_code)]

use pitchsim::env::{RewardTerms, TerminalCause};
use pitchsim::ou::{OuParams, OuProcess};
use pitchsim::{EnvSpec, Environment, Frame, League, Team};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Action sources for test episodes.
pub enum Driver {
    Zero,
    Uniform(ChaCha8Rng),
    Ou(OuProcess),
    /// Chases the ball and kicks toward a target, with uniform jitter.
    Chaser { rng: ChaCha8Rng, jitter: f64 },
}

impl Driver {
    /// Rotates through the four driver kinds.
    pub fn mixed(k: u64, spec: &EnvSpec) -> Self {
        let seed = 0x5eed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        match k % 4 {
            0 => Driver::Zero,
            1 => Driver::Uniform(ChaCha8Rng::seed_from_u64(seed)),
            2 => Driver::Ou(OuProcess::new(spec.action_len(), OuParams { sigma: 0.8, ..OuParams::default() }, seed)),
            _ => Driver::Chaser { rng: ChaCha8Rng::seed_from_u64(seed), jitter: 0.2 },
        }
    }

    pub fn act(&mut self, spec: &EnvSpec, frame: &Frame) -> Vec<f64> {
        let n = spec.action_len();
        match self {
            Driver::Zero => vec![0.0; n],
            Driver::Uniform(rng) => (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
            Driver::Ou(p) => p.sample(),
            Driver::Chaser { rng, jitter } => {
                let mut a = chase(spec, frame);
                for v in &mut a {
                    *v = (*v + rng.random_range(-*jitter..=*jitter)).clamp(-1.0, 1.0);
                }
                a
            }
        }
    }
}

fn angle_error(from_deg: f64, to_rad: f64) -> f64 {
    let d = to_rad.to_degrees() - from_deg;
    (d + 180.0).rem_euclid(360.0) - 180.0
}

/// Scripted controller for every controlled blue robot.
pub fn chase(spec: &EnvSpec, frame: &Frame) -> Vec<f64> {
    let field = &spec.field;
    let ball = frame.ball;
    let mut out = Vec::with_capacity(spec.action_len());
    for id in 0..spec.n_controlled as u32 {
        let me = frame.robot(Team::Blue, id).expect("controlled robot present");
        let to_ball = (ball.y - me.y).atan2(ball.x - me.x);
        match field.league {
            League::Vsss => {
                let e = angle_error(me.theta, to_ball) / 90.0;
                out.extend([(0.6 - e).clamp(-1.0, 1.0), (0.6 + e).clamp(-1.0, 1.0)]);
            }
            League::Ssl => {
                let (tx, ty) = if spec.id.starts_with("SSL-PassEndurance") {
                    let mate = frame.robot(Team::Blue, 1 - id).expect("pass partner present");
                    (mate.x, mate.y)
                } else {
                    (field.length / 2.0, 0.0)
                };
                let aim = (ty - ball.y).atan2(tx - ball.x);
                let err = angle_error(me.theta, if me.ir { aim } else { to_ball });
                let (dx, dy) = (ball.x - me.x, ball.y - me.y);
                let d = dx.hypot(dy).max(1e-9);
                let speed = (d * 1.5).min(0.6);
                let kick = if me.ir && err.abs() < 10.0 { 0.8 } else { -1.0 };
                out.extend([dx / d * speed, dy / d * speed, (err / 60.0).clamp(-1.0, 1.0), kick, 1.0]);
            }
        }
    }
    out
}

/// Everything observable about one episode.
#[derive(Debug, Clone, Default)]
pub struct Recording {
    /// Initial frame followed by one frame per step.
    pub frames: Vec<Frame>,
    pub actions: Vec<Vec<f64>>,
    pub causes: Vec<Option<TerminalCause>>,
    pub terms: Vec<Vec<RewardTerms>>,
    pub done: bool,
}

impl Recording {
    pub fn steps(&self) -> usize {
        self.actions.len()
    }

    pub fn final_cause(&self) -> Option<TerminalCause> {
        self.causes.last().copied().flatten()
    }

    /// Trajectory log bytes.
    pub fn log_bytes(&self) -> Vec<u8> {
        let mut w = pitchsim::log::TrajectoryWriter::new(Vec::new());
        for f in &self.frames {
            w.write(f).unwrap();
        }
        w.finish().unwrap()
    }
}

/// Runs one episode with actions drawn from `next` until done or `limit` steps.
pub fn record(
    env: &mut dyn Environment,
    seed: u64,
    limit: usize,
    mut next: impl FnMut(&EnvSpec, &Frame, usize) -> Vec<f64>,
) -> Recording {
    env.reset(Some(seed)).unwrap();
    let mut rec = Recording { frames: vec![env.frame().unwrap().clone()], ..Default::default() };
    let spec = env.spec().clone();
    while rec.steps() < limit {
        let action = next(&spec, env.frame().unwrap(), rec.steps());
        let r = env.step(&action).unwrap();
        rec.frames.push(env.frame().unwrap().clone());
        rec.actions.push(action);
        rec.causes.push(r.info.cause);
        rec.terms.push(r.reward_terms);
        if r.done {
            rec.done = true;
            break;
        }
    }
    rec
}

pub fn record_with(env: &mut dyn Environment, seed: u64, driver: &mut Driver) -> Recording {
    record(env, seed, usize::MAX, |spec, frame, _| driver.act(spec, frame))
}

/// Replays a fixed action list from the same reset seed.
pub fn replay(env: &mut dyn Environment, seed: u64, actions: &[Vec<f64>]) -> Recording {
    record(env, seed, actions.len(), |_, _, i| actions[i].clone())
}

/// Episode `seed` under the `k`-th mixed driver.
pub fn record_mixed(env: &mut dyn Environment, seed: u64, k: u64) -> Recording {
    let mut driver = Driver::mixed(k, env.spec());
    record_with(env, seed, &mut driver)
}
