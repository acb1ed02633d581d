//! Throughput measurement and headless episode runs.
//!
//! The throughput benchmark drives every robot of an SSL field with its own
//! Ornstein-Uhlenbeck process. Commands are generated ahead of each timed
//! chunk, so the clock only covers [`Simulator::step`].

use std::fs;
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::entities::{Ball, Field, Frame, Robot, Team};
use crate::env::{EpisodeOutcome, Environment};
use crate::error::{Error, Result};
use crate::ou::{OuParams, OuProcess};
use crate::physics::{RobotCommand, SimConfig, Simulator};
use crate::suite::{ssl_command, SslActionScale};

pub const MIN_BENCH_STEPS: u64 = 10_000;
pub const WARMUP_STEPS: u64 = 1_000;
pub const DEFAULT_BENCH_STEPS: u64 = 100_000;
pub const DEFAULT_BENCH_REPS: usize = 5;
const CHUNK: usize = 1_000;
const ROBOT_SPACING: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_blue: usize,
    pub n_yellow: usize,
    /// Timed steps per repetition and per thread.
    pub steps: u64,
    pub repetitions: usize,
    /// Independent simulators stepped on their own threads.
    pub parallel: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(n_blue: usize, n_yellow: usize) -> Self {
        BenchConfig {
            n_blue,
            n_yellow,
            steps: DEFAULT_BENCH_STEPS,
            repetitions: DEFAULT_BENCH_REPS,
            parallel: 1,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps < MIN_BENCH_STEPS {
            return Err(Error::Config(format!("steps must be at least {MIN_BENCH_STEPS}, got {}", self.steps)));
        }
        if self.repetitions == 0 || self.parallel == 0 {
            return Err(Error::Config("repetitions and parallel must be at least 1".into()));
        }
        if self.n_blue + self.n_yellow == 0 {
            return Err(Error::Config("the scenario needs at least one robot".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n_blue: usize,
    pub n_yellow: usize,
    /// Steps per repetition, summed over threads.
    pub total_steps: u64,
    pub repetitions: usize,
    pub parallel: usize,
    /// Stepping time of each repetition (slowest thread).
    pub wall_seconds: Vec<f64>,
    /// `total_steps / wall_seconds` of each repetition.
    pub steps_per_second: Vec<f64>,
    pub steps_per_second_mean: f64,
    /// Sample standard deviation; 0 for a single repetition.
    pub steps_per_second_std: f64,
    /// Single-simulator rate over the fastest 1000-step chunk of any
    /// repetition. Preemption only ever adds time, so this is far less
    /// sensitive to machine noise than the means.
    pub peak_steps_per_second: f64,
    pub fingerprint: String,
}

pub fn bench_field(n_blue: usize, n_yellow: usize) -> Field {
    Field::ssl().with_teams(n_blue, n_yellow)
}

/// Robots on a grid, each team in its own half, ball at the center.
pub fn bench_frame(field: &Field) -> Frame {
    let mut frame = Frame::new(Ball::default());
    let rows = ((field.width - 1.0) / ROBOT_SPACING).floor().max(1.0) as usize;
    for (team, side) in [(Team::Blue, -1.0), (Team::Yellow, 1.0)] {
        let n = match team {
            Team::Blue => field.n_robots_blue,
            Team::Yellow => field.n_robots_yellow,
        };
        for i in 0..n {
            let (col, row) = (i / rows, i % rows);
            let x = side * (0.5 + ROBOT_SPACING * col as f64);
            let y = (row as f64 - (rows - 1) as f64 / 2.0) * ROBOT_SPACING;
            let theta = if side < 0.0 { 0.0 } else { 180.0 };
            frame.insert(Robot::new(team, i as u32, x, y, theta, field.wheel_count()));
        }
    }
    frame
}

/// Short hash of everything that determines the simulated work.
pub fn fingerprint(field: &Field, sim: &SimConfig, cfg: &BenchConfig, ou: &OuParams) -> String {
    let payload = serde_json::json!({
        "field": field,
        "sim_config": sim,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "ou": ou,
    });
    let digest = Sha256::digest(payload.to_string().as_bytes());
    hex::encode(&digest[..8])
}

struct Driver {
    sim: Simulator,
    keys: Vec<(Team, u32)>,
    noise: Vec<OuProcess>,
    scale: SslActionScale,
    buf: Vec<Vec<RobotCommand>>,
}

impl Driver {
    fn new(field: &Field, sim: &SimConfig, ou: OuParams, seed: u64) -> Result<Self> {
        let frame = bench_frame(field);
        let keys: Vec<_> = frame.robots().map(|r| r.key()).collect();
        let noise = (0..keys.len())
            .map(|i| OuProcess::new(3, ou, seed.wrapping_mul(1_000_003).wrapping_add(i as u64)))
            .collect();
        Ok(Driver {
            sim: Simulator::new(field.clone(), sim.clone(), frame)?,
            keys,
            noise,
            scale: SslActionScale::default(),
            buf: Vec::with_capacity(CHUNK),
        })
    }

    fn fill(&mut self, n: usize) {
        self.buf.clear();
        let mut a = [0.0; 5];
        for _ in 0..n {
            let step = self
                .keys
                .iter()
                .zip(self.noise.iter_mut())
                .map(|(&(team, id), p)| {
                    p.sample_into(&mut a[..3]);
                    ssl_command(team, id, &a, self.scale)
                })
                .collect();
            self.buf.push(step);
        }
    }

    /// Steps `n` times. Returns the time spent inside the simulator and the
    /// fastest full chunk.
    fn run(&mut self, mut n: u64) -> Result<Timing> {
        let mut timing = Timing { total: Duration::ZERO, best_chunk: Duration::MAX };
        while n > 0 {
            let k = (n as usize).min(CHUNK);
            self.fill(k);
            let start = Instant::now();
            for cmds in &self.buf {
                self.sim.step(cmds)?;
            }
            let spent = start.elapsed();
            timing.total += spent;
            if k == CHUNK {
                timing.best_chunk = timing.best_chunk.min(spent);
            }
            n -= k as u64;
        }
        Ok(timing)
    }
}

#[derive(Debug, Clone, Copy)]
struct Timing {
    total: Duration,
    best_chunk: Duration,
}

fn one_run(field: &Field, sim: &SimConfig, ou: OuParams, seed: u64, steps: u64) -> Result<Timing> {
    let mut driver = Driver::new(field, sim, ou, seed)?;
    driver.run(WARMUP_STEPS)?;
    driver.run(steps)
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_throughput(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let field = bench_field(cfg.n_blue, cfg.n_yellow);
    let sim = SimConfig::ssl();
    let ou = OuParams { dt: sim.control_dt, ..OuParams::default() };
    let mut wall_seconds = Vec::with_capacity(cfg.repetitions);
    let mut best_chunk = Duration::MAX;
    for rep in 0..cfg.repetitions {
        let base = cfg.seed.wrapping_add(rep as u64 * 7919);
        let timings = if cfg.parallel == 1 {
            vec![one_run(&field, &sim, ou, base, cfg.steps)?]
        } else {
            let times: Vec<Result<Timing>> = thread::scope(|s| {
                let handles: Vec<_> = (0..cfg.parallel)
                    .map(|t| {
                        let (field, sim) = (&field, &sim);
                        s.spawn(move || one_run(field, sim, ou, base.wrapping_add(t as u64 * 104_729), cfg.steps))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("bench thread panicked")).collect()
            });
            times.into_iter().collect::<Result<Vec<_>>>()?
        };
        let slowest = timings.iter().map(|t| t.total).max().unwrap_or_default();
        wall_seconds.push(slowest.as_secs_f64().max(f64::MIN_POSITIVE));
        best_chunk = timings.iter().map(|t| t.best_chunk).fold(best_chunk, Duration::min);
    }
    let total_steps = cfg.steps * cfg.parallel as u64;
    let steps_per_second: Vec<f64> = wall_seconds.iter().map(|w| total_steps as f64 / w).collect();
    let (mean, std) = mean_std(&steps_per_second);
    Ok(BenchReport {
        n_blue: cfg.n_blue,
        n_yellow: cfg.n_yellow,
        total_steps,
        repetitions: cfg.repetitions,
        parallel: cfg.parallel,
        wall_seconds,
        steps_per_second,
        steps_per_second_mean: mean,
        steps_per_second_std: std,
        peak_steps_per_second: CHUNK as f64 / best_chunk.as_secs_f64().max(f64::MIN_POSITIVE),
        fingerprint: fingerprint(&field, &sim, cfg, &ou),
    })
}

/// Action source for [`run_episode`].
#[derive(Debug, Clone)]
pub enum Policy {
    Zero,
    Ou(Box<OuProcess>),
    Replay { actions: Vec<Vec<f64>>, next: usize },
}

impl Policy {
    pub fn ou(dims: usize, seed: u64) -> Self {
        Policy::Ou(Box::new(OuProcess::new(dims, OuParams::default(), seed)))
    }

    /// One flat action array per line, as JSON.
    pub fn parse_replay(text: &str) -> Result<Self> {
        let mut actions = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = serde_json::from_str(line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            actions.push(row);
        }
        Ok(Policy::Replay { actions, next: 0 })
    }

    pub fn load_replay(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_replay(&fs::read_to_string(path)?)
    }

    pub fn next_action(&mut self, len: usize) -> Result<Vec<f64>> {
        match self {
            Policy::Zero => Ok(vec![0.0; len]),
            Policy::Ou(p) => {
                if p.dims() != len {
                    return Err(Error::Action(format!("policy emits {} values, env expects {len}", p.dims())));
                }
                Ok(p.sample())
            }
            Policy::Replay { actions, next } => {
                let a = actions
                    .get(*next)
                    .cloned()
                    .ok_or_else(|| Error::State(format!("replay exhausted after {} actions", actions.len())))?;
                *next += 1;
                Ok(a)
            }
        }
    }
}

/// Resets `env` with `seed` and steps it with `policy` until done. `on_frame`
/// sees the initial frame and every frame after a step.
pub fn run_episode(
    env: &mut dyn Environment,
    policy: &mut Policy,
    seed: u64,
    mut on_frame: impl FnMut(&Frame) -> Result<()>,
) -> Result<EpisodeOutcome> {
    env.reset(Some(seed))?;
    on_frame(env.frame().expect("reset produces a frame"))?;
    let len = env.spec().action_len();
    loop {
        let action = policy.next_action(len)?;
        let result = env.step(&action)?;
        let frame = env.frame().expect("stepped env has a frame");
        on_frame(frame)?;
        if result.done {
            return Ok(EpisodeOutcome {
                cause: result.info.cause.expect("terminal steps carry a cause"),
                metrics: result.info.metrics,
                steps: frame.step_count,
                sim_time: frame.sim_time,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make, TerminalCause};

    fn quick(n_blue: usize, n_yellow: usize, reps: usize) -> BenchConfig {
        BenchConfig { steps: MIN_BENCH_STEPS, repetitions: reps, ..BenchConfig::new(n_blue, n_yellow) }
    }

    #[test]
    fn report_arithmetic() {
        let r = run_throughput(&quick(1, 1, 3)).unwrap();
        assert_eq!(r.steps_per_second.len(), 3);
        for (sps, w) in r.steps_per_second.iter().zip(&r.wall_seconds) {
            assert!((sps - r.total_steps as f64 / w).abs() < 1e-6 * sps);
        }
        let (m, s) = mean_std(&r.steps_per_second);
        assert_eq!((m, s), (r.steps_per_second_mean, r.steps_per_second_std));
        assert!(r.peak_steps_per_second >= r.steps_per_second.iter().cloned().fold(0.0, f64::max) * 0.999);
    }

    #[test]
    fn single_repetition_has_zero_std() {
        let r = run_throughput(&quick(1, 0, 1)).unwrap();
        assert_eq!(r.steps_per_second_std, 0.0);
    }

    #[test]
    fn too_few_steps_rejected() {
        let cfg = BenchConfig { steps: 10, ..BenchConfig::new(1, 1) };
        assert!(matches!(run_throughput(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn parallel_counts_all_threads() {
        let cfg = BenchConfig { parallel: 2, ..quick(1, 1, 1) };
        let r = run_throughput(&cfg).unwrap();
        assert_eq!(r.total_steps, 2 * MIN_BENCH_STEPS);
    }

    #[test]
    fn fingerprint_tracks_configuration() {
        let f = bench_field(1, 1);
        let s = SimConfig::ssl();
        let ou = OuParams::default();
        let a = fingerprint(&f, &s, &quick(1, 1, 1), &ou);
        assert_eq!(a, fingerprint(&f, &s, &quick(1, 1, 1), &ou));
        assert_ne!(a, fingerprint(&bench_field(6, 6), &s, &quick(6, 6, 1), &ou));
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn bench_frame_is_overlap_free() {
        let field = bench_field(11, 11);
        let f = bench_frame(&field);
        assert_eq!(f.robot_count(), 22);
        assert!(!crate::env::bodies_overlap(&f, &field));
    }

    #[test]
    fn go_to_ball_zero_policy_times_out() {
        let mut env = make("SSL-GoToBall-v0").unwrap();
        let out = run_episode(env.as_mut(), &mut Policy::Zero, 42, |_| Ok(())).unwrap();
        assert_eq!(out.cause, TerminalCause::Timeout);
        assert_eq!(out.metrics["ball_reached"], 0.0);
        assert_eq!(out.steps, 1200);
    }

    #[test]
    fn replay_exhaustion_is_an_error() {
        let mut env = make("SSL-GoToBall-v0").unwrap();
        let mut p = Policy::parse_replay("[0,0,0,0,0]\n[0.1,0,0,0,0]\n").unwrap();
        assert!(matches!(run_episode(env.as_mut(), &mut p, 0, |_| Ok(())), Err(Error::State(_))));
    }

    #[test]
    fn replay_parse_error_names_line() {
        let err = Policy::parse_replay("[0]\n\n[oops]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn same_seed_same_outcome() {
        let mut a = make("VSSS-SingleAgent-v0").unwrap();
        let mut b = make("VSSS-SingleAgent-v0").unwrap();
        let oa = run_episode(a.as_mut(), &mut Policy::ou(2, 5), 9, |_| Ok(())).unwrap();
        let ob = run_episode(b.as_mut(), &mut Policy::ou(2, 5), 9, |_| Ok(())).unwrap();
        assert_eq!(oa, ob);
    }
}
