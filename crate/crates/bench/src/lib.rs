//! Fixtures shared by the criterion benchmarks.

use pitchsim::bench::{bench_field, bench_frame};
use pitchsim::ou::{OuParams, OuProcess};
use pitchsim::suite::{ssl_command, SslActionScale};
use pitchsim::{RobotCommand, SimConfig, Simulator};

/// Team sizes of the throughput table: 1v1, 6v6 and 11v11.
pub const SCENARIOS: [(usize, usize); 3] = [(1, 1), (6, 6), (11, 11)];

/// A simulator on the benchmark grid plus `n` steps of OU-driven commands.
pub fn fixture(n_blue: usize, n_yellow: usize, n: usize, seed: u64) -> (Simulator, Vec<Vec<RobotCommand>>) {
    let field = bench_field(n_blue, n_yellow);
    let frame = bench_frame(&field);
    let keys: Vec<_> = frame.robots().map(|r| r.key()).collect();
    let mut noise: Vec<OuProcess> = (0..keys.len())
        .map(|i| OuProcess::new(3, OuParams::default(), seed + i as u64))
        .collect();
    let mut a = [0.0; 5];
    let commands = (0..n)
        .map(|_| {
            keys.iter()
                .zip(noise.iter_mut())
                .map(|(&(team, id), p)| {
                    p.sample_into(&mut a[..3]);
                    ssl_command(team, id, &a, SslActionScale::default())
                })
                .collect()
        })
        .collect();
    let sim = Simulator::new(field, SimConfig::ssl(), frame).expect("benchmark field is valid");
    (sim, commands)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        let (sim, cmds) = fixture(6, 6, 10, 0);
        assert_eq!(sim.frame().robot_count(), 12);
        assert_eq!(cmds.len(), 10);
        assert!(cmds.iter().all(|c| c.len() == 12));
    }
}
