use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use pitchsim::make;
use pitchsim_bench::{fixture, SCENARIOS};

const STEPS: usize = 1_000;

fn simulator_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulator_step");
    group.throughput(Throughput::Elements(STEPS as u64));
    for (blue, yellow) in SCENARIOS {
        let (sim, commands) = fixture(blue, yellow, STEPS, 7);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{blue}v{yellow}")), &commands, |b, commands| {
            b.iter_batched_ref(
                || sim.clone(),
                |sim| {
                    for cmds in commands {
                        sim.step(cmds).unwrap();
                    }
                },
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn env_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("env_step");
    for id in ["VSSS-SingleAgent-v0", "SSL-StaticDefenders-v0"] {
        let mut env = make(id).unwrap();
        let action = vec![0.1; env.spec().action_len()];
        group.bench_function(id, |b| {
            env.reset(Some(0)).unwrap();
            b.iter(|| {
                if env.step(&action).map(|r| r.done).unwrap_or(true) {
                    env.reset(None).unwrap();
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, simulator_step, env_step);
criterion_main!(benches);
