use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pitchsim::bench::{run_episode, run_throughput, BenchConfig, BenchReport, Policy, DEFAULT_BENCH_REPS, DEFAULT_BENCH_STEPS};
use pitchsim::log::TrajectoryWriter;
use pitchsim::{make_with, EnvOverrides, Field, ENV_IDS};

/// Team sizes benchmarked when none are given.
const TABLE_SCENARIOS: [(usize, usize); 3] = [(1, 1), (6, 6), (11, 11)];

#[derive(Parser)]
#[command(name = "pitchsim", version, about = "Headless robot-soccer simulation: benchmarks and episode runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure simulator steps per second with OU-driven SSL robots.
    Bench {
        /// Blue robots; with --yellow, runs one scenario instead of 1v1, 6v6 and 11v11.
        #[arg(long, requires = "yellow")]
        blue: Option<usize>,
        #[arg(long, requires = "blue")]
        yellow: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BENCH_STEPS)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_BENCH_REPS)]
        reps: usize,
        /// Independent simulators on separate threads.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print one JSON report per line instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run one episode and print its outcome as JSON.
    Run {
        #[arg(long)]
        env: String,
        /// `zero`, `ou`, or a file with one JSON action array per line.
        #[arg(long, default_value = "zero")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Environment overrides (TOML, or JSON for a .json file).
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Write the trajectory log here.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Write rendered PPM frames into this directory.
        #[arg(long)]
        render: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Render a trajectory log into numbered PPM images.
    Render {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = League::Ssl)]
        league: League,
        /// Field description (TOML or JSON); overrides --league.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long, default_value_t = 960)]
        width: u32,
    },
    /// List the registered environment ids.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum League {
    Ssl,
    Vsss,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<pitchsim::Error>() {
                Some(pitchsim::Error::UnknownEnv { .. }) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Bench { blue, yellow, steps, reps, parallel, seed, json } => {
            let scenarios = match (blue, yellow) {
                (Some(b), Some(y)) => vec![(b, y)],
                _ => TABLE_SCENARIOS.to_vec(),
            };
            let mut reports = Vec::new();
            for (n_blue, n_yellow) in scenarios {
                let cfg = BenchConfig { steps, repetitions: reps, parallel, seed, ..BenchConfig::new(n_blue, n_yellow) };
                let report = run_throughput(&cfg)?;
                if json {
                    println!("{}", serde_json::to_string(&report)?);
                }
                reports.push(report);
            }
            if !json {
                print_table(&reports);
            }
            Ok(())
        }
        Command::Run { env, policy, seed, overrides, log, render, stride } => {
            run(&env, &policy, seed, overrides, log, render, stride)
        }
        Command::Render { log, out, league, field, stride, width } => {
            let field = match field {
                Some(path) => Field::load(path)?,
                None => match league {
                    League::Ssl => Field::ssl(),
                    League::Vsss => Field::vsss(),
                },
            };
            render_log(log, out, &field, stride, width)
        }
        Command::List => {
            for id in ENV_IDS {
                println!("{id}");
            }
            Ok(())
        }
    }
}

fn print_table(reports: &[BenchReport]) {
    println!("{:<10} {:>12} {:>12} {:>12}  fingerprint", "scenario", "steps/s", "std", "peak");
    for r in reports {
        println!(
            "{:<10} {:>12.1} {:>12.1} {:>12.1}  {}",
            format!("{}v{}", r.n_blue, r.n_yellow),
            r.steps_per_second_mean,
            r.steps_per_second_std,
            r.peak_steps_per_second,
            r.fingerprint
        );
    }
}

fn load_overrides(path: Option<PathBuf>) -> Result<EnvOverrides> {
    let Some(path) = path else {
        return Ok(EnvOverrides::default());
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        EnvOverrides::from_json_str(&text)
    } else {
        EnvOverrides::from_toml_str(&text)
    };
    Ok(parsed?)
}

fn run(
    id: &str,
    policy: &str,
    seed: u64,
    overrides: Option<PathBuf>,
    log: Option<PathBuf>,
    render: Option<PathBuf>,
    stride: usize,
) -> Result<()> {
    if stride == 0 {
        bail!("--stride must be at least 1");
    }
    let overrides = load_overrides(overrides)?;
    let mut env = make_with(id, &overrides)?;
    let mut policy = match policy {
        "zero" => Policy::Zero,
        "ou" => Policy::ou(env.spec().action_len(), seed),
        path => Policy::load_replay(path).with_context(|| format!("loading replay {path}"))?,
    };
    let mut writer = log.as_ref().map(TrajectoryWriter::create).transpose()?;
    let renderer = Renderer::new(render, env.spec().field.clone(), stride)?;
    let mut index = 0usize;
    let outcome = run_episode(env.as_mut(), &mut policy, seed, |frame| {
        if let Some(w) = writer.as_mut() {
            w.write(frame)?;
        }
        renderer.frame(index, frame)?;
        index += 1;
        Ok(())
    })?;
    if let Some(w) = writer {
        w.finish()?;
    }
    let report = serde_json::json!({
        "env": id,
        "seed": seed,
        "cause": outcome.cause,
        "metrics": outcome.metrics,
        "steps": outcome.steps,
        "sim_time": outcome.sim_time,
    });
    println!("{report}");
    Ok(())
}

#[cfg(feature = "render")]
struct Renderer {
    dir: Option<PathBuf>,
    field: Field,
    stride: usize,
    style: pitchsim::render::RenderStyle,
}

#[cfg(feature = "render")]
impl Renderer {
    fn new(dir: Option<PathBuf>, field: Field, stride: usize) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Renderer { dir, field, stride, style: Default::default() })
    }

    fn frame(&self, index: usize, frame: &pitchsim::Frame) -> pitchsim::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        if index.is_multiple_of(self.stride) {
            let img = pitchsim::render::render_frame(frame, &self.field, &self.style)?;
            img.write_ppm(dir.join(format!("frame_{index:06}.ppm")))?;
        }
        Ok(())
    }
}

#[cfg(not(feature = "render"))]
struct Renderer;

#[cfg(not(feature = "render"))]
impl Renderer {
    fn new(dir: Option<PathBuf>, _field: Field, _stride: usize) -> Result<Self> {
        if dir.is_some() {
            bail!("this build has no renderer; rebuild with the `render` feature");
        }
        Ok(Renderer)
    }

    fn frame(&self, _index: usize, _frame: &pitchsim::Frame) -> pitchsim::Result<()> {
        Ok(())
    }
}

#[cfg(feature = "render")]
fn render_log(log: PathBuf, out: PathBuf, field: &Field, stride: usize, width: u32) -> Result<()> {
    let style = pitchsim::render::RenderStyle { width, ..Default::default() };
    let written = pitchsim::render::render_episode(&log, &out, field, &style, stride)?;
    println!("wrote {} images to {}", written.len(), out.display());
    Ok(())
}

#[cfg(not(feature = "render"))]
fn render_log(_log: PathBuf, _out: PathBuf, _field: &Field, _stride: usize, _width: u32) -> Result<()> {
    bail!("this build has no renderer; rebuild with the `render` feature")
}
