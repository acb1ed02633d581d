//! Headless, deterministic robot-soccer simulation for reinforcement learning.
//!
//! The crate is organized around a few layers:
//!
//! * [`entities`]: the shared state types (ball, robots, frames, field).
//! * [`physics`]: the fixed-timestep 2D simulator.
//! * [`env`]: the environment contract and the four-hook task trait.
//! * [`suite`]: the eight benchmark environments.
//! * [`ou`]: Ornstein-Uhlenbeck noise driving uncontrolled robots.
//! * [`bench`]: throughput measurement and headless episode runs.
//! * `render` (feature `render`): on-demand PPM/SVG snapshots.

pub mod bench;
pub mod entities;
pub mod env;
pub mod error;
pub mod log;
pub mod ou;
pub mod physics;
#[cfg(feature = "render")]
pub mod render;
pub mod suite;

pub use entities::{field_contains, get_robot, normalize_angle_deg, Ball, Field, Frame, League, Robot, Team};
pub use env::{make, make_with, EnvOverrides, EnvSpec, Environment, StepResult, ENV_IDS};
pub use error::{Error, Result};
pub use physics::{RobotCommand, SimConfig, Simulator};
