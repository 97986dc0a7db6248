//! Std companion to `sdre-core`: experiment configs, the problem registry,
//! CSV/JSON output and a wall clock.

pub mod config;
pub mod experiment;
pub mod output;
pub mod registry;

use std::time::Instant;

use sdre_core::simulate::Clock;

pub use config::{parse_config, parse_config_with, ConfigError, ExperimentConfig, FixedChoice};
pub use experiment::{run_experiment, ExperimentError, ExperimentReport, OUTPUT_DIR_ENV};
pub use registry::{ProblemInfo, Registry, RegistryError};

/// Monotonic seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
