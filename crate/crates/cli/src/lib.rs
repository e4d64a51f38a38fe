//! Front end for the `ntqpt` binary: run-file parsing, presets, command
//! execution and byte-stable output.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use ntqpt::spectral::SpectrumCache;

pub use commands::{run, RunOutcome};
pub use config::{load, parse_config, Command, ConfigSource, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TASK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Command-line overrides applied on top of a run file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn resolve(mut config: RunConfig, o: &Overrides) -> RunConfig {
    if o.workers.is_some() {
        config.workers = o.workers;
    }
    if o.cache.is_some() {
        config.cache = o.cache.clone();
    }
    if let Some(out) = &o.out {
        config.output = out.clone();
    }
    config
}

/// Runs `config` on a pool of `config.workers` threads (all cores when
/// unset).
pub fn execute(config: &RunConfig, source: &ConfigSource) -> Result<RunOutcome> {
    let cache = config.cache.as_deref().map(open_cache).transpose()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().context("starting worker pool")?;
    pool.install(|| run(config, source, cache.as_ref()))
}

fn open_cache(dir: &Path) -> Result<SpectrumCache> {
    SpectrumCache::new(dir).with_context(|| format!("opening spectrum cache {}", dir.display()))
}
