//! End-to-end execution of one configuration.

use std::path::{Path, PathBuf};

use log::info;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{write_all, ManifestInfo, Outputs};
use crate::pipelines::run_scenario;
use crate::registry::Registry;

/// Built-in configurations behind the figure subcommands.
pub const PRESETS: [(&str, &str); 4] = [
    ("fig2b", include_str!("../configs/fig2b.toml")),
    ("fig3bc", include_str!("../configs/fig3bc.toml")),
    ("fig4bcd", include_str!("../configs/fig4bcd.toml")),
    ("fig5bcd", include_str!("../configs/fig5bcd.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub struct RunResult {
    pub outputs: Outputs,
    pub dir: PathBuf,
    pub files: Vec<String>,
}

/// Parses, validates and computes without writing anything.
pub fn compute(text: &str, seed: Option<u64>) -> CliResult<(RunConfig, Outputs)> {
    let registry = Registry::builtin();
    let mut cfg = RunConfig::parse(text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let resolved = cfg.validate(&registry)?;
    info!("running scenario `{}`", resolved.config.scenario_name());
    let mut outputs = run_scenario(&resolved)?;
    outputs.set("seed", resolved.config.seed);
    outputs.set("n_max", resolved.config.n_max);
    Ok((resolved.config, outputs))
}

pub fn run(text: &str, opts: &RunOptions) -> CliResult<RunResult> {
    let (cfg, outputs) = compute(text, opts.seed)?;
    let dir = opts.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| Path::new("out").to_path_buf());
    let registry = Registry::builtin();
    let info = ManifestInfo { config_text: text, registry_version: &registry.version, seed: cfg.seed, scenario: cfg.scenario_name() };
    let files = write_all(&dir, &outputs, &info)?;
    info!("wrote {} files to {}", files.len(), dir.display());
    Ok(RunResult { outputs, dir, files })
}
