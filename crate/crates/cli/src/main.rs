//! Command-line runner for the built-in scenario catalog and scenario files.

mod output;
mod svg;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use kk_spectra::scenario::{self, ScenarioConfig, ScenarioError};
use rayon::prelude::*;

const EXIT_RUNTIME: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

/// Run spectral scenarios and write CSV, JSON and SVG artifacts.
///
/// With no scenario names and no --config, every built-in scenario runs
/// (restricted to --tag when given).
#[derive(Debug, Parser)]
#[command(name = "kk-spectra", version)]
struct Cli {
    /// Built-in scenario names.
    names: Vec<String>,
    /// Scenario file (TOML or JSON, one scenario per file); repeatable.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    /// Output root; KK_SPECTRA_OUT takes precedence.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Scenarios run concurrently.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Seed for every scenario, overriding config seeds.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Print the catalog and exit.
    #[arg(long)]
    list: bool,
    /// Restrict the catalog to scenarios with this tag.
    #[arg(long, value_name = "T")]
    tag: Option<String>,
}

fn load_config(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Schema(format!("{}: {e}", path.display())))?;
    let schema = |e: String| ScenarioError::Schema(format!("{}: {e}", path.display()));
    let cfg: ScenarioConfig = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| schema(e.to_string()))?,
        Some("json") => serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?,
        _ => return Err(schema("expected a .toml or .json file".into())),
    };
    cfg.validate().map_err(|e| schema(e.to_string()))?;
    Ok(cfg)
}

fn jobs_from(cli: &Cli) -> Result<Vec<ScenarioConfig>, ScenarioError> {
    let mut jobs = Vec::new();
    for path in &cli.configs {
        jobs.push(load_config(path)?);
    }
    for name in &cli.names {
        let cfg = ScenarioConfig::builtin(name);
        cfg.validate()?;
        jobs.push(cfg);
    }
    if cli.names.is_empty() && cli.configs.is_empty() {
        jobs.extend(scenario::list(cli.tag.as_deref()).iter().map(|s| ScenarioConfig::builtin(s.name)));
    }
    let mut seen = BTreeSet::new();
    for j in &jobs {
        if !seen.insert(j.label().to_string()) {
            return Err(ScenarioError::Schema(format!("two scenarios share the name `{}`", j.label())));
        }
    }
    Ok(jobs)
}

fn out_root(cli: &Cli) -> Option<PathBuf> {
    std::env::var_os("KK_SPECTRA_OUT").filter(|v| !v.is_empty()).map(PathBuf::from).or_else(|| cli.out.clone())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for s in scenario::list(cli.tag.as_deref()) {
            println!("{:<20} {:<32} {}", s.name, format!("[{}]", s.tags.join(",")), s.doc);
        }
        return ExitCode::SUCCESS;
    }
    let jobs = match jobs_from(&cli) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SCHEMA);
        }
    };
    let root = out_root(&cli);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let results: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|cfg| {
                let out = scenario::run(cfg, cli.seed)?;
                let dir = match (&root, cfg.output.as_ref().and_then(|o| o.dir.clone())) {
                    (Some(r), _) => r.join(cfg.label()),
                    (None, Some(d)) => d,
                    (None, None) => PathBuf::from("kk-out").join(cfg.label()),
                };
                let plots = cfg.output.as_ref().and_then(|o| o.plots).unwrap_or(true);
                output::write_artifacts(&dir, &out, plots)
                    .map_err(|e| ScenarioError::Compute { scenario: cfg.label().into(), message: format!("{}: {e}", dir.display()) })?;
                Ok::<_, ScenarioError>((out, dir))
            })
            .collect()
    });
    let (mut runtime, mut failed) = (false, false);
    for r in results {
        match r {
            Ok((out, dir)) => {
                let status = if out.passed() { "PASS" } else { "FAIL" };
                println!("{status} {} ({} checks) -> {}", out.scenario, out.checks.len(), dir.display());
                for c in out.failures() {
                    println!("  failed {}: {} (value {}, threshold {})", c.name, c.detail, c.value, c.tolerance);
                }
                failed |= !out.passed();
            }
            Err(e) => {
                eprintln!("error: {e}");
                runtime = true;
            }
        }
    }
    if runtime {
        ExitCode::from(EXIT_RUNTIME)
    } else if failed {
        ExitCode::from(EXIT_ASSERTION)
    } else {
        ExitCode::SUCCESS
    }
}
