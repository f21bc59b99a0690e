use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ikfp::config::{parse_config, Kind};
use ikfp::experiment::run_experiment;

/// Worker threads for the parallel kernels; results do not depend on it.
const WORKERS_ENV: &str = "IKFP_WORKERS";

#[derive(Parser)]
#[command(
    name = "ikfp",
    version,
    about = "Spectral and particle experiments for the inertial Kuramoto Fokker-Planck equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kinetic run with energy, regime and decay diagnostics.
    SimulateKinetic(Common),
    /// Diffusively rescaled run at a single epsilon.
    SimulateRescaled(Common),
    /// Drift-diffusion limit equation.
    SimulateDd(Common),
    /// Rescaled runs over a list of epsilon against the limit.
    SweepEpsilon(Common),
    /// Inequality battery and elliptic identities on random data.
    Verify(Common),
    /// Euler-Maruyama particle ensemble.
    SimulateParticles(Common),
    /// Particle ensemble against the kinetic solver.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; omitted means all defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// `section.key=value`, applied before validation.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Command {
    fn split(self) -> (Kind, Common) {
        match self {
            Command::SimulateKinetic(c) => (Kind::Stability, c),
            Command::SimulateRescaled(c) => (Kind::Rescaled, c),
            Command::SimulateDd(c) => (Kind::Dd, c),
            Command::SweepEpsilon(c) => (Kind::Sweep, c),
            Command::Verify(c) => (Kind::Verify, c),
            Command::SimulateParticles(c) => (Kind::Particles, c),
            Command::Compare(c) => (Kind::Compare, c),
        }
    }
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{WORKERS_ENV} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_workers()?;
    let (kind, common) = cli.command.split();
    let text = match &common.config {
        Some(p) => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        None => String::new(),
    };
    let mut overrides = common.overrides.clone();
    if let Some(s) = common.seed {
        overrides.push(format!("seed={s}"));
    }
    let cfg = parse_config(&text, &overrides, Some(kind))?;
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    log::info!("running {} into {}", kind.name(), out.display());
    let outcome = run_experiment(&cfg, &out)?;
    for (k, v) in &outcome.summary {
        println!("{k} = {v}");
    }
    Ok(outcome.passed)
}

/// 0 success, 1 failed checks, 2 configuration or runtime error.
fn status(result: &Result<bool>) -> u8 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let result = run(Cli::parse());
    match &result {
        Ok(false) => eprintln!("acceptance checks failed"),
        Err(e) => eprintln!("error: {e:#}"),
        Ok(true) => {}
    }
    ExitCode::from(status(&result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> Result<bool> {
        let mut argv = vec!["ikfp"];
        argv.extend_from_slice(args);
        run(Cli::try_parse_from(argv)?)
    }

    #[test]
    fn config_errors_exit_2_with_every_line() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.toml");
        std::fs::write(&bad, "[grid]\nn_theta = 7\nwidth = 3\n").unwrap();
        let r = invoke(&["simulate-kinetic", "--config", bad.to_str().unwrap()]);
        assert_eq!(status(&r), 2);
        let msg = format!("{:#}", r.unwrap_err());
        assert!(msg.contains("line 2") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn failed_verify_exits_1_and_records_seed() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("v");
        let r = invoke(&[
            "verify",
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "5",
            "--override",
            "verify.n_fields=20",
            "--override",
            "verify.sigma_values=[3.0]",
            "--override",
            "grid.n_theta=8",
            "--override",
            "grid.n_hermite=4",
        ]);
        assert_eq!(status(&r), 1);
        let manifest = std::fs::read_to_string(out.join("manifest.toml")).unwrap();
        assert!(manifest.contains("seed = 5"));
    }

    #[test]
    fn dd_run_with_overrides_succeeds() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("d");
        let r = invoke(&[
            "simulate-dd",
            "--out",
            out.to_str().unwrap(),
            "--override",
            "initial.family=well-prepared",
            "--override",
            "initial.delta=0.4",
        ]);
        assert_eq!(status(&r), 0, "{r:?}");
        assert!(out.join("dd.csv").exists());
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(Cli::try_parse_from(["ikfp", "verify", "--bogus"]).is_err());
    }
}
