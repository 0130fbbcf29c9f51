//! Argument parsing and exit codes for the `eastlab` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

use super::params::{parse_direction, CommandKind, ExperimentConfig, NGrid};
use super::run::{run_config, write_outputs};

#[derive(Parser, Debug)]
#[command(name = "eastlab", version, about = "Simulation and exact analysis of the East process")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Simulate from the all-particle start and record infection times.
    Simulate,
    /// Simulate and render the front set as a PPM image.
    Shape,
    /// Mean hitting times along directions and velocity fits.
    Velocity,
    /// Spectral gap of a box.
    Gap,
    /// Dirichlet eigenvalue of a box at the origin.
    Dirichlet,
    /// Energy barrier and level-set bottleneck below a box corner.
    Bottleneck,
    /// Distance to equilibrium on a box over a time grid.
    Cutoff,
    /// Closed-form predictions.
    Theory,
    /// Run the built-in verification suite.
    Verify,
}

impl From<Cmd> for CommandKind {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => CommandKind::Simulate,
            Cmd::Shape => CommandKind::Shape,
            Cmd::Velocity => CommandKind::Velocity,
            Cmd::Gap => CommandKind::Gap,
            Cmd::Dirichlet => CommandKind::Dirichlet,
            Cmd::Bottleneck => CommandKind::Bottleneck,
            Cmd::Cutoff => CommandKind::Cutoff,
            Cmd::Theory => CommandKind::Theory,
            Cmd::Verify => CommandKind::Verify,
        }
    }
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<usize>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    t_points: Option<usize>,
    /// Direction `x1,..,xd`; repeatable.
    #[arg(long, global = true)]
    direction: Vec<String>,
    /// Grid `a:b:step`.
    #[arg(long, global = true)]
    n_grid: Option<String>,
    /// Box at the origin, `box:L1xL2`.
    #[arg(long, global = true)]
    region: Option<String>,
    #[arg(long, global = true)]
    side: Option<u64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config; its keys override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write files only; print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let o = &cli.opts;
    let mut c = ExperimentConfig::new(cli.command.into());
    if let Some(v) = o.d {
        c.d = v;
    }
    if let Some(v) = o.q {
        c.q = v;
    }
    if let Some(v) = o.seed {
        c.seed = v;
    }
    if let Some(v) = o.replicas {
        c.replicas = v;
    }
    if let Some(v) = o.t_max {
        c.t_max = v;
    }
    if let Some(v) = o.t_points {
        c.t_points = v;
    }
    if !o.direction.is_empty() {
        c.directions = o.direction.iter().map(|s| parse_direction(s)).collect::<Result<_>>()?;
    }
    if let Some(s) = &o.n_grid {
        c.n_grid = Some(NGrid::parse(s)?);
    }
    if o.region.is_some() {
        c.region = o.region.clone();
    }
    if let Some(v) = o.side {
        c.side = v;
    }
    if let Some(v) = o.beta {
        c.beta = v;
    }
    if let Some(v) = o.alpha {
        c.alpha = v;
    }
    if let Some(v) = &o.suite {
        c.suite = v.clone();
    }
    if let Some(path) = &o.config {
        c = c.overlay_json(&std::fs::read_to_string(path)?)?;
    }
    Ok(c)
}

/// Exit code for an error: 2 for configuration problems, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::Json(_) | Error::SizeCap { .. } | Error::Precondition(_) => 2,
        Error::Io(_) => 2,
        _ => 1,
    }
}

fn print_results(config: &ExperimentConfig, results: &serde_json::Value) {
    // A closed pipe (e.g. `| head`) is not an error worth panicking over.
    let mut out = std::io::stdout().lock();
    let _ = match (config.command, results.as_array()) {
        (CommandKind::Verify, Some(checks)) => checks.iter().try_for_each(|c| {
            let status = if c["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            writeln!(out, "{status} {} {}", c["name"].as_str().unwrap_or(""), c["detail"].as_str().unwrap_or(""))
        }),
        _ => writeln!(out, "{}", serde_json::to_string_pretty(results).unwrap_or_default()),
    };
}

/// Parses `argv`, runs the command, writes outputs and returns the exit
/// code: 0 on success, 1 on a failed verification or run, 2 on a bad
/// configuration.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("eastlab: {e}");
            return 2;
        }
    };
    let out = match run_config(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("eastlab: {e}");
            return exit_code(&e);
        }
    };
    if !cli.opts.quiet {
        print_results(&config, &out.results);
    }
    let dir = cli.opts.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = write_outputs(&out, &dir) {
        eprintln!("eastlab: {e}");
        return 1;
    }
    if out.passed {
        0
    } else {
        1
    }
}
