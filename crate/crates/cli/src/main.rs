//! `voa`: build vertex operator algebra instances from a flat config, run
//! verification suites, compute correlation functions and conformal blocks,
//! and write JSON reports.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use config::{parse_pairs, JobConfig};

#[derive(Parser)]
#[command(name = "voa", version, about = "Exact computations with vertex operator algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    truncation: Option<u32>,
    #[arg(long, global = true)]
    window: Option<i64>,
    #[arg(long = "pole-bound", global = true)]
    pole_bound: Option<i64>,
    /// `c=<rat>`, `l=<rat>` or `symbolic`.
    #[arg(long, global = true)]
    param: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Construct the algebra and module and summarize them.
    Build,
    /// Graded dimensions (and radical dimensions for quotients).
    Dims,
    /// Run a verification suite.
    Verify,
    /// Four-point function with commutativity and associativity checks.
    Npoint,
    /// Certify a conformal block or estimate coinvariant dimensions.
    Blocks,
    /// Exponential form of a coordinate change, optionally with covariance checks.
    Coords,
    /// Regression values from the slow reference computations.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Dims => "dims",
            Command::Verify => "verify",
            Command::Npoint => "npoint",
            Command::Blocks => "blocks",
            Command::Coords => "coords",
            Command::Oracle => "oracle",
        }
    }
}

fn load(cli: &Cli) -> Result<JobConfig> {
    let pairs = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_pairs(&text)?
        }
        None => Vec::new(),
    };
    let mut cfg = JobConfig::from_pairs(&pairs)?;
    if let Some(p) = &cli.param {
        cfg.apply_param_flag(p)?;
    }
    if let Some(n) = cli.truncation {
        cfg.truncation = n;
    }
    if let Some(w) = cli.window {
        anyhow::ensure!(w >= 0, "--window must be nonnegative");
        cfg.window = w;
    }
    if let Some(p) = cli.pole_bound {
        anyhow::ensure!(p >= 0, "--pole-bound must be nonnegative");
        cfg.pole_bound = p;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(String, bool, Option<PathBuf>)> {
    let cfg = load(cli)?;
    let (result, passed) = match cli.command {
        Command::Build => commands::build(&cfg),
        Command::Dims => commands::dims_cmd(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Npoint => commands::npoint(&cfg),
        Command::Blocks => commands::blocks(&cfg),
        Command::Coords => commands::coords(&cfg),
        Command::Oracle => commands::oracle(&cfg),
    }?;
    let doc = json!({
        "schema": "1",
        "command": cli.command.name(),
        "config": cfg.summary(cli.command.name()),
        "result": result,
        "run": { "tool": concat!("voa ", env!("CARGO_PKG_VERSION")), "passed": passed },
    });
    Ok((serde_json::to_string_pretty(&doc)? + "\n", passed, cfg.out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, passed, out)) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &text) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
