// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pblockade_cli::commands::{self, RunOptions};
use pblockade_cli::config::OutputFormat;
use pblockade_cli::table::Table;
use pblockade_cli::{load_config, presets};

#[derive(Parser)]
#[command(name = "pblockade", version, about = "Phonon-blockade steady states, sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cantilever and magnet estimates with the coupling-versus-gap curve.
    Device(Common),
    /// Statistics of one steady state.
    Steady(Common),
    /// Statistics over one or two parameter axes.
    Sweep(Common),
    /// Delayed second-order correlation.
    G2tau(Common),
    /// Numeric versus closed-form comparisons.
    Validate(Common),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Fock-space truncation.
    #[arg(long)]
    fock_dim: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
}

fn run(cli: Cli) -> Result<()> {
    let (common, fallback) = match &cli.command {
        Command::Presets => {
            for name in presets::names() {
                println!("{name}");
            }
            return Ok(());
        }
        Command::Device(c) => (c, Some("device")),
        Command::Validate(c) => (c, Some("fig5")),
        Command::Steady(c) | Command::Sweep(c) | Command::G2tau(c) => (c, None),
    };
    let mut cfg = load_config(common.config.as_deref(), common.preset.as_deref(), fallback)?;
    if let Some(n) = common.fock_dim {
        cfg.fock_dim = Some(n);
        cfg.validate()?;
    }
    let opts = RunOptions { jobs: common.jobs };
    let table = match &cli.command {
        Command::Device(_) => commands::cmd_device(&cfg, opts)?,
        Command::Steady(_) => commands::cmd_steady(&cfg)?,
        Command::Sweep(_) => commands::cmd_sweep(&cfg, opts)?,
        Command::G2tau(_) => commands::cmd_g2tau(&cfg)?,
        Command::Validate(_) => commands::cmd_validate(&cfg)?,
        Command::Presets => unreachable!(),
    };
    let format = common.format.or(cfg.format).unwrap_or_default();
    let out = common.out.clone().or(cfg.out.as_ref().map(PathBuf::from));
    match out {
        Some(path) => {
            let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write(&table, format, BufWriter::new(f))
        }
        None => write(&table, format, io::stdout().lock()),
    }
}

fn write<W: Write>(table: &Table, format: OutputFormat, w: W) -> Result<()> {
    match format {
        OutputFormat::Csv => table.write_csv(w)?,
        OutputFormat::Json => table.write_json(w)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
