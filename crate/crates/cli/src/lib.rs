// Copyright 2026 Pblockade Contributors
// SPDX-License-Identifier: Apache-2.0

//! Batch front end: configuration files, built-in presets, parameter sweeps
//! and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod presets;
pub mod table;

use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::config::RunConfig;

/// Reads a config file or a named preset; `fallback` is used when neither
/// is given.
pub fn load_config(path: Option<&Path>, preset: Option<&str>, fallback: Option<&str>) -> Result<RunConfig> {
    match (path, preset.or(if path.is_none() { fallback } else { None })) {
        (Some(_), Some(_)) => bail!("give either --config or --preset, not both"),
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::from_toml(&text).with_context(|| format!("in config {}", p.display()))
        }
        (None, Some(name)) => Ok(presets::load(name)?),
        (None, None) => bail!("give --config <path> or --preset <name>"),
    }
}
