//! Experiment configuration files: line-oriented `key = value` under
//! `[section]` headers. Unknown sections and keys are errors so that a
//! typo cannot silently fall back to a default.
//!
//! Sections and keys (all optional; defaults in parentheses):
//!
//! ```text
//! [array]       model (p4-1)
//! [medium]      density (1000)
//! [simulation]  emission (vokurka), clouds (1), snr_db (none),
//!               cycles (drawn), freq (drawn), seed (0)
//! [beamform]    eps, delta, tau (solver defaults), grid_decim (4)
//! [bench]       repeats (5), threads (1)
//! ```
//!
//! Blank lines and lines starting with `#` or `;` are ignored.

use crate::error::{CliError, Result};
use pam_core::arrays::ArrayModel;
use pam_core::cavsim::EmissionModel;
use std::path::Path;

/// Parsed experiment configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub array: ArrayModel,
    /// Medium mass density, kg/m^3 (speed of sound is drawn per acquisition).
    pub density: f64,
    pub emission: EmissionModel,
    pub clouds: u8,
    /// Channel SNR to enforce; None leaves frames noiseless.
    pub snr_db: Option<f64>,
    /// Pinned excitation cycle count; None draws per acquisition.
    pub cycles: Option<u32>,
    /// Pinned excitation frequency, Hz; None draws per acquisition.
    pub freq: Option<f64>,
    pub seed: u64,
    /// Beamformer overrides; None keeps the solver defaults.
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub grid_decim: u32,
    pub bench_repeats: usize,
    pub bench_threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            array: ArrayModel::P41,
            density: 1000.0,
            emission: EmissionModel::Vokurka,
            clouds: 1,
            snr_db: None,
            cycles: None,
            freq: None,
            seed: 0,
            eps: None,
            delta: None,
            tau: None,
            grid_decim: 4,
            bench_repeats: 5,
            bench_threads: 1,
        }
    }
}

const SECTIONS: [&str; 5] = ["array", "medium", "simulation", "beamform", "bench"];

/// Reads and parses a configuration file.
pub fn load(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_str(&text)
}

/// Parses configuration text; errors carry 1-based line numbers.
pub fn parse_str(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    let mut section: Option<&str> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(CliError::Config(format!(
                    "line {line_no}: unterminated section header '{line}'"
                )));
            };
            let Some(&known) = SECTIONS.iter().find(|&&s| s == name) else {
                return Err(CliError::Config(format!(
                    "line {line_no}: unknown section [{name}] (expected one of {})",
                    SECTIONS.join(", ")
                )));
            };
            section = Some(known);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {line_no}: expected 'key = value', got '{line}'"
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = section else {
            return Err(CliError::Config(format!(
                "line {line_no}: key '{key}' appears before any [section] header"
            )));
        };
        apply(&mut cfg, section, key, value)
            .map_err(|msg| CliError::Config(format!("line {line_no}: {msg}")))?;
    }
    Ok(cfg)
}

fn apply(cfg: &mut Config, section: &str, key: &str, value: &str) -> std::result::Result<(), String> {
    fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse()
            .map_err(|e| format!("bad value '{value}' for {key}: {e}"))
    }

    match (section, key) {
        ("array", "model") => cfg.array = value.parse().map_err(|e| format!("{e}"))?,
        ("medium", "density") => {
            let d: f64 = num(key, value)?;
            if !(d > 0.0) {
                return Err(format!("density must be positive, got {d}"));
            }
            cfg.density = d;
        }
        ("simulation", "emission") => cfg.emission = value.parse().map_err(|e| format!("{e}"))?,
        ("simulation", "clouds") => cfg.clouds = num(key, value)?,
        ("simulation", "snr_db") => {
            cfg.snr_db = match value {
                "none" => None,
                v => Some(num(key, v)?),
            }
        }
        ("simulation", "cycles") => cfg.cycles = Some(num(key, value)?),
        ("simulation", "freq") => cfg.freq = Some(num(key, value)?),
        ("simulation", "seed") => cfg.seed = num(key, value)?,
        ("beamform", "eps") => cfg.eps = Some(num(key, value)?),
        ("beamform", "delta") => cfg.delta = Some(num(key, value)?),
        ("beamform", "tau") => cfg.tau = Some(num(key, value)?),
        ("beamform", "grid_decim") => cfg.grid_decim = num(key, value)?,
        ("bench", "repeats") => cfg.bench_repeats = num(key, value)?,
        ("bench", "threads") => cfg.bench_threads = num(key, value)?,
        _ => {
            return Err(format!("unknown key '{key}' in [{section}]"));
        }
    }
    Ok(())
}
