//! Subcommand implementations. Each module exposes a clap `Args` struct and
//! a `run` function returning the process exit semantics through `CliError`.

pub mod beamform;
pub mod bench;
pub mod compare;
pub mod metrics;
pub mod simulate;
