//! Command-line front end for the passive acoustic mapping toolkit:
//! simulation of array RF data, beamformed energy-map reconstruction,
//! image-quality metrics, method comparison, and benchmarking, glued
//! together by simple binary file formats.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
