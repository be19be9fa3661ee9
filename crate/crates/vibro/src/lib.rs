//! File formats, pipelines and the command-line driver around `vibro-core`.

pub mod cli;
pub mod clock;
pub mod commands;
pub mod config_io;
pub mod error;
pub mod manifest;
pub mod matrix_market;
pub mod mesh_export;
pub mod model;
pub mod output;
pub mod rom_io;

pub use error::{Result, RunError};
