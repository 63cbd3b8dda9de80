//! Front end for `fpe-similarity`: run configuration, presets and the
//! `eval` / `verify` / `sample` / `info` commands behind the `fpesim` binary.

pub mod commands;
pub mod config;
pub mod presets;
