//! Command-line front end: configuration and report I/O plus the analysis
//! command registry. The binary in `main.rs` is a thin dispatcher over
//! [`commands::registry`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod protocols;
