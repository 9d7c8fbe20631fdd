//! Command-line front end, file formats and JSON/CSV output for
//! [`pwquant_core`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod golden;
pub mod report;
