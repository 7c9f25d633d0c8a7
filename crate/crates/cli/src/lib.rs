//! Command-line front end: system files in, CSV and JSON out.

pub mod commands;
pub mod error;
pub mod output;
pub mod schema;
