//! Command-line front end: manifests in, certificates out.

pub mod commands;
pub mod manifest;
pub mod report;
