//! Command-line and HTTP front end for the ShEx visualisation pipeline.

pub mod commands;
pub mod server;
