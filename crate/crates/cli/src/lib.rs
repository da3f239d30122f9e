//! Command-line front end for `tangle-core`: state files, JSON reports and
//! the `tangle` subcommands.

pub mod commands;
pub mod report;
pub mod statefile;
