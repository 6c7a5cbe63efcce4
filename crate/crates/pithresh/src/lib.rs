//! Profile files, reports, the command-line front end and a parallel
//! search driver on top of `pithresh-core`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod profile_file;
pub mod report;
pub mod search;

pub use pithresh_core as core;
