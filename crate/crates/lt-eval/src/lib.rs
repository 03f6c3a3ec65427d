//! File formats, analyses drivers, reports and the `lt-eval` command line.

pub mod cli;
pub mod commands;
pub mod error;
pub mod images;
pub mod manifest;
pub mod report;
pub mod results;
pub mod svg;

pub use error::{Error, Result};
