//! File formats, network IO, the experiment harness and the command line
//! for [`flipnet_core`].
//!
//! All files use 1-based node, layer and community ids. Any path ending in
//! `.gz` is read and written through gzip.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod net_io;

pub use error::{IoError, Result};
