//! File formats, generation backends and the `asqp` command line on top of
//! [`asqp_core`].
//!
//! * [`io`] reads and writes the JSONL example format, category vocabulary
//!   files, delimited research releases and generation files.
//! * [`http`] is the remote generation backend speaking the
//!   `POST /generate` protocol.
//! * [`pipeline`] runs the parallel build / recover / score steps used by
//!   the CLI subcommands.
//! * [`cli`] is the executable itself.

pub mod backend;
pub mod cli;
pub mod config;
mod error;
pub mod http;
pub mod io;
pub mod pipeline;
pub mod records;
pub mod report;

pub use error::{Error, Result};
