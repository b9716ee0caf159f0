//! Core of the paraphrase formulation of aspect sentiment quad prediction (ASQP).
//!
//! A sentiment quad `(category, aspect, opinion, polarity)` is rendered as a
//! natural sentence such as `food quality is bad because pasta is over-cooked`,
//! several quads are joined with ` [SSEP] `, and generated sentences are parsed
//! back into quads for exact-match scoring.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. File formats,
//! the remote generation backend, and the command line live in the `asqp`
//! crate.
//!
//! ```
//! use asqp_core::{CategoryVocab, SentimentQuad, AspectTerm, Polarity, Task};
//! use asqp_core::linearize::{linearize_quad, ProjectionMode};
//! use asqp_core::recover::Recoverer;
//!
//! let vocab = CategoryVocab::new(["food quality", "service general"]).unwrap();
//! let quad = SentimentQuad::asqp("food quality", AspectTerm::explicit("pasta").unwrap(), "over-cooked", Polarity::Negative).unwrap();
//! let mode = ProjectionMode::natural();
//! let text = linearize_quad(&quad, Task::Asqp, &mode, &vocab).unwrap();
//! assert_eq!(text, "food quality is bad because pasta is over-cooked");
//!
//! let recovered = Recoverer::new(Task::Asqp, &vocab, &mode).recover(&text, "the pasta is over-cooked!");
//! assert_eq!(recovered.sentiment_quads(), vec![quad]);
//! ```
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod backend;
pub mod dataset;
pub mod delimited;
mod error;
pub mod eval;
pub mod linearize;
pub mod recover;
mod rounding;
pub mod synthetic;
pub mod text;
mod types;

pub use error::{CoreError, Result};
pub use rounding::round_half_away;
pub use text::canonicalize;
pub use types::{AspectTerm, CategoryVocab, Example, OpinionTerm, Polarity, SentimentQuad, Split, Task};

/// The token joining linearized quads in one target sequence.
pub const SEPARATOR: &str = "[SSEP]";
