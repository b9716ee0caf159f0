use alloc::string::String;
use core::fmt;

use crate::types::{Polarity, Task};

pub type Result<T, E = CoreError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A span or category that is empty after canonicalization.
    EmptyText {
        what: &'static str,
    },
    DuplicateCategory(String),
    UnknownCategory(String),
    UnknownPolarity(String),
    UnknownTask(String),
    UnknownSplit(String),
    /// A quad lacks an element the task needs, or carries one it forbids.
    InvalidQuadForTask {
        task: Task,
        reason: &'static str,
    },
    EmptyQuadSet,
    EmptySentence,
    /// Two polarities project to the same surface word.
    LexiconCollision(String),
    MissingPolarity(Polarity),
    RatioOutOfRange {
        ratio: f64,
        inclusive_upper: bool,
    },
    SampleTooLarge {
        requested: usize,
        available: usize,
    },
    LengthMismatch {
        preds: usize,
        golds: usize,
    },
    InvalidPerturbConfig(&'static str),
    EmptyRequest,
    UnknownInput(String),
    ConflictingGold(String),
    /// A delimited annotation line that could not be parsed.
    Unparseable {
        reason: String,
    },
    Arity {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyText { what } => write!(f, "{what} is empty after normalization"),
            Self::DuplicateCategory(c) => write!(f, "duplicate category {c:?} in vocabulary"),
            Self::UnknownCategory(c) => write!(f, "unknown category {c:?}"),
            Self::UnknownPolarity(p) => write!(f, "unknown polarity {p:?}"),
            Self::UnknownTask(t) => write!(f, "unknown task {t:?}"),
            Self::UnknownSplit(s) => write!(f, "unknown split {s:?}"),
            Self::InvalidQuadForTask { task, reason } => write!(f, "quad invalid for {task}: {reason}"),
            Self::EmptyQuadSet => f.write_str("example has no quads"),
            Self::EmptySentence => f.write_str("sentence is empty"),
            Self::LexiconCollision(w) => write!(f, "polarity word {w:?} is used for more than one polarity"),
            Self::MissingPolarity(p) => write!(f, "no training quad has polarity {p}"),
            Self::RatioOutOfRange { ratio, inclusive_upper: true } => write!(f, "ratio {ratio} must be in (0, 1]"),
            Self::RatioOutOfRange { ratio, inclusive_upper: false } => write!(f, "ratio {ratio} must be in (0, 1)"),
            Self::SampleTooLarge { requested, available } => {
                write!(f, "cannot sample {requested} examples from {available}")
            }
            Self::LengthMismatch { preds, golds } => {
                write!(f, "{preds} prediction sets but {golds} gold sets")
            }
            Self::InvalidPerturbConfig(why) => write!(f, "invalid perturbation config: {why}"),
            Self::EmptyRequest => f.write_str("generation request has no inputs"),
            Self::UnknownInput(s) => write!(f, "oracle has no gold target for input {s:?}"),
            Self::ConflictingGold(s) => write!(f, "input {s:?} appears with two different gold quad sets"),
            Self::Unparseable { reason } => write!(f, "unparseable annotation: {reason}"),
            Self::Arity { expected, found } => write!(f, "expected {expected}-tuples, found a {found}-tuple"),
        }
    }
}

impl core::error::Error for CoreError {}
