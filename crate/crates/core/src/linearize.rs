//! Target construction: quads to paraphrase sentences.
//!
//! The natural template for ASQP is
//! `<category> is <polarity word> because <aspect> is <opinion>`.
//! TASD puts the polarity word in the opinion slot, ASTE puts `it` in the
//! category slot, and clauses are joined by ` [SSEP] `.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{CoreError, Result};
use crate::text::canonicalize;
use crate::types::{AspectTerm, CategoryVocab, Example, Polarity, SentimentQuad, Task};
use crate::SEPARATOR;

/// Surface word for an implicit aspect, and the ASTE category slot.
pub const IMPLICIT_PRONOUN: &str = "it";
/// Aspect placeholder in plain-tuple targets.
pub const NULL_ASPECT: &str = "null";

pub(crate) const JOINER: &str = " [SSEP] ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModeKind {
    #[default]
    Natural,
    /// Polarities become `SP1`/`SP2`/`SP3`.
    SymbolicPolarity,
    /// Categories become `ACj`, `j` the 1-based vocabulary position.
    SymbolicCategory,
    SymbolicBoth,
    /// `(c, a, o, p)` tuples instead of sentences.
    PlainTuple,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Natural => "natural",
            ModeKind::SymbolicPolarity => "symbolic-polarity",
            ModeKind::SymbolicCategory => "symbolic-category",
            ModeKind::SymbolicBoth => "symbolic-both",
            ModeKind::PlainTuple => "plain-tuple",
        }
    }

    pub fn is_symbolic(self) -> bool {
        matches!(self, ModeKind::SymbolicPolarity | ModeKind::SymbolicCategory | ModeKind::SymbolicBoth)
    }

    pub fn symbolic_polarity(self) -> bool {
        matches!(self, ModeKind::SymbolicPolarity | ModeKind::SymbolicBoth)
    }

    pub fn symbolic_category(self) -> bool {
        matches!(self, ModeKind::SymbolicCategory | ModeKind::SymbolicBoth)
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match canonicalize(s).replace('_', "-").as_str() {
            "natural" => Ok(ModeKind::Natural),
            "symbolic-polarity" => Ok(ModeKind::SymbolicPolarity),
            "symbolic-category" => Ok(ModeKind::SymbolicCategory),
            "symbolic-both" => Ok(ModeKind::SymbolicBoth),
            "plain-tuple" => Ok(ModeKind::PlainTuple),
            other => Err(format!("unknown projection mode {other:?}")),
        }
    }
}

/// Polarity-to-word mapping. Defaults to great / ok / bad.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolarityLexicon {
    words: [String; 3],
}

impl Default for PolarityLexicon {
    fn default() -> Self {
        PolarityLexicon { words: ["great".into(), "ok".into(), "bad".into()] }
    }
}

impl PolarityLexicon {
    pub fn new(positive: &str, neutral: &str, negative: &str) -> Result<Self> {
        let words = [canonicalize(positive), canonicalize(neutral), canonicalize(negative)];
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(CoreError::EmptyText { what: "polarity word" });
            }
            if format!(" {w} ").contains(" because ") || w.contains("[ssep]") {
                return Err(CoreError::LexiconCollision(w.clone()));
            }
            if words[..i].contains(w) {
                return Err(CoreError::LexiconCollision(w.clone()));
            }
        }
        Ok(PolarityLexicon { words })
    }

    pub fn word(&self, polarity: Polarity) -> &str {
        &self.words[polarity.index() - 1]
    }

    /// Inverse lookup on a canonical word.
    pub fn polarity_of(&self, word: &str) -> Option<Polarity> {
        Polarity::ALL.into_iter().find(|p| self.word(*p) == word)
    }
}

/// How labels are projected into target text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ProjectionMode {
    kind: ModeKind,
    lexicon: PolarityLexicon,
}

impl ProjectionMode {
    pub fn new(kind: ModeKind) -> Self {
        ProjectionMode { kind, lexicon: PolarityLexicon::default() }
    }

    pub fn natural() -> Self {
        Self::new(ModeKind::Natural)
    }

    pub fn plain_tuple() -> Self {
        Self::new(ModeKind::PlainTuple)
    }

    /// Replaces the default polarity words (used wherever polarity is not symbolic).
    pub fn with_lexicon(mut self, lexicon: PolarityLexicon) -> Self {
        self.lexicon = lexicon;
        self
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn lexicon(&self) -> &PolarityLexicon {
        &self.lexicon
    }
}

/// A rendered target sequence with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedTarget {
    pub text: String,
    pub task: Task,
    pub mode: ProjectionMode,
}

pub fn project_polarity(polarity: Polarity, mode: &ProjectionMode) -> String {
    match mode.kind {
        ModeKind::PlainTuple => polarity.as_str().into(),
        kind if kind.symbolic_polarity() => format!("SP{}", polarity.index()),
        _ => mode.lexicon.word(polarity).into(),
    }
}

pub fn project_aspect(aspect: &AspectTerm) -> &str {
    aspect.as_deref().unwrap_or(IMPLICIT_PRONOUN)
}

pub fn project_category(category: &str, mode: &ProjectionMode, vocab: &CategoryVocab) -> Result<String> {
    let canonical = canonicalize(category);
    let position = vocab.position(&canonical).ok_or_else(|| CoreError::UnknownCategory(canonical.clone()))?;
    if mode.kind.symbolic_category() {
        Ok(format!("AC{position}"))
    } else {
        Ok(canonical)
    }
}

/// Renders one quad as a clause (or a tuple in plain-tuple mode).
pub fn linearize_quad(
    quad: &SentimentQuad,
    task: Task,
    mode: &ProjectionMode,
    vocab: &CategoryVocab,
) -> Result<String> {
    quad.validate_for(task)?;
    let category = quad.category().map(|c| project_category(c, mode, vocab)).transpose()?;
    let polarity = project_polarity(quad.polarity(), mode);

    if mode.kind == ModeKind::PlainTuple {
        let aspect = quad.aspect().as_deref().unwrap_or(NULL_ASPECT);
        let opinion = quad.opinion().unwrap_or_default();
        return Ok(match task {
            Task::Asqp => format!("({}, {aspect}, {opinion}, {polarity})", category.unwrap_or_default()),
            Task::Tasd => format!("({}, {aspect}, {polarity})", category.unwrap_or_default()),
            Task::Aste => format!("({aspect}, {opinion}, {polarity})"),
        });
    }

    let category_slot = category.as_deref().unwrap_or(IMPLICIT_PRONOUN);
    let aspect_slot = project_aspect(quad.aspect());
    let opinion_slot = match task {
        Task::Tasd => polarity.as_str(),
        _ => quad.opinion().unwrap_or_default(),
    };
    Ok(format!("{category_slot} is {polarity} because {aspect_slot} is {opinion_slot}"))
}

/// Linearizes each quad in order and joins the clauses with ` [SSEP] `.
pub fn linearize_quads(
    quads: &[SentimentQuad],
    task: Task,
    mode: &ProjectionMode,
    vocab: &CategoryVocab,
) -> Result<String> {
    if quads.is_empty() {
        return Err(CoreError::EmptyQuadSet);
    }
    let clauses = quads.iter().map(|q| linearize_quad(q, task, mode, vocab)).collect::<Result<Vec<_>>>()?;
    debug_assert!(JOINER.trim() == SEPARATOR);
    Ok(clauses.join(JOINER))
}

pub fn build_target(example: &Example, mode: &ProjectionMode, vocab: &CategoryVocab) -> Result<LinearizedTarget> {
    let text = linearize_quads(example.quads(), example.task(), mode, vocab)?;
    Ok(LinearizedTarget { text, task: example.task(), mode: mode.clone() })
}

/// Model input: the canonical sentence, optionally followed by the task token.
pub fn build_input(sentence: &str, task: Task, transfer_suffix: bool) -> String {
    let sentence = canonicalize(sentence);
    if transfer_suffix {
        format!("{sentence} {}", task.token())
    } else {
        sentence
    }
}
