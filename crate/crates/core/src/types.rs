use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{CoreError, Result};
use crate::text::canonicalize;

/// Sentiment polarity of a quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Neutral, Polarity::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }

    /// 1-based class index: POS=1, NEU=2, NEG=3.
    pub fn index(self) -> usize {
        match self {
            Polarity::Positive => 1,
            Polarity::Neutral => 2,
            Polarity::Negative => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index.checked_sub(1)?).copied()
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = CoreError;

    /// Accepts the full names and the usual short class labels, in any case.
    fn from_str(s: &str) -> Result<Self> {
        match canonicalize(s).as_str() {
            "positive" | "pos" => Ok(Polarity::Positive),
            "neutral" | "neu" => Ok(Polarity::Neutral),
            "negative" | "neg" => Ok(Polarity::Negative),
            _ => Err(CoreError::UnknownPolarity(s.into())),
        }
    }
}

/// The three prediction tasks sharing the paraphrase framework.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    /// (category, aspect, opinion, polarity)
    Asqp,
    /// (aspect, opinion, polarity); aspects are always explicit.
    Aste,
    /// (category, aspect, polarity)
    Tasd,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Asqp, Task::Aste, Task::Tasd];

    /// Lowercase name used in data files.
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Asqp => "asqp",
            Task::Aste => "aste",
            Task::Tasd => "tasd",
        }
    }

    /// Uppercase token appended to inputs for cross-task training.
    pub fn token(self) -> &'static str {
        match self {
            Task::Asqp => "ASQP",
            Task::Aste => "ASTE",
            Task::Tasd => "TASD",
        }
    }

    pub fn has_category(self) -> bool {
        self != Task::Aste
    }

    pub fn has_opinion(self) -> bool {
        self != Task::Tasd
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Task {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match canonicalize(s).as_str() {
            "asqp" => Ok(Task::Asqp),
            "aste" => Ok(Task::Aste),
            "tasd" => Ok(Task::Tasd),
            _ => Err(CoreError::UnknownTask(s.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Split {
    #[default]
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match canonicalize(s).as_str() {
            "train" => Ok(Split::Train),
            "dev" | "valid" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            _ => Err(CoreError::UnknownSplit(s.into())),
        }
    }
}

/// Aspect term span; `None` is an implicit (unmentioned) aspect.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AspectTerm(Option<String>);

impl AspectTerm {
    pub const fn implicit() -> Self {
        AspectTerm(None)
    }

    pub fn explicit(span: &str) -> Result<Self> {
        let span = canonicalize(span);
        if span.is_empty() {
            return Err(CoreError::EmptyText { what: "aspect term" });
        }
        Ok(AspectTerm(Some(span)))
    }

    pub fn new(span: Option<&str>) -> Result<Self> {
        span.map_or(Ok(Self::implicit()), Self::explicit)
    }

    pub fn as_deref(&self) -> Option<&str> {
        self.0.as_deref()
    }

    pub fn is_implicit(&self) -> bool {
        self.0.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpinionTerm(String);

impl OpinionTerm {
    pub fn new(span: &str) -> Result<Self> {
        let span = canonicalize(span);
        if span.is_empty() {
            return Err(CoreError::EmptyText { what: "opinion term" });
        }
        Ok(OpinionTerm(span))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// One sentiment tuple, stored in canonical form.
///
/// Elements a task does not predict are absent: ASTE quads carry no
/// category and TASD quads carry no opinion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentimentQuad {
    category: Option<String>,
    aspect: AspectTerm,
    opinion: Option<OpinionTerm>,
    polarity: Polarity,
}

impl SentimentQuad {
    pub fn new(category: Option<&str>, aspect: AspectTerm, opinion: Option<&str>, polarity: Polarity) -> Result<Self> {
        let category = match category {
            Some(c) => {
                let c = canonicalize(c);
                if c.is_empty() {
                    return Err(CoreError::EmptyText { what: "category" });
                }
                Some(c)
            }
            None => None,
        };
        let opinion = opinion.map(OpinionTerm::new).transpose()?;
        Ok(SentimentQuad { category, aspect, opinion, polarity })
    }

    pub fn asqp(category: &str, aspect: AspectTerm, opinion: &str, polarity: Polarity) -> Result<Self> {
        Self::new(Some(category), aspect, Some(opinion), polarity)
    }

    pub fn tasd(category: &str, aspect: AspectTerm, polarity: Polarity) -> Result<Self> {
        Self::new(Some(category), aspect, None, polarity)
    }

    pub fn aste(aspect: &str, opinion: &str, polarity: Polarity) -> Result<Self> {
        Self::new(None, AspectTerm::explicit(aspect)?, Some(opinion), polarity)
    }

    pub fn category(&self) -> Option<&str> {
        self.category.as_deref()
    }

    pub fn aspect(&self) -> &AspectTerm {
        &self.aspect
    }

    pub fn opinion(&self) -> Option<&str> {
        self.opinion.as_ref().map(OpinionTerm::as_str)
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn with_category(mut self, category: Option<String>) -> Self {
        self.category = category.map(|c| canonicalize(&c));
        self
    }

    pub fn with_aspect(mut self, aspect: AspectTerm) -> Self {
        self.aspect = aspect;
        self
    }

    pub fn with_opinion(mut self, opinion: Option<OpinionTerm>) -> Self {
        self.opinion = opinion;
        self
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    /// Checks that exactly the elements `task` predicts are present.
    pub fn validate_for(&self, task: Task) -> Result<()> {
        let fail = |reason| Err(CoreError::InvalidQuadForTask { task, reason });
        match (task.has_category(), self.category.is_some()) {
            (true, false) => return fail("missing category"),
            (false, true) => return fail("category not part of this task"),
            _ => {}
        }
        match (task.has_opinion(), self.opinion.is_some()) {
            (true, false) => return fail("missing opinion term"),
            (false, true) => return fail("opinion term not part of this task"),
            _ => {}
        }
        if task == Task::Aste && self.aspect.is_implicit() {
            return fail("implicit aspect");
        }
        Ok(())
    }

    /// Drops the elements `task` does not predict. Returns `None` when the
    /// quad lacks an element `task` needs (including implicit aspects for ASTE).
    pub fn project(&self, task: Task) -> Option<Self> {
        let mut quad = self.clone();
        if !task.has_category() {
            quad.category = None;
        }
        if !task.has_opinion() {
            quad.opinion = None;
        }
        quad.validate_for(task).ok().map(|()| quad)
    }
}

/// Ordered, duplicate-free aspect category vocabulary.
///
/// Order defines the 1-based `ACj` symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CategoryVocab {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl CategoryVocab {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = CategoryVocab::default();
        for name in names {
            let name = canonicalize(name.as_ref());
            if name.is_empty() {
                return Err(CoreError::EmptyText { what: "category" });
            }
            if vocab.index.contains_key(&name) {
                return Err(CoreError::DuplicateCategory(name));
            }
            vocab.index.insert(name.clone(), vocab.names.len());
            vocab.names.push(name);
        }
        Ok(vocab)
    }

    /// One category per line; blank lines are skipped.
    pub fn from_lines(text: &str) -> Result<Self> {
        Self::new(text.lines().filter(|l| !l.trim().is_empty()))
    }

    /// Categories in order of first appearance across the examples.
    pub fn from_examples<'a>(examples: impl IntoIterator<Item = &'a Example>) -> Self {
        let mut vocab = CategoryVocab::default();
        for quad in examples.into_iter().flat_map(|e| e.quads()) {
            if let Some(c) = quad.category() {
                if !vocab.index.contains_key(c) {
                    vocab.index.insert(c.into(), vocab.names.len());
                    vocab.names.push(c.into());
                }
            }
        }
        vocab
    }

    /// 1-based position of a canonical category name.
    pub fn position(&self, category: &str) -> Option<usize> {
        self.index.get(category).map(|i| i + 1)
    }

    /// Category at a 1-based position.
    pub fn at_position(&self, position: usize) -> Option<&str> {
        self.names.get(position.checked_sub(1)?).map(String::as_str)
    }

    pub fn contains(&self, category: &str) -> bool {
        self.index.contains_key(category)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// A sentence with its gold quads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    sentence: String,
    quads: Vec<SentimentQuad>,
    task: Task,
    split: Split,
}

impl Example {
    /// Canonicalizes the sentence and removes duplicate quads, keeping the
    /// first occurrence of each in annotation order.
    pub fn new(sentence: &str, quads: Vec<SentimentQuad>, task: Task, split: Split) -> Result<Self> {
        let sentence = canonicalize(sentence);
        if sentence.is_empty() {
            return Err(CoreError::EmptySentence);
        }
        let mut unique: Vec<SentimentQuad> = Vec::with_capacity(quads.len());
        for quad in quads {
            quad.validate_for(task)?;
            if !unique.contains(&quad) {
                unique.push(quad);
            }
        }
        Ok(Example { sentence, quads: unique, task, split })
    }

    pub fn sentence(&self) -> &str {
        &self.sentence
    }

    pub fn quads(&self) -> &[SentimentQuad] {
        &self.quads
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    /// Re-expresses the example for another task, dropping quads that cannot
    /// be expressed there.
    pub fn project(&self, task: Task) -> Example {
        let mut quads: Vec<SentimentQuad> = Vec::new();
        for q in self.quads.iter().filter_map(|q| q.project(task)) {
            if !quads.contains(&q) {
                quads.push(q);
            }
        }
        Example { sentence: self.sentence.clone(), quads, task, split: self.split }
    }
}
