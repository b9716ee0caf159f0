//! Quad recovery: the inverse of [`crate::linearize`].
//!
//! Generated text is split on `[SSEP]`, every segment is parsed against the
//! template grammar, and each element is checked against the category
//! vocabulary and the source sentence. Malformed segments are reported as
//! failures, never as errors.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linearize::{ModeKind, ProjectionMode, IMPLICIT_PRONOUN, NULL_ASPECT};
use crate::text::{canonicalize, match_offsets};
use crate::types::{AspectTerm, CategoryVocab, Polarity, SentimentQuad, Task};

const IS: &str = " is ";
const BECAUSE: &str = " because ";
const TUPLE_SEP: &str = ", ";

/// Per-element domain checks for a parsed quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Validity {
    pub in_vocab_category: bool,
    pub known_polarity_word: bool,
    pub aspect_is_span_or_pronoun: bool,
    pub opinion_is_span: bool,
}

impl Validity {
    pub const VALID: Validity = Validity {
        in_vocab_category: true,
        known_polarity_word: true,
        aspect_is_span_or_pronoun: true,
        opinion_is_span: true,
    };

    pub fn is_valid(&self) -> bool {
        *self == Self::VALID
    }

    /// The first failing check, in element order category, polarity, aspect, opinion.
    fn first_failure(&self) -> Option<FailureReason> {
        if !self.in_vocab_category {
            Some(FailureReason::CategoryOutOfVocab)
        } else if !self.known_polarity_word {
            Some(FailureReason::UnknownPolarity)
        } else if !self.aspect_is_span_or_pronoun {
            Some(FailureReason::AspectNotInSentence)
        } else if !self.opinion_is_span {
            Some(FailureReason::OpinionNotInSentence)
        } else {
            None
        }
    }
}

/// A quad read back from generated text, kept even when some element is
/// outside its domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParsedQuad {
    pub category: Option<String>,
    pub aspect: AspectTerm,
    pub opinion: Option<String>,
    /// `None` when the polarity word was not recognised.
    pub polarity: Option<Polarity>,
    /// The polarity slot exactly as generated.
    pub polarity_text: String,
    pub validity: Validity,
}

impl ParsedQuad {
    /// The quad as a [`SentimentQuad`], if every element is representable.
    pub fn to_quad(&self) -> Option<SentimentQuad> {
        SentimentQuad::new(self.category.as_deref(), self.aspect.clone(), self.opinion.as_deref(), self.polarity?).ok()
    }

    /// Wraps an already structured prediction, computing its validity
    /// against `vocab` and `sentence` the same way the parser does.
    pub fn assess(quad: &SentimentQuad, task: Task, vocab: &CategoryVocab, sentence: &str) -> ParsedQuad {
        let sentence = canonicalize(sentence);
        ParsedQuad {
            category: quad.category().map(Into::into),
            aspect: quad.aspect().clone(),
            opinion: quad.opinion().map(Into::into),
            polarity: Some(quad.polarity()),
            polarity_text: quad.polarity().as_str().into(),
            validity: Validity {
                in_vocab_category: quad.category().is_none_or(|c| vocab.contains(c)),
                known_polarity_word: true,
                aspect_is_span_or_pronoun: aspect_ok(quad.aspect(), task, &sentence),
                opinion_is_span: quad.opinion().is_none_or(|o| sentence.contains(o)),
            },
        }
    }
}

fn aspect_ok(aspect: &AspectTerm, task: Task, sentence: &str) -> bool {
    match aspect.as_deref() {
        None => task != Task::Aste,
        Some(span) => sentence.contains(span),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureReason {
    MissingIs,
    MissingBecause,
    /// ASTE clauses must open with `it is `.
    MissingPronounPrefix,
    NoAspectOpinionSplit,
    UnknownPolarity,
    TasdSlotMismatch,
    MalformedTuple,
    CategoryOutOfVocab,
    AspectNotInSentence,
    OpinionNotInSentence,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::MissingIs => "missing \" is \"",
            FailureReason::MissingBecause => "missing \" because \"",
            FailureReason::MissingPronounPrefix => "missing \"it is \" prefix",
            FailureReason::NoAspectOpinionSplit => "no aspect/opinion split",
            FailureReason::UnknownPolarity => "unknown polarity token",
            FailureReason::TasdSlotMismatch => "opinion slot differs from polarity word",
            FailureReason::MalformedTuple => "malformed tuple",
            FailureReason::CategoryOutOfVocab => "category out of vocabulary",
            FailureReason::AspectNotInSentence => "aspect not a sentence span",
            FailureReason::OpinionNotInSentence => "opinion not a sentence span",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseFailure {
    pub segment: String,
    pub reason: FailureReason,
}

/// Outcome of parsing one generated sequence.
///
/// `quads.len() + failures.len() + duplicates` equals the number of segments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecoveryResult {
    pub quads: Vec<ParsedQuad>,
    pub failures: Vec<ClauseFailure>,
    /// Segments where more than one aspect/opinion split was plausible.
    pub ambiguous_splits: usize,
    /// Parsed quads dropped because an identical quad came earlier.
    pub duplicates: usize,
}

impl RecoveryResult {
    /// Recovered quads whose polarity was recognised, in generation order.
    pub fn sentiment_quads(&self) -> Vec<SentimentQuad> {
        self.quads.iter().filter_map(ParsedQuad::to_quad).collect()
    }

    pub fn segment_count(&self) -> usize {
        self.quads.len() + self.failures.len() + self.duplicates
    }
}

/// Splits on `[SSEP]` (case-insensitive), canonicalizing each segment,
/// stripping one trailing period, and dropping empty segments.
pub fn split_segments(target: &str) -> Vec<String> {
    canonicalize(target)
        .split("[ssep]")
        .filter_map(|piece| {
            let piece = piece.trim();
            let piece = piece.strip_suffix('.').unwrap_or(piece).trim_end();
            (!piece.is_empty()).then(|| piece.into())
        })
        .collect()
}

/// Parser for one task and projection mode.
#[derive(Debug, Clone, Copy)]
pub struct Recoverer<'a> {
    task: Task,
    vocab: &'a CategoryVocab,
    mode: &'a ProjectionMode,
    strict: bool,
}

struct Clause {
    quad: ParsedQuad,
    ambiguous: bool,
}

impl<'a> Recoverer<'a> {
    pub fn new(task: Task, vocab: &'a CategoryVocab, mode: &'a ProjectionMode) -> Self {
        Recoverer { task, vocab, mode, strict: false }
    }

    /// Strict recovery turns any quad with a failed validity check into a
    /// failure, and requires the TASD opinion slot to repeat the polarity word.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn recover(&self, target: &str, sentence: &str) -> RecoveryResult {
        let sentence = canonicalize(sentence);
        let mut result = RecoveryResult::default();
        for segment in split_segments(target) {
            match self.parse_segment(&segment, &sentence) {
                Ok(clause) => {
                    if let Some(reason) = self.strict.then(|| clause.quad.validity.first_failure()).flatten() {
                        result.failures.push(ClauseFailure { segment, reason });
                        continue;
                    }
                    if clause.ambiguous {
                        result.ambiguous_splits += 1;
                    }
                    if result.quads.contains(&clause.quad) {
                        result.duplicates += 1;
                    } else {
                        result.quads.push(clause.quad);
                    }
                }
                Err(reason) => result.failures.push(ClauseFailure { segment, reason }),
            }
        }
        result
    }

    /// Parses a single segment. The segment is canonicalized first.
    ///
    /// Returns the quad and whether the aspect/opinion split was ambiguous.
    pub fn parse_clause(&self, segment: &str, sentence: &str) -> Result<(ParsedQuad, bool), FailureReason> {
        let clause = self.parse_segment(&canonicalize(segment), &canonicalize(sentence))?;
        Ok((clause.quad, clause.ambiguous))
    }

    fn parse_segment(&self, segment: &str, sentence: &str) -> Result<Clause, FailureReason> {
        if self.mode.kind() == ModeKind::PlainTuple {
            self.parse_tuple(segment, sentence)
        } else {
            self.parse_sentence(segment, sentence)
        }
    }

    fn parse_sentence(&self, segment: &str, sentence: &str) -> Result<Clause, FailureReason> {
        let because = segment.find(BECAUSE).ok_or(FailureReason::MissingBecause)?;
        let head = &segment[..because];
        let tail = &segment[because + BECAUSE.len()..];

        let (category, in_vocab, polarity_text) = if self.task == Task::Aste {
            let rest = head
                .strip_prefix(IMPLICIT_PRONOUN)
                .and_then(|r| r.strip_prefix(' '))
                .and_then(|r| r.strip_prefix("is "))
                .ok_or(FailureReason::MissingPronounPrefix)?;
            (None, true, rest)
        } else {
            let (category, in_vocab, rest) = self.split_category(head, IS)?;
            (Some(category), in_vocab, rest)
        };
        let polarity = self.polarity_word(polarity_text);
        if polarity.is_none() && self.strict {
            return Err(FailureReason::UnknownPolarity);
        }

        let (aspect, opinion, ambiguous) = if self.task == Task::Tasd {
            let aspect = tail.strip_suffix(polarity_text).and_then(|r| r.strip_suffix(IS)).filter(|a| !a.is_empty());
            match aspect {
                Some(aspect) => (aspect, None, false),
                None if self.strict => return Err(FailureReason::TasdSlotMismatch),
                None => {
                    let (aspect, _, ambiguous) = split_spans(tail, IS, IMPLICIT_PRONOUN, sentence)?;
                    (aspect, None, ambiguous)
                }
            }
        } else {
            let (aspect, opinion, ambiguous) = split_spans(tail, IS, IMPLICIT_PRONOUN, sentence)?;
            (aspect, Some(opinion), ambiguous)
        };

        Ok(self.assemble(
            category,
            in_vocab,
            aspect,
            IMPLICIT_PRONOUN,
            opinion,
            polarity,
            polarity_text,
            sentence,
            ambiguous,
        ))
    }

    fn parse_tuple(&self, segment: &str, sentence: &str) -> Result<Clause, FailureReason> {
        let inner = segment
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .map(str::trim)
            .ok_or(FailureReason::MalformedTuple)?;

        let (category, in_vocab, rest) = if self.task.has_category() {
            let (c, ok, rest) = self.split_category(inner, TUPLE_SEP).map_err(|_| FailureReason::MalformedTuple)?;
            (Some(c), ok, rest)
        } else {
            (None, true, inner)
        };
        let last = rest.rfind(TUPLE_SEP).ok_or(FailureReason::MalformedTuple)?;
        let middle = &rest[..last];
        let polarity_text = &rest[last + TUPLE_SEP.len()..];
        let polarity = polarity_text.parse::<Polarity>().ok().filter(|p| p.as_str() == polarity_text);
        if polarity.is_none() && self.strict {
            return Err(FailureReason::UnknownPolarity);
        }

        let (aspect, opinion, ambiguous) = if self.task.has_opinion() {
            let (a, o, ambiguous) =
                split_spans(middle, TUPLE_SEP, NULL_ASPECT, sentence).map_err(|_| FailureReason::MalformedTuple)?;
            (a, Some(o), ambiguous)
        } else if middle.is_empty() {
            return Err(FailureReason::MalformedTuple);
        } else {
            (middle, None, false)
        };

        Ok(self.assemble(
            category,
            in_vocab,
            aspect,
            NULL_ASPECT,
            opinion,
            polarity,
            polarity_text,
            sentence,
            ambiguous,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &self,
        category: Option<String>,
        in_vocab_category: bool,
        aspect: &str,
        implicit_word: &str,
        opinion: Option<&str>,
        polarity: Option<Polarity>,
        polarity_text: &str,
        sentence: &str,
        ambiguous: bool,
    ) -> Clause {
        let aspect = if aspect == implicit_word {
            AspectTerm::implicit()
        } else {
            // non-empty by construction
            AspectTerm::explicit(aspect).unwrap_or_default()
        };
        let validity = Validity {
            in_vocab_category,
            known_polarity_word: polarity.is_some(),
            aspect_is_span_or_pronoun: aspect_ok(&aspect, self.task, sentence),
            opinion_is_span: opinion.is_none_or(|o| sentence.contains(o)),
        };
        Clause {
            quad: ParsedQuad {
                category,
                aspect,
                opinion: opinion.map(Into::into),
                polarity,
                polarity_text: polarity_text.into(),
                validity,
            },
            ambiguous,
        }
    }

    /// Splits `<category><delim><rest>`, preferring the longest vocabulary
    /// entry. Returns the category name, whether it is in the vocabulary,
    /// and the rest.
    fn split_category<'s>(&self, text: &'s str, delim: &str) -> Result<(String, bool, &'s str), FailureReason> {
        let offsets: Vec<usize> = match_offsets(text, delim).collect();
        let first = *offsets.first().ok_or(FailureReason::MissingIs)?;
        let rest_at = |at: usize| &text[at + delim.len()..];

        if self.mode.kind().symbolic_category() {
            let symbol = &text[..first];
            return Ok(match self.category_symbol(symbol) {
                Some(name) => (name.into(), true, rest_at(first)),
                None => (symbol.into(), false, rest_at(first)),
            });
        }
        for &at in offsets.iter().rev() {
            if self.vocab.contains(&text[..at]) {
                return Ok((text[..at].into(), true, rest_at(at)));
            }
        }
        Ok((text[..first].into(), false, rest_at(first)))
    }

    fn category_symbol(&self, symbol: &str) -> Option<&'a str> {
        let digits = symbol.strip_prefix("ac")?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        self.vocab.at_position(digits.parse().ok()?)
    }

    fn polarity_word(&self, word: &str) -> Option<Polarity> {
        if self.mode.kind().symbolic_polarity() {
            let digits = word.strip_prefix("sp")?;
            if digits.len() != 1 {
                return None;
            }
            Polarity::from_index(digits.parse().ok()?)
        } else {
            self.mode.lexicon().polarity_of(word)
        }
    }
}

/// Splits `<aspect><delim><opinion>` at the earliest delimiter whose aspect
/// side is the implicit placeholder or a sentence substring, falling back to
/// the earliest delimiter overall. The flag reports whether several
/// splits survived the sentence check.
fn split_spans<'s>(
    text: &'s str,
    delim: &str,
    implicit_word: &str,
    sentence: &str,
) -> Result<(&'s str, &'s str, bool), FailureReason> {
    let candidates: Vec<(&str, &str)> = match_offsets(text, delim)
        .map(|at| (&text[..at], &text[at + delim.len()..]))
        .filter(|(a, o)| !a.is_empty() && !o.is_empty())
        .collect();
    let first = *candidates.first().ok_or(FailureReason::NoAspectOpinionSplit)?;
    let mut survivors = candidates.iter().filter(|(a, _)| *a == implicit_word || sentence.contains(a));
    match survivors.next() {
        Some(&chosen) => Ok((chosen.0, chosen.1, survivors.next().is_some())),
        None => Ok((first.0, first.1, false)),
    }
}

/// Free-function form of [`Recoverer::recover`].
pub fn recover_quads(
    target: &str,
    task: Task,
    vocab: &CategoryVocab,
    sentence: &str,
    mode: &ProjectionMode,
    strict: bool,
) -> RecoveryResult {
    Recoverer::new(task, vocab, mode).strict(strict).recover(target, sentence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::{linearize_quads, PolarityLexicon};
    use alloc::vec;

    fn vocab() -> CategoryVocab {
        CategoryVocab::new(["restaurant general", "service general", "food quality", "food", "food style options"])
            .unwrap()
    }

    fn parse(segment: &str, task: Task, sentence: &str) -> Result<(ParsedQuad, bool), FailureReason> {
        let v = vocab();
        let m = ProjectionMode::natural();
        Recoverer::new(task, &v, &m).parse_clause(segment, sentence)
    }

    #[test]
    fn segments() {
        assert_eq!(split_segments("a [SSEP] b"), ["a", "b"]);
        assert_eq!(split_segments("a"), ["a"]);
        assert_eq!(split_segments("a [SSEP] "), ["a"]);
        assert_eq!(split_segments("A.[ssep]  b .  [SSEP][SSEP]"), ["a", "b"]);
        assert!(split_segments("").is_empty());
    }

    #[test]
    fn parses_asqp_clause() {
        let (q, ambiguous) =
            parse("food quality is bad because pasta is over-cooked", Task::Asqp, "the pasta is over-cooked!").unwrap();
        assert!(!ambiguous);
        assert_eq!(q.validity, Validity::VALID);
        let expected = SentimentQuad::asqp(
            "food quality",
            AspectTerm::explicit("pasta").unwrap(),
            "over-cooked",
            Polarity::Negative,
        )
        .unwrap();
        assert_eq!(q.to_quad(), Some(expected));
    }

    #[test]
    fn parses_aste_clause() {
        let (q, _) = parse("it is great because chinese food is nice", Task::Aste, "nice chinese food").unwrap();
        assert_eq!(q.to_quad(), Some(SentimentQuad::aste("chinese food", "nice", Polarity::Positive).unwrap()));
        assert_eq!(
            parse("food is great because x is y", Task::Aste, "").unwrap_err(),
            FailureReason::MissingPronounPrefix
        );
    }

    #[test]
    fn implicit_aspect_from_pronoun() {
        let (q, _) = parse("food quality is great because it is good", Task::Asqp, "all good").unwrap();
        assert!(q.aspect.is_implicit());
        assert_eq!(q.validity, Validity::VALID);
        let (q, _) = parse("it is great because it is good", Task::Aste, "all good").unwrap();
        assert!(!q.validity.aspect_is_span_or_pronoun);
    }

    #[test]
    fn failure_reasons() {
        assert_eq!(parse("totally malformed output", Task::Asqp, "").unwrap_err(), FailureReason::MissingBecause);
        assert_eq!(parse("food quality bad because x is y", Task::Asqp, "").unwrap_err(), FailureReason::MissingIs);
        assert_eq!(
            parse("food quality is bad because pasta", Task::Asqp, "").unwrap_err(),
            FailureReason::NoAspectOpinionSplit
        );
    }

    #[test]
    fn longest_vocab_prefix_wins() {
        let (q, _) = parse("food style options is ok because menu is short", Task::Asqp, "menu short").unwrap();
        assert_eq!(q.category.as_deref(), Some("food style options"));
        assert!(q.validity.in_vocab_category);
        let (q, _) = parse("drinks stuff is ok because menu is short", Task::Asqp, "menu short").unwrap();
        assert_eq!(q.category.as_deref(), Some("drinks stuff"));
        assert!(!q.validity.in_vocab_category);
    }

    #[test]
    fn span_aware_split() {
        let sentence = "what is left of the pasta is cold";
        let (q, ambiguous) = parse("food quality is bad because what is left is cold", Task::Asqp, sentence).unwrap();
        // "what" is a substring of the sentence, so the earliest survivor wins and the split is ambiguous
        assert_eq!(q.aspect.as_deref(), Some("what"));
        assert!(ambiguous);

        let (q, ambiguous) =
            parse("food quality is bad because the pasta is what it is", Task::Asqp, "the pasta").unwrap();
        assert_eq!(q.aspect.as_deref(), Some("the pasta"));
        assert_eq!(q.opinion.as_deref(), Some("what it is"));
        assert!(!ambiguous);

        // no candidate survives: earliest split, flagged
        let (q, _) = parse("food quality is bad because a is b is c", Task::Asqp, "zzz").unwrap();
        assert_eq!(q.aspect.as_deref(), Some("a"));
        assert!(!q.validity.aspect_is_span_or_pronoun);
    }

    #[test]
    fn unknown_polarity_lenient_and_strict() {
        let (q, _) = parse("food quality is awful because pasta is cold", Task::Asqp, "pasta cold").unwrap();
        assert_eq!(q.polarity, None);
        assert_eq!(q.polarity_text, "awful");
        assert!(!q.validity.known_polarity_word);
        assert_eq!(q.to_quad(), None);

        let v = vocab();
        let m = ProjectionMode::natural();
        let strict = Recoverer::new(Task::Asqp, &v, &m).strict(true);
        assert_eq!(
            strict.parse_clause("food quality is awful because pasta is cold", "pasta cold").unwrap_err(),
            FailureReason::UnknownPolarity
        );
    }

    #[test]
    fn tasd_slot() {
        let (q, _) = parse("service general is bad because waiter is bad", Task::Tasd, "the waiter").unwrap();
        assert_eq!(
            q.to_quad(),
            Some(
                SentimentQuad::tasd("service general", AspectTerm::explicit("waiter").unwrap(), Polarity::Negative)
                    .unwrap()
            )
        );
        // slot-aware: an aspect containing " is " still parses
        let (q, _) = parse("service general is bad because what is left is bad", Task::Tasd, "").unwrap();
        assert_eq!(q.aspect.as_deref(), Some("what is left"));

        let (q, _) = parse("service general is bad because waiter is rude", Task::Tasd, "waiter").unwrap();
        assert_eq!(q.aspect.as_deref(), Some("waiter"));
        assert_eq!(q.opinion, None);
        let v = vocab();
        let m = ProjectionMode::natural();
        let strict = Recoverer::new(Task::Tasd, &v, &m).strict(true);
        assert_eq!(
            strict.parse_clause("service general is bad because waiter is rude", "waiter").unwrap_err(),
            FailureReason::TasdSlotMismatch
        );
    }

    #[test]
    fn symbolic_tokens_invert() {
        let v = vocab();
        let m = ProjectionMode::new(ModeKind::SymbolicBoth);
        let r = Recoverer::new(Task::Asqp, &v, &m);
        let (q, _) = r.parse_clause("AC3 is SP3 because pasta is cold", "pasta cold").unwrap();
        assert_eq!(q.category.as_deref(), Some("food quality"));
        assert_eq!(q.polarity, Some(Polarity::Negative));
        let (q, _) = r.parse_clause("AC99 is SP4 because pasta is cold", "pasta cold").unwrap();
        assert!(!q.validity.in_vocab_category);
        assert!(!q.validity.known_polarity_word);
        // natural words are not polarity symbols
        let (q, _) = r.parse_clause("AC1 is great because pasta is cold", "pasta cold").unwrap();
        assert_eq!(q.polarity, None);
    }

    #[test]
    fn lexicon_override_inverts() {
        let v = vocab();
        let m = ProjectionMode::natural().with_lexicon(PolarityLexicon::new("good", "not bad", "terrible").unwrap());
        let r = Recoverer::new(Task::Asqp, &v, &m);
        let (q, _) = r.parse_clause("food quality is not bad because pasta is fine", "pasta fine").unwrap();
        assert_eq!(q.polarity, Some(Polarity::Neutral));
    }

    #[test]
    fn plain_tuples() {
        let v = vocab();
        let m = ProjectionMode::plain_tuple();
        let r = Recoverer::new(Task::Asqp, &v, &m);
        let (q, _) = r.parse_clause("(food style options, null, great, positive)", "great").unwrap();
        assert_eq!(q.category.as_deref(), Some("food style options"));
        assert!(q.aspect.is_implicit());
        assert_eq!(q.polarity, Some(Polarity::Positive));
        assert_eq!(r.parse_clause("food, null, great, positive", "").unwrap_err(), FailureReason::MalformedTuple);
        assert_eq!(r.parse_clause("(food)", "").unwrap_err(), FailureReason::MalformedTuple);

        let aste = Recoverer::new(Task::Aste, &v, &m);
        let (q, _) = aste.parse_clause("(chinese food, nice, positive)", "nice chinese food").unwrap();
        assert_eq!(q.to_quad(), Some(SentimentQuad::aste("chinese food", "nice", Polarity::Positive).unwrap()));
        let tasd = Recoverer::new(Task::Tasd, &v, &m);
        let (q, _) = tasd.parse_clause("(service general, waiter, negative)", "waiter").unwrap();
        assert_eq!(q.aspect.as_deref(), Some("waiter"));
        assert_eq!(q.validity, Validity::VALID);
    }

    #[test]
    fn recovery_counts_and_strictness() {
        let v = vocab();
        let m = ProjectionMode::natural();
        let sentence = "the pasta is over-cooked but the waiter was friendly";
        let a = SentimentQuad::asqp(
            "food quality",
            AspectTerm::explicit("pasta").unwrap(),
            "over-cooked",
            Polarity::Negative,
        )
        .unwrap();
        let b = SentimentQuad::asqp(
            "service general",
            AspectTerm::explicit("waiter").unwrap(),
            "friendly",
            Polarity::Positive,
        )
        .unwrap();
        let target = linearize_quads(&[a.clone(), b.clone()], Task::Asqp, &m, &v).unwrap();
        let result = recover_quads(&target, Task::Asqp, &v, sentence, &m, true);
        assert_eq!(result.sentiment_quads(), vec![a, b]);
        assert!(result.failures.is_empty());

        assert_eq!(recover_quads("", Task::Asqp, &v, sentence, &m, true), RecoveryResult::default());

        let corrupted = "drinks is bad because pasta is over-cooked";
        let strict = recover_quads(corrupted, Task::Asqp, &v, sentence, &m, true);
        assert!(strict.quads.is_empty());
        assert_eq!(strict.failures.len(), 1);
        assert_eq!(strict.failures[0].reason, FailureReason::CategoryOutOfVocab);
        let lenient = recover_quads(corrupted, Task::Asqp, &v, sentence, &m, false);
        assert_eq!(lenient.quads.len(), 1);
        assert!(!lenient.quads[0].validity.in_vocab_category);
    }

    #[test]
    fn duplicates_collapse() {
        let v = vocab();
        let m = ProjectionMode::natural();
        let clause = "food quality is bad because pasta is cold";
        let target = alloc::format!("{clause} [SSEP] {clause}. [SSEP] nonsense");
        let r = recover_quads(&target, Task::Asqp, &v, "pasta cold", &m, false);
        assert_eq!(r.quads.len(), 1);
        assert_eq!(r.duplicates, 1);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.segment_count(), 3);
    }

    #[test]
    fn assess_flags_structured_predictions() {
        let v = vocab();
        let q = SentimentQuad::asqp("drinks", AspectTerm::explicit("wine").unwrap(), "thought", Polarity::Positive)
            .unwrap();
        let pq = ParsedQuad::assess(&q, Task::Asqp, &v, "the wine was better than expected");
        assert!(!pq.validity.in_vocab_category);
        assert!(pq.validity.aspect_is_span_or_pronoun);
        assert!(!pq.validity.opinion_is_span);
        assert_eq!(pq.to_quad(), Some(q));
    }
}
