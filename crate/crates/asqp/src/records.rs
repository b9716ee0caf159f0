//! Serde records for every on-disk and on-wire JSON shape.
//!
//! Example lines look like
//!
//! ```json
//! {"sentence": "the pasta is over-cooked!", "quads": [{"category": "food quality", "aspect": "pasta", "opinion": "over-cooked", "polarity": "negative"}], "task": "asqp", "split": "train"}
//! ```
//!
//! `aspect` is `null` for an implicit aspect. Elements a task does not
//! predict (ASTE categories, TASD opinions) are written as `null` and
//! ignored on read. `split` defaults to `train`.

use asqp_core::dataset::MergeConflict;
use asqp_core::eval::{ErrorBreakdown, EvalReport, GenerationCounting, Mismatches, QuadError};
use asqp_core::recover::{ClauseFailure, ParsedQuad, RecoveryResult, Validity};
use asqp_core::{AspectTerm, CoreError, Example, Polarity, SentimentQuad, Split, Task};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadRecord {
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub aspect: Option<String>,
    #[serde(default)]
    pub opinion: Option<String>,
    pub polarity: String,
}

impl QuadRecord {
    pub fn to_quad(&self, task: Task) -> Result<SentimentQuad, CoreError> {
        let polarity: Polarity = self.polarity.parse()?;
        let category = if task.has_category() { self.category.as_deref() } else { None };
        let opinion = if task.has_opinion() { self.opinion.as_deref() } else { None };
        let quad = SentimentQuad::new(category, AspectTerm::new(self.aspect.as_deref())?, opinion, polarity)?;
        quad.validate_for(task)?;
        Ok(quad)
    }
}

impl From<&SentimentQuad> for QuadRecord {
    fn from(q: &SentimentQuad) -> Self {
        QuadRecord {
            category: q.category().map(Into::into),
            aspect: q.aspect().as_deref().map(Into::into),
            opinion: q.opinion().map(Into::into),
            polarity: q.polarity().as_str().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub sentence: String,
    pub quads: Vec<QuadRecord>,
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

impl ExampleRecord {
    pub fn to_example(&self) -> Result<Example, CoreError> {
        let task: Task = self.task.parse()?;
        let split: Split = self.split.as_deref().map(str::parse).transpose()?.unwrap_or_default();
        let quads = self.quads.iter().map(|q| q.to_quad(task)).collect::<Result<Vec<_>, _>>()?;
        Example::new(&self.sentence, quads, task, split)
    }
}

impl From<&Example> for ExampleRecord {
    fn from(e: &Example) -> Self {
        ExampleRecord {
            sentence: e.sentence().into(),
            quads: e.quads().iter().map(QuadRecord::from).collect(),
            task: e.task().as_str().into(),
            split: Some(e.split().as_str().into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityRecord {
    pub in_vocab_category: bool,
    pub known_polarity_word: bool,
    pub aspect_is_span_or_pronoun: bool,
    pub opinion_is_span: bool,
}

impl From<Validity> for ValidityRecord {
    fn from(v: Validity) -> Self {
        ValidityRecord {
            in_vocab_category: v.in_vocab_category,
            known_polarity_word: v.known_polarity_word,
            aspect_is_span_or_pronoun: v.aspect_is_span_or_pronoun,
            opinion_is_span: v.opinion_is_span,
        }
    }
}

impl From<ValidityRecord> for Validity {
    fn from(v: ValidityRecord) -> Self {
        Validity {
            in_vocab_category: v.in_vocab_category,
            known_polarity_word: v.known_polarity_word,
            aspect_is_span_or_pronoun: v.aspect_is_span_or_pronoun,
            opinion_is_span: v.opinion_is_span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedQuadRecord {
    pub category: Option<String>,
    pub aspect: Option<String>,
    pub opinion: Option<String>,
    /// `null` when the polarity word was not recognised.
    pub polarity: Option<String>,
    pub polarity_text: String,
    pub flags: ValidityRecord,
}

impl From<&ParsedQuad> for ParsedQuadRecord {
    fn from(p: &ParsedQuad) -> Self {
        ParsedQuadRecord {
            category: p.category.clone(),
            aspect: p.aspect.as_deref().map(Into::into),
            opinion: p.opinion.clone(),
            polarity: p.polarity.map(|x| x.as_str().into()),
            polarity_text: p.polarity_text.clone(),
            flags: p.validity.into(),
        }
    }
}

impl ParsedQuadRecord {
    pub fn to_parsed(&self) -> Result<ParsedQuad, CoreError> {
        Ok(ParsedQuad {
            category: self.category.as_deref().map(asqp_core::canonicalize),
            aspect: AspectTerm::new(self.aspect.as_deref())?,
            opinion: self.opinion.as_deref().map(asqp_core::canonicalize),
            polarity: self.polarity.as_deref().map(str::parse).transpose()?,
            polarity_text: self.polarity_text.clone(),
            validity: self.flags.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub segment: String,
    pub reason: String,
}

impl From<&ClauseFailure> for FailureRecord {
    fn from(f: &ClauseFailure) -> Self {
        FailureRecord { segment: f.segment.clone(), reason: f.reason.as_str().into() }
    }
}

/// One line of `parse` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryRecord {
    pub quads: Vec<ParsedQuadRecord>,
    pub failures: Vec<FailureRecord>,
    pub ambiguous_splits: usize,
    #[serde(default)]
    pub duplicates: usize,
}

impl From<&RecoveryResult> for RecoveryRecord {
    fn from(r: &RecoveryResult) -> Self {
        RecoveryRecord {
            quads: r.quads.iter().map(ParsedQuadRecord::from).collect(),
            failures: r.failures.iter().map(FailureRecord::from).collect(),
            ambiguous_splits: r.ambiguous_splits,
            duplicates: r.duplicates,
        }
    }
}

/// Opaque generation request/response bodies of the remote backend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateRequestBody {
    pub inputs: Vec<String>,
    pub task: String,
    pub decoding: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateResponseBody {
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub tp: usize,
    pub n_pred: usize,
    pub n_gold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<EvalReport> for ScoreRecord {
    fn from(r: EvalReport) -> Self {
        ScoreRecord { tp: r.tp, n_pred: r.n_pred, n_gold: r.n_gold, precision: r.precision, recall: r.recall, f1: r.f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownRecord {
    pub counting: String,
    pub aspect_term: usize,
    pub opinion_term: usize,
    pub category: usize,
    pub polarity: usize,
    pub generation: usize,
    pub unmatched: usize,
    pub total_wrong: usize,
}

impl BreakdownRecord {
    pub fn new(b: ErrorBreakdown, counting: GenerationCounting) -> Self {
        BreakdownRecord {
            counting: match counting {
                GenerationCounting::Overlapping => "overlapping",
                GenerationCounting::Exclusive => "exclusive",
            }
            .into(),
            aspect_term: b.aspect_term,
            opinion_term: b.opinion_term,
            category: b.category,
            polarity: b.polarity,
            generation: b.generation,
            unmatched: b.unmatched,
            total_wrong: b.total_wrong,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadErrorRecord {
    pub pred: ParsedQuadRecord,
    pub matched_gold: Option<usize>,
    pub mismatched: Vec<String>,
    pub generation: Vec<String>,
}

fn mismatch_names(m: &Mismatches) -> Vec<String> {
    [
        (m.category, "category"),
        (m.aspect_term, "aspect_term"),
        (m.opinion_term, "opinion_term"),
        (m.polarity, "polarity"),
    ]
    .into_iter()
    .filter(|(hit, _)| *hit)
    .map(|(_, name)| name.to_string())
    .collect()
}

impl From<&QuadError> for QuadErrorRecord {
    fn from(e: &QuadError) -> Self {
        QuadErrorRecord {
            pred: (&e.pred).into(),
            matched_gold: e.matched_gold,
            mismatched: mismatch_names(&e.mismatches),
            generation: e.generation.iter().map(|g| g.as_str().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleDiagnosticRecord {
    pub index: usize,
    pub sentence: String,
    pub gold: Vec<QuadRecord>,
    pub errors: Vec<QuadErrorRecord>,
}

/// One line of `build-targets` / `transfer-mix` JSONL output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub input: String,
    pub target: String,
    pub task: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub category: String,
    pub opinion: String,
}

/// One line of the `merge` conflict listing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictRecord {
    pub sentence: String,
    pub aspect: Option<String>,
    pub polarity: String,
    pub candidates: Vec<CandidateRecord>,
}

impl From<&MergeConflict> for ConflictRecord {
    fn from(c: &MergeConflict) -> Self {
        ConflictRecord {
            sentence: c.sentence.clone(),
            aspect: c.aspect.as_deref().map(Into::into),
            polarity: c.polarity.as_str().into(),
            candidates: c
                .candidates
                .iter()
                .map(|(category, opinion)| CandidateRecord { category: category.clone(), opinion: opinion.clone() })
                .collect(),
        }
    }
}
