//! Exact-match scoring and error-type analysis.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::recover::{ParsedQuad, RecoveryResult};
use crate::types::SentimentQuad;

/// Micro-averaged precision, recall and F1 over a corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub tp: usize,
    pub n_pred: usize,
    pub n_gold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(tp: usize, n_pred: usize, n_gold: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, n_pred);
        let recall = ratio(tp, n_gold);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        EvalReport { tp, n_pred, n_gold, precision, recall, f1 }
    }
}

/// Scores aligned per-example prediction and gold sets. Duplicates within an
/// example count once.
pub fn score<T, P, G>(preds: &[P], golds: &[G]) -> Result<EvalReport>
where
    T: Ord,
    P: AsRef<[T]>,
    G: AsRef<[T]>,
{
    if preds.len() != golds.len() {
        return Err(CoreError::LengthMismatch { preds: preds.len(), golds: golds.len() });
    }
    let (mut tp, mut n_pred, mut n_gold) = (0, 0, 0);
    for (pred, gold) in preds.iter().zip(golds) {
        let pred: BTreeSet<&T> = pred.as_ref().iter().collect();
        let gold: BTreeSet<&T> = gold.as_ref().iter().collect();
        tp += pred.intersection(&gold).count();
        n_pred += pred.len();
        n_gold += gold.len();
    }
    Ok(EvalReport::from_counts(tp, n_pred, n_gold))
}

/// Scores recovered generations. Quads whose polarity word was not
/// recognised still count as (wrong) predictions.
pub fn score_recovered<G: AsRef<[SentimentQuad]>>(preds: &[RecoveryResult], golds: &[G]) -> Result<EvalReport> {
    let preds: Vec<&[ParsedQuad]> = preds.iter().map(|r| r.quads.as_slice()).collect();
    score_parsed(&preds, golds)
}

pub fn score_parsed<P, G>(preds: &[P], golds: &[G]) -> Result<EvalReport>
where
    P: AsRef<[ParsedQuad]>,
    G: AsRef<[SentimentQuad]>,
{
    if preds.len() != golds.len() {
        return Err(CoreError::LengthMismatch { preds: preds.len(), golds: golds.len() });
    }
    let (mut tp, mut n_pred, mut n_gold) = (0, 0, 0);
    for (pred, gold) in preds.iter().zip(golds) {
        let gold: BTreeSet<&SentimentQuad> = gold.as_ref().iter().collect();
        let pred: BTreeSet<&ParsedQuad> = pred.as_ref().iter().collect();
        // two parsed quads can only map to the same SentimentQuad if they are equal
        tp += pred.iter().filter_map(|p| p.to_quad()).filter(|q| gold.contains(q)).count();
        n_pred += pred.len();
        n_gold += gold.len();
    }
    Ok(EvalReport::from_counts(tp, n_pred, n_gold))
}

/// A failed domain check on a predicted element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenerationFlag {
    CategoryOutOfVocab,
    UnknownPolarityWord,
    AspectNotASpan,
    OpinionNotASpan,
}

impl GenerationFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            GenerationFlag::CategoryOutOfVocab => "category-out-of-vocab",
            GenerationFlag::UnknownPolarityWord => "unknown-polarity-word",
            GenerationFlag::AspectNotASpan => "aspect-not-a-span",
            GenerationFlag::OpinionNotASpan => "opinion-not-a-span",
        }
    }
}

pub fn detect_generation_error(pq: &ParsedQuad) -> Vec<GenerationFlag> {
    let v = &pq.validity;
    [
        (v.in_vocab_category, GenerationFlag::CategoryOutOfVocab),
        (v.known_polarity_word, GenerationFlag::UnknownPolarityWord),
        (v.aspect_is_span_or_pronoun, GenerationFlag::AspectNotASpan),
        (v.opinion_is_span, GenerationFlag::OpinionNotASpan),
    ]
    .into_iter()
    .filter_map(|(ok, flag)| (!ok).then_some(flag))
    .collect()
}

/// Whether a generation error also contributes element-mismatch counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GenerationCounting {
    /// Generation errors are counted on top of element mismatches.
    #[default]
    Overlapping,
    /// A prediction with a generation error counts only as a generation error.
    Exclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorBreakdown {
    pub aspect_term: usize,
    pub opinion_term: usize,
    pub category: usize,
    pub polarity: usize,
    pub generation: usize,
    /// Wrong predictions in examples with no gold quad to compare against.
    pub unmatched: usize,
    pub total_wrong: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Mismatches {
    pub category: bool,
    pub aspect_term: bool,
    pub opinion_term: bool,
    pub polarity: bool,
}

impl Mismatches {
    fn between(pred: &ParsedQuad, gold: &SentimentQuad) -> Self {
        Mismatches {
            category: pred.category.as_deref() != gold.category(),
            aspect_term: &pred.aspect != gold.aspect(),
            opinion_term: pred.opinion.as_deref() != gold.opinion(),
            polarity: pred.polarity != Some(gold.polarity()),
        }
    }

    fn count(&self) -> usize {
        [self.category, self.aspect_term, self.opinion_term, self.polarity].iter().filter(|m| **m).count()
    }
}

/// Diagnosis of one incorrect prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadError {
    pub pred: ParsedQuad,
    /// Index of the closest gold quad, if the example has any.
    pub matched_gold: Option<usize>,
    pub mismatches: Mismatches,
    pub generation: Vec<GenerationFlag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErrorAnalysis {
    pub breakdown: ErrorBreakdown,
    /// Incorrect predictions per example, aligned with the input.
    pub per_example: Vec<Vec<QuadError>>,
}

/// Attributes each incorrect prediction to the gold quad sharing the most
/// elements (first gold wins ties) and counts every differing element.
pub fn analyze_errors<P, G>(preds: &[P], golds: &[G], counting: GenerationCounting) -> Result<ErrorAnalysis>
where
    P: AsRef<[ParsedQuad]>,
    G: AsRef<[SentimentQuad]>,
{
    if preds.len() != golds.len() {
        return Err(CoreError::LengthMismatch { preds: preds.len(), golds: golds.len() });
    }
    let mut analysis = ErrorAnalysis::default();
    for (pred, gold) in preds.iter().zip(golds) {
        let gold = gold.as_ref();
        let mut seen: BTreeSet<&ParsedQuad> = BTreeSet::new();
        let mut errors = Vec::new();
        for pq in pred.as_ref() {
            if !seen.insert(pq) || pq.to_quad().is_some_and(|q| gold.contains(&q)) {
                continue;
            }
            let closest = gold
                .iter()
                .enumerate()
                .map(|(i, g)| (i, Mismatches::between(pq, g)))
                .min_by_key(|(i, m)| (m.count(), *i));
            let error = QuadError {
                pred: pq.clone(),
                matched_gold: closest.map(|(i, _)| i),
                mismatches: closest.map(|(_, m)| m).unwrap_or_default(),
                generation: detect_generation_error(pq),
            };
            tally(&mut analysis.breakdown, &error, counting);
            errors.push(error);
        }
        analysis.per_example.push(errors);
    }
    Ok(analysis)
}

fn tally(b: &mut ErrorBreakdown, error: &QuadError, counting: GenerationCounting) {
    b.total_wrong += 1;
    let generated = !error.generation.is_empty();
    if generated {
        b.generation += 1;
        if counting == GenerationCounting::Exclusive {
            return;
        }
    }
    if error.matched_gold.is_none() {
        b.unmatched += 1;
        return;
    }
    let m = &error.mismatches;
    b.category += usize::from(m.category);
    b.aspect_term += usize::from(m.aspect_term);
    b.opinion_term += usize::from(m.opinion_term);
    b.polarity += usize::from(m.polarity);
}

pub fn categorize_errors<P, G>(preds: &[P], golds: &[G], counting: GenerationCounting) -> Result<ErrorBreakdown>
where
    P: AsRef<[ParsedQuad]>,
    G: AsRef<[SentimentQuad]>,
{
    analyze_errors(preds, golds, counting).map(|a| a.breakdown)
}
