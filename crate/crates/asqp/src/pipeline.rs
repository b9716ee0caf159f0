//! Parallel per-example steps. Every function preserves input order, so
//! results do not depend on the number of workers.

use std::collections::BTreeMap;

use asqp_core::backend::{gold_target, GenerationRequest, GeneratorBackend};
use asqp_core::eval::{analyze_errors, score_parsed, ErrorAnalysis, EvalReport, GenerationCounting};
use asqp_core::linearize::{build_input, ProjectionMode};
use asqp_core::recover::{ParsedQuad, Recoverer, RecoveryResult};
use asqp_core::{CategoryVocab, Example, Task};
use rayon::prelude::*;

use crate::io::Prediction;
use crate::{Error, Result};

/// Runs `f` on a pool of `jobs` workers; `0` means one per core.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub input: String,
    pub target: String,
}

pub fn build_pairs(
    examples: &[Example],
    mode: &ProjectionMode,
    vocab: &CategoryVocab,
    transfer_suffix: bool,
) -> Result<Vec<Pair>> {
    examples
        .par_iter()
        .map(|ex| {
            Ok(Pair {
                input: build_input(ex.sentence(), ex.task(), transfer_suffix),
                target: gold_target(ex, mode, vocab)?,
            })
        })
        .collect()
}

/// Recovers `outputs[i]` against `examples[i]`'s sentence under that
/// example's task.
pub fn recover_all(
    outputs: &[String],
    examples: &[Example],
    vocab: &CategoryVocab,
    mode: &ProjectionMode,
    strict: bool,
) -> Result<Vec<RecoveryResult>> {
    check_len(outputs.len(), examples.len())?;
    Ok(outputs
        .par_iter()
        .zip(examples.par_iter())
        .map(|(out, ex)| Recoverer::new(ex.task(), vocab, mode).strict(strict).recover(out, ex.sentence()))
        .collect())
}

fn check_len(preds: usize, golds: usize) -> Result<()> {
    if preds == golds {
        Ok(())
    } else {
        Err(asqp_core::CoreError::LengthMismatch { preds, golds }.into())
    }
}

/// Predictions resolved into parsed quads, aligned with the gold examples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Resolved {
    pub quads: Vec<Vec<ParsedQuad>>,
    /// Recovery results for the lines that were raw text.
    pub recovered: BTreeMap<usize, RecoveryResult>,
}

impl Resolved {
    pub fn failures(&self) -> usize {
        self.recovered.values().map(|r| r.failures.len()).sum()
    }
}

/// Raw text is recovered against the aligned gold sentence; structured
/// predictions are re-assessed against the vocabulary and sentence.
pub fn resolve_predictions(
    preds: &[Prediction],
    golds: &[Example],
    vocab: &CategoryVocab,
    mode: &ProjectionMode,
    strict: bool,
) -> Result<Resolved> {
    check_len(preds.len(), golds.len())?;
    let items: Vec<(Vec<ParsedQuad>, Option<RecoveryResult>)> = preds
        .par_iter()
        .zip(golds.par_iter())
        .map(|(pred, gold)| match pred {
            Prediction::Text(text) => {
                let r = Recoverer::new(gold.task(), vocab, mode).strict(strict).recover(text, gold.sentence());
                (r.quads.clone(), Some(r))
            }
            Prediction::Example(ex) => {
                (ex.quads().iter().map(|q| ParsedQuad::assess(q, gold.task(), vocab, gold.sentence())).collect(), None)
            }
            Prediction::Recovered(quads) => (quads.clone(), None),
        })
        .collect();
    let mut resolved = Resolved::default();
    for (i, (quads, recovery)) in items.into_iter().enumerate() {
        resolved.quads.push(quads);
        if let Some(r) = recovery {
            resolved.recovered.insert(i, r);
        }
    }
    Ok(resolved)
}

pub fn gold_sets(golds: &[Example]) -> Vec<&[asqp_core::SentimentQuad]> {
    golds.iter().map(Example::quads).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub score: EvalReport,
    pub analysis: ErrorAnalysis,
}

pub fn evaluate(preds: &[Vec<ParsedQuad>], golds: &[Example], counting: GenerationCounting) -> Result<Evaluation> {
    let gold = gold_sets(golds);
    Ok(Evaluation { score: score_parsed(preds, &gold)?, analysis: analyze_errors(preds, &gold, counting)? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct E2eOutcome {
    pub outputs: Vec<String>,
    pub recovered: Vec<RecoveryResult>,
    pub evaluation: Evaluation,
}

/// build-input → generate → recover → score. Examples are grouped by task
/// so each generation request carries a single task.
pub fn e2e<B>(
    examples: &[Example],
    backend: &B,
    mode: &ProjectionMode,
    vocab: &CategoryVocab,
    transfer_suffix: bool,
    strict: bool,
    counting: GenerationCounting,
) -> Result<E2eOutcome>
where
    B: GeneratorBackend + Sync,
    Error: From<B::Error>,
{
    let mut outputs = vec![String::new(); examples.len()];
    let mut by_task: BTreeMap<Task, Vec<usize>> = BTreeMap::new();
    for (i, ex) in examples.iter().enumerate() {
        by_task.entry(ex.task()).or_default().push(i);
    }
    for (task, indices) in by_task {
        let inputs = indices.iter().map(|&i| build_input(examples[i].sentence(), task, transfer_suffix)).collect();
        let request = GenerationRequest::new(inputs, task)?;
        let generated = backend.generate(&request)?;
        check_len(generated.len(), indices.len())?;
        for (i, out) in indices.into_iter().zip(generated) {
            outputs[i] = out;
        }
    }
    let recovered = recover_all(&outputs, examples, vocab, mode, strict)?;
    let preds: Vec<Vec<ParsedQuad>> = recovered.iter().map(|r| r.quads.clone()).collect();
    let evaluation = evaluate(&preds, examples, counting)?;
    Ok(E2eOutcome { outputs, recovered, evaluation })
}
