//! Batch text-in/text-out generation contract and the two in-process
//! backends: gold replay and seeded gold corruption.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::rng;
use crate::error::{CoreError, Result};
use crate::linearize::{build_input, linearize_quads, ProjectionMode};
use crate::types::{AspectTerm, CategoryVocab, Example, OpinionTerm, Polarity, SentimentQuad, Task};

/// A batch of model inputs for one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRequest {
    inputs: Vec<String>,
    task: Task,
}

impl GenerationRequest {
    pub fn new(inputs: Vec<String>, task: Task) -> Result<Self> {
        if inputs.is_empty() {
            return Err(CoreError::EmptyRequest);
        }
        Ok(GenerationRequest { inputs, task })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn task(&self) -> Task {
        self.task
    }
}

/// Maps a batch of inputs to position-aligned outputs.
pub trait GeneratorBackend {
    type Error;

    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>, Self::Error>;
}

/// Gold rendering of an example; `""` for an example without quads.
pub fn gold_target(example: &Example, mode: &ProjectionMode, vocab: &CategoryVocab) -> Result<String> {
    if example.quads().is_empty() {
        Ok(String::new())
    } else {
        linearize_quads(example.quads(), example.task(), mode, vocab)
    }
}

/// Replays a fixed input-to-output table.
#[derive(Debug, Clone, Default)]
pub struct TableBackend {
    outputs: BTreeMap<String, String>,
}

impl TableBackend {
    pub fn get(&self, input: &str) -> Option<&str> {
        self.outputs.get(input).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }
}

impl GeneratorBackend for TableBackend {
    type Error = CoreError;

    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>> {
        request
            .inputs
            .iter()
            .map(|input| self.get(input).map(Into::into).ok_or_else(|| CoreError::UnknownInput(input.clone())))
            .collect()
    }
}

/// Answers every known input with the linearized gold quads.
#[derive(Debug, Clone, Default)]
pub struct OracleBackend(TableBackend);

impl OracleBackend {
    /// Fails if one input maps to two different gold targets.
    pub fn new(
        examples: &[Example],
        mode: &ProjectionMode,
        vocab: &CategoryVocab,
        transfer_suffix: bool,
    ) -> Result<Self> {
        let mut outputs = BTreeMap::new();
        for ex in examples {
            let input = build_input(ex.sentence(), ex.task(), transfer_suffix);
            let target = gold_target(ex, mode, vocab)?;
            match outputs.get(&input) {
                Some(existing) if *existing != target => return Err(CoreError::ConflictingGold(input)),
                Some(_) => {}
                None => {
                    outputs.insert(input, target);
                }
            }
        }
        Ok(OracleBackend(TableBackend { outputs }))
    }

    pub fn table(&self) -> &TableBackend {
        &self.0
    }
}

impl GeneratorBackend for OracleBackend {
    type Error = CoreError;

    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>> {
        self.0.generate(request)
    }
}

/// Relative chance of corrupting each element. Elements the task does not
/// predict are skipped and the rest renormalized; with no weight left the
/// choice is uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementWeights {
    pub category: f64,
    pub aspect: f64,
    pub opinion: f64,
    pub polarity: f64,
}

impl Default for ElementWeights {
    fn default() -> Self {
        ElementWeights { category: 0.25, aspect: 0.25, opinion: 0.25, polarity: 0.25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbConfig {
    rho: f64,
    seed: u64,
    weights: ElementWeights,
}

impl PerturbConfig {
    pub fn new(rho: f64, seed: u64, weights: ElementWeights) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(CoreError::InvalidPerturbConfig("rho must be in [0, 1]"));
        }
        let w = [weights.category, weights.aspect, weights.opinion, weights.polarity];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(CoreError::InvalidPerturbConfig("weights must be non-negative"));
        }
        if (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidPerturbConfig("weights must sum to 1"));
        }
        Ok(PerturbConfig { rho, seed, weights })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn weights(&self) -> ElementWeights {
        self.weights
    }
}

/// Replacement spans for aspect and opinion corruption. None of them is an
/// English word, so a decoy never matches a real annotation.
pub const DECOY_SPANS: [&str; 12] = [
    "zorblat", "quixxel", "vantrope", "flimwick", "grondel", "mizzapet", "trubnik", "yelvash", "kradnum", "plovitz",
    "snerdle", "wumbrix",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Category,
    Aspect,
    Opinion,
    Polarity,
}

fn pick_target<R: Rng>(weights: &ElementWeights, task: Task, rng: &mut R) -> Target {
    let mut options: Vec<(Target, f64)> =
        alloc::vec![(Target::Aspect, weights.aspect), (Target::Polarity, weights.polarity)];
    if task.has_category() {
        options.push((Target::Category, weights.category));
    }
    if task.has_opinion() {
        options.push((Target::Opinion, weights.opinion));
    }
    let total: f64 = options.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return options[rng.random_range(0..options.len())].0;
    }
    let mut draw = rng.random::<f64>() * total;
    for (target, w) in &options {
        if draw < *w {
            return *target;
        }
        draw -= w;
    }
    // rounding left the draw past the end: take the last weighted option
    options.iter().rev().find(|(_, w)| *w > 0.0).map_or(Target::Polarity, |(t, _)| *t)
}

fn decoy<'a, R: Rng>(original: Option<&str>, sentence: &str, rng: &mut R) -> Option<&'a str> {
    let usable: Vec<&str> =
        DECOY_SPANS.iter().copied().filter(|d| Some(*d) != original && !sentence.contains(d)).collect();
    (!usable.is_empty()).then(|| usable[rng.random_range(0..usable.len())])
}

fn other_polarity<R: Rng>(p: Polarity, rng: &mut R) -> Polarity {
    let others: Vec<Polarity> = Polarity::ALL.into_iter().filter(|x| *x != p).collect();
    others[rng.random_range(0..others.len())]
}

/// Replaces exactly one element of `quad` with a different value from its domain.
fn corrupt<R: Rng>(
    quad: &SentimentQuad,
    task: Task,
    weights: &ElementWeights,
    vocab: &CategoryVocab,
    sentence: &str,
    rng: &mut R,
) -> SentimentQuad {
    let flip_polarity = |rng: &mut R| quad.clone().with_polarity(other_polarity(quad.polarity(), rng));
    match pick_target(weights, task, rng) {
        Target::Polarity => flip_polarity(rng),
        Target::Category => {
            let current = quad.category().unwrap_or_default();
            let others: Vec<&str> = vocab.iter().filter(|c| *c != current).collect();
            if others.is_empty() {
                return flip_polarity(rng);
            }
            let pick = others[rng.random_range(0..others.len())];
            quad.clone().with_category(Some(pick.into()))
        }
        Target::Aspect => match decoy(quad.aspect().as_deref(), sentence, rng) {
            Some(d) => quad.clone().with_aspect(AspectTerm::explicit(d).unwrap_or_default()),
            None => flip_polarity(rng),
        },
        Target::Opinion => match decoy(quad.opinion(), sentence, rng).and_then(|d| OpinionTerm::new(d).ok()) {
            Some(o) => quad.clone().with_opinion(Some(o)),
            None => flip_polarity(rng),
        },
    }
}

/// Gold targets with each quad independently corrupted with probability
/// `rho`, aligned with `golds`.
pub fn perturb_generate(
    golds: &[Example],
    cfg: &PerturbConfig,
    vocab: &CategoryVocab,
    mode: &ProjectionMode,
) -> Result<Vec<String>> {
    let mut rng = rng(cfg.seed);
    golds
        .iter()
        .map(|ex| {
            let quads: Vec<SentimentQuad> = ex
                .quads()
                .iter()
                .map(|q| {
                    if rng.random::<f64>() < cfg.rho {
                        corrupt(q, ex.task(), &cfg.weights, vocab, ex.sentence(), &mut rng)
                    } else {
                        q.clone()
                    }
                })
                .collect();
            if quads.is_empty() {
                Ok(String::new())
            } else {
                linearize_quads(&quads, ex.task(), mode, vocab)
            }
        })
        .collect()
}

/// Serves [`perturb_generate`] outputs. Repeated inputs get the output of
/// their first occurrence.
#[derive(Debug, Clone, Default)]
pub struct PerturbBackend(TableBackend);

impl PerturbBackend {
    pub fn new(
        golds: &[Example],
        cfg: &PerturbConfig,
        vocab: &CategoryVocab,
        mode: &ProjectionMode,
        transfer_suffix: bool,
    ) -> Result<Self> {
        let outputs = perturb_generate(golds, cfg, vocab, mode)?;
        let mut table = BTreeMap::new();
        for (ex, out) in golds.iter().zip(outputs) {
            table.entry(build_input(ex.sentence(), ex.task(), transfer_suffix)).or_insert(out);
        }
        Ok(PerturbBackend(TableBackend { outputs: table }))
    }
}

impl GeneratorBackend for PerturbBackend {
    type Error = CoreError;

    fn generate(&self, request: &GenerationRequest) -> Result<Vec<String>> {
        self.0.generate(request)
    }
}
