//! Dataset transforms: annotation merging, splitting, statistics,
//! low-resource sampling, cross-task mixing and polarity lexicons.
//!
//! Everything random is driven by a `ChaCha8Rng` seeded from a `u64`, so the
//! same seed gives the same output on every platform.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::linearize::{build_input, build_target, PolarityLexicon, ProjectionMode};
use crate::rounding::round_half_away;
use crate::types::{AspectTerm, CategoryVocab, Example, Polarity, SentimentQuad, Split, Task};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    idx
}

/// Per-split counts of sentences and quads by polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SplitStats {
    pub n_sentences: usize,
    pub n_pos: usize,
    pub n_neu: usize,
    pub n_neg: usize,
}

impl SplitStats {
    pub fn n_quads(&self) -> usize {
        self.n_pos + self.n_neu + self.n_neg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DatasetStats {
    pub train: SplitStats,
    pub dev: SplitStats,
    pub test: SplitStats,
}

impl DatasetStats {
    pub fn get(&self, split: Split) -> &SplitStats {
        match split {
            Split::Train => &self.train,
            Split::Dev => &self.dev,
            Split::Test => &self.test,
        }
    }

    fn get_mut(&mut self, split: Split) -> &mut SplitStats {
        match split {
            Split::Train => &mut self.train,
            Split::Dev => &mut self.dev,
            Split::Test => &mut self.test,
        }
    }
}

/// Counts sentences and quads, grouping examples by their split tag.
pub fn compute_stats<'a>(examples: impl IntoIterator<Item = &'a Example>) -> DatasetStats {
    let mut stats = DatasetStats::default();
    for ex in examples {
        let s = stats.get_mut(ex.split());
        s.n_sentences += 1;
        for q in ex.quads() {
            match q.polarity() {
                Polarity::Positive => s.n_pos += 1,
                Polarity::Neutral => s.n_neu += 1,
                Polarity::Negative => s.n_neg += 1,
            }
        }
    }
    stats
}

/// Seeded partition into `(train, dev)` with `|dev| = round(dev_ratio * n)`.
///
/// Both parts keep the input's relative order and are re-tagged with their split.
pub fn split_train_dev(examples: &[Example], dev_ratio: f64, seed: u64) -> Result<(Vec<Example>, Vec<Example>)> {
    if !(dev_ratio > 0.0 && dev_ratio < 1.0) {
        return Err(CoreError::RatioOutOfRange { ratio: dev_ratio, inclusive_upper: false });
    }
    let n_dev = round_half_away(dev_ratio, examples.len());
    let mut is_dev = alloc::vec![false; examples.len()];
    for &i in shuffled_indices(examples.len(), seed).iter().take(n_dev) {
        is_dev[i] = true;
    }
    let (mut train, mut dev) = (Vec::new(), Vec::new());
    for (ex, dev_flag) in examples.iter().zip(is_dev) {
        if dev_flag {
            dev.push(ex.clone().with_split(Split::Dev));
        } else {
            train.push(ex.clone().with_split(Split::Train));
        }
    }
    Ok((train, dev))
}

/// Seeded uniform sample without replacement of `round(ratio * n)` examples,
/// in shuffled order.
pub fn sample_fraction(examples: &[Example], ratio: f64, seed: u64) -> Result<Vec<Example>> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(CoreError::RatioOutOfRange { ratio, inclusive_upper: true });
    }
    sample_count(examples, round_half_away(ratio, examples.len()), seed)
}

/// Seeded sample of exactly `count` examples.
pub fn sample_count(examples: &[Example], count: usize, seed: u64) -> Result<Vec<Example>> {
    if count > examples.len() {
        return Err(CoreError::SampleTooLarge { requested: count, available: examples.len() });
    }
    Ok(shuffled_indices(examples.len(), seed).into_iter().take(count).map(|i| examples[i].clone()).collect())
}

/// One model training pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingPair {
    pub input: String,
    pub target: String,
    pub task: Task,
}

/// Renders every dataset under its own task with the task suffix on the
/// input, then shuffles the concatenation.
///
/// Examples tagged with another task are projected onto the dataset's task
/// first; an example left without quads is an error.
pub fn mix_tasks(
    datasets: &[(&[Example], Task)],
    mode: &ProjectionMode,
    vocab: &CategoryVocab,
    seed: u64,
) -> Result<Vec<TrainingPair>> {
    let mut pairs = Vec::with_capacity(datasets.iter().map(|(d, _)| d.len()).sum());
    for (examples, task) in datasets {
        for ex in examples.iter() {
            let projected;
            let ex = if ex.task() == *task {
                ex
            } else {
                projected = ex.project(*task);
                &projected
            };
            pairs.push(TrainingPair {
                input: build_input(ex.sentence(), *task, true),
                target: build_target(ex, mode, vocab)?.text,
                task: *task,
            });
        }
    }
    pairs.shuffle(&mut rng(seed));
    Ok(pairs)
}

/// The most frequent opinion term per polarity; ties go to the
/// lexicographically smallest term.
pub fn derive_polarity_lexicon<'a>(examples: impl IntoIterator<Item = &'a Example>) -> Result<PolarityLexicon> {
    let mut counts: BTreeMap<Polarity, BTreeMap<&str, usize>> = BTreeMap::new();
    for q in examples.into_iter().flat_map(Example::quads) {
        if let Some(o) = q.opinion() {
            *counts.entry(q.polarity()).or_default().entry(o).or_default() += 1;
        }
    }
    let mut words: [&str; 3] = [""; 3];
    for p in Polarity::ALL {
        let terms = counts.get(&p).ok_or(CoreError::MissingPolarity(p))?;
        let mut best: Option<(&str, usize)> = None;
        for (&term, &n) in terms {
            if best.is_none_or(|(_, m)| n > m) {
                best = Some((term, n));
            }
        }
        words[p.index() - 1] = best.ok_or(CoreError::MissingPolarity(p))?.0;
    }
    PolarityLexicon::new(words[0], words[1], words[2])
}

/// An aspect anchor that joined to more than one (category, opinion) pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeConflict {
    pub sentence: String,
    pub aspect: AspectTerm,
    pub polarity: Polarity,
    /// Competing `(category, opinion)` combinations.
    pub candidates: Vec<(String, String)>,
}

type Anchor<'a> = (&'a AspectTerm, Polarity);

fn push_unique<T: PartialEq>(v: &mut Vec<T>, item: T) {
    if !v.contains(&item) {
        v.push(item);
    }
}

/// Joins (aspect, opinion, polarity) and (category, aspect, polarity)
/// annotations of the same sentence on equal aspect and polarity.
///
/// An anchor with exactly one opinion and one category becomes a quad; an
/// anchor with more is reported as a conflict and produces no quad.
/// Sentences found in only one source produce nothing.
pub fn merge_annotations(src_opinion: &[Example], src_category: &[Example]) -> (Vec<Example>, Vec<MergeConflict>) {
    // sentence -> (aspect, polarity) -> categories
    let mut categories: BTreeMap<&str, BTreeMap<(&AspectTerm, Polarity), Vec<&str>>> = BTreeMap::new();
    for ex in src_category {
        let anchors = categories.entry(ex.sentence()).or_default();
        for q in ex.quads() {
            if let Some(c) = q.category() {
                push_unique(anchors.entry((q.aspect(), q.polarity())).or_default(), c);
            }
        }
    }

    // sentences in first-appearance order, with their opinion anchors in order
    let mut order: Vec<(&str, Split)> = Vec::new();
    let mut opinions: BTreeMap<&str, Vec<(Anchor<'_>, Vec<&str>)>> = BTreeMap::new();
    for ex in src_opinion {
        let anchors = opinions.entry(ex.sentence()).or_insert_with(|| {
            order.push((ex.sentence(), ex.split()));
            Vec::new()
        });
        for q in ex.quads() {
            let Some(o) = q.opinion() else { continue };
            if q.aspect().is_implicit() {
                continue;
            }
            let key = (q.aspect(), q.polarity());
            match anchors.iter_mut().find(|(k, _)| *k == key) {
                Some((_, os)) => push_unique(os, o),
                None => anchors.push((key, alloc::vec![o])),
            }
        }
    }

    let mut merged = Vec::new();
    let mut conflicts = Vec::new();
    for (sentence, split) in order {
        let Some(cats) = categories.get(sentence) else { continue };
        let mut quads = Vec::new();
        for ((aspect, polarity), ops) in &opinions[sentence] {
            let Some(cs) = cats.get(&(*aspect, *polarity)) else { continue };
            if cs.len() == 1 && ops.len() == 1 {
                // elements are already canonical and non-empty
                if let Ok(q) = SentimentQuad::asqp(cs[0], (*aspect).clone(), ops[0], *polarity) {
                    quads.push(q);
                }
            } else {
                conflicts.push(MergeConflict {
                    sentence: sentence.into(),
                    aspect: (*aspect).clone(),
                    polarity: *polarity,
                    candidates: cs
                        .iter()
                        .flat_map(|c| ops.iter().map(move |o| (String::from(*c), String::from(*o))))
                        .collect(),
                });
            }
        }
        if !quads.is_empty() {
            if let Ok(ex) = Example::new(sentence, quads, Task::Asqp, split) {
                merged.push(ex);
            }
        }
    }
    (merged, conflicts)
}
