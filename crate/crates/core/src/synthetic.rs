//! Seeded random vocabularies and examples for property tests and
//! benchmarks.
//!
//! Every generated span is built from pseudo-words that never coincide with
//! a template keyword (`is`, `because`, `it`, `null`), so targets built
//! from these examples always parse back unambiguously.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::types::{AspectTerm, CategoryVocab, Example, Polarity, SentimentQuad, Split, Task};

const ONSETS: [&str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
const RESERVED: [&str; 8] = ["is", "it", "because", "null", "ssep", "sp1", "sp2", "sp3"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub task: Task,
    pub min_quads: usize,
    pub max_quads: usize,
    /// Chance of an implicit aspect (ignored for ASTE).
    pub implicit_rate: f64,
    pub max_span_words: usize,
}

impl SyntheticConfig {
    pub fn new(task: Task) -> Self {
        SyntheticConfig { task, min_quads: 1, max_quads: 4, implicit_rate: 0.2, max_span_words: 3 }
    }
}

/// Random generator of pseudo-word vocabularies and examples.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    rng: ChaCha8Rng,
}

impl Synthesizer {
    pub fn new(seed: u64) -> Self {
        Synthesizer { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn word(&mut self) -> String {
        loop {
            let syllables = self.rng.random_range(1..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSETS[self.rng.random_range(0..ONSETS.len())]);
                w.push_str(VOWELS[self.rng.random_range(0..VOWELS.len())]);
            }
            if !RESERVED.contains(&w.as_str()) {
                return w;
            }
        }
    }

    pub fn span(&mut self, max_words: usize) -> String {
        let n = self.rng.random_range(1..=max_words.max(1));
        let words: Vec<String> = (0..n).map(|_| self.word()).collect();
        words.join(" ")
    }

    /// A vocabulary of `n` distinct multi-word categories.
    pub fn vocab(&mut self, n: usize) -> CategoryVocab {
        let mut names: Vec<String> = Vec::with_capacity(n);
        while names.len() < n {
            let name = self.span(3);
            if !names.contains(&name) {
                names.push(name);
            }
        }
        CategoryVocab::new(names).expect("distinct non-empty names")
    }

    pub fn example(&mut self, vocab: &CategoryVocab, cfg: &SyntheticConfig) -> Example {
        let n = self.rng.random_range(cfg.min_quads..=cfg.max_quads.max(cfg.min_quads));
        let categories: Vec<&str> = vocab.iter().collect();
        let mut pieces: Vec<String> = Vec::new();
        let mut quads = Vec::with_capacity(n);
        for _ in 0..n {
            let category = categories[self.rng.random_range(0..categories.len())];
            let implicit = cfg.task != Task::Aste && self.rng.random::<f64>() < cfg.implicit_rate;
            let aspect = if implicit {
                AspectTerm::implicit()
            } else {
                let span = self.span(cfg.max_span_words);
                pieces.push(span.clone());
                AspectTerm::explicit(&span).expect("non-empty span")
            };
            let opinion = self.span(cfg.max_span_words);
            pieces.push(opinion.clone());
            let polarity = Polarity::ALL[self.rng.random_range(0..3)];
            let quad = SentimentQuad::asqp(category, aspect, &opinion, polarity).expect("valid quad");
            quads.push(quad.project(cfg.task).expect("fits task"));
        }
        let filler = self.word();
        pieces.push(filler);
        pieces.shuffle(&mut self.rng);
        Example::new(&pieces.join(" "), quads, cfg.task, Split::Train).expect("valid example")
    }

    pub fn examples(&mut self, vocab: &CategoryVocab, cfg: &SyntheticConfig, n: usize) -> Vec<Example> {
        (0..n).map(|_| self.example(vocab, cfg)).collect()
    }
}
