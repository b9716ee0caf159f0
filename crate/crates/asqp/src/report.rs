//! JSON reports (fixed key order, pretty-printed) and the plain-text tables
//! printed to stderr next to them.

use std::fmt::Write as _;

use asqp_core::dataset::{DatasetStats, SplitStats};
use asqp_core::Split;
use serde::Serialize;

use crate::records::{BreakdownRecord, ExampleDiagnosticRecord, ScoreRecord};

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    // reports hold only strings, integers, finite floats and sequences
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverySummary {
    pub segments: usize,
    pub failures: usize,
    pub ambiguous_splits: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluateReport {
    pub n_examples: usize,
    pub score: ScoreRecord,
    /// Present when some predictions were raw text.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoverySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub n_examples: usize,
    pub score: ScoreRecord,
    pub breakdown: BreakdownRecord,
    /// Every example with at least one wrong prediction, in input order.
    pub per_example: Vec<ExampleDiagnosticRecord>,
    /// Examples with the most wrong predictions.
    pub worst_cases: Vec<ExampleDiagnosticRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbSettings {
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E2eReport {
    pub backend: String,
    pub mode: String,
    pub strict: bool,
    pub transfer_suffix: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb: Option<PerturbSettings>,
    pub n_examples: usize,
    pub score: ScoreRecord,
    pub recovery: RecoverySummary,
    pub breakdown: BreakdownRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitStatsRecord {
    pub sentences: usize,
    pub positive: usize,
    pub neutral: usize,
    pub negative: usize,
    pub quads: usize,
}

impl From<&SplitStats> for SplitStatsRecord {
    fn from(s: &SplitStats) -> Self {
        SplitStatsRecord {
            sentences: s.n_sentences,
            positive: s.n_pos,
            neutral: s.n_neu,
            negative: s.n_neg,
            quads: s.n_quads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetStatsRecord {
    pub name: String,
    pub train: SplitStatsRecord,
    pub dev: SplitStatsRecord,
    pub test: SplitStatsRecord,
}

impl DatasetStatsRecord {
    pub fn new(name: &str, s: &DatasetStats) -> Self {
        DatasetStatsRecord { name: name.into(), train: (&s.train).into(), dev: (&s.dev).into(), test: (&s.test).into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub datasets: Vec<DatasetStatsRecord>,
}

/// Rows are splits; each dataset contributes `#S #+ #0 #-` columns.
pub fn stats_table(datasets: &[(String, DatasetStats)]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<6}", "");
    for (name, _) in datasets {
        let _ = write!(out, " | {name:^27}");
    }
    out.push('\n');
    let _ = write!(out, "{:<6}", "");
    for _ in datasets {
        let _ = write!(out, " | {:>6}{:>7}{:>7}{:>7}", "#S", "#+", "#0", "#-");
    }
    out.push('\n');
    for split in [Split::Train, Split::Dev, Split::Test] {
        let label = match split {
            Split::Train => "Train",
            Split::Dev => "Dev",
            Split::Test => "Test",
        };
        let _ = write!(out, "{label:<6}");
        for (_, stats) in datasets {
            let s = stats.get(split);
            let _ = write!(out, " | {:>6}{:>7}{:>7}{:>7}", s.n_sentences, s.n_pos, s.n_neu, s.n_neg);
        }
        out.push('\n');
    }
    out
}

pub fn score_table(score: &ScoreRecord) -> String {
    format!(
        "precision {:.4}  recall {:.4}  f1 {:.4}  (tp {} / pred {} / gold {})\n",
        score.precision, score.recall, score.f1, score.tp, score.n_pred, score.n_gold
    )
}

pub fn breakdown_table(b: &BreakdownRecord) -> String {
    let mut out = format!("error type ({} generation counting)\n", b.counting);
    for (name, n) in [
        ("aspect term", b.aspect_term),
        ("opinion term", b.opinion_term),
        ("category", b.category),
        ("polarity", b.polarity),
        ("generation", b.generation),
        ("unmatched", b.unmatched),
        ("total wrong", b.total_wrong),
    ] {
        let _ = writeln!(out, "  {name:<13}{n:>7}");
    }
    out
}
