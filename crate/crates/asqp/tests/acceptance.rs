//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! `ASQP_DATA_DIR` may point at a directory holding `rest15/` and `rest16/`
//! with `train.jsonl`, `dev.jsonl` and `test.jsonl`; the dataset statistics
//! are then compared with the published counts.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use asqp::io::{examples_to_jsonl, read_examples};
use asqp::pipeline;
use asqp_core::backend::{ElementWeights, OracleBackend, PerturbBackend, PerturbConfig};
use asqp_core::dataset::{compute_stats, mix_tasks, sample_count, sample_fraction, split_train_dev, SplitStats};
use asqp_core::eval::{score, GenerationCounting};
use asqp_core::linearize::{build_target, linearize_quad, ModeKind, ProjectionMode};
use asqp_core::recover::Recoverer;
use asqp_core::synthetic::{Synthesizer, SyntheticConfig};
use asqp_core::{AspectTerm, CategoryVocab, Example, Polarity, SentimentQuad, Split, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()))
}

fn published_strings() -> Check {
    let start = Instant::now();
    let mode = ProjectionMode::natural();
    let vocab = CategoryVocab::new(["food quality", "service general"]).unwrap();
    let cases = [
        (
            SentimentQuad::asqp(
                "food quality",
                AspectTerm::explicit("pasta").unwrap(),
                "over-cooked",
                Polarity::Negative,
            )
            .unwrap(),
            Task::Asqp,
            "food quality is bad because pasta is over-cooked",
        ),
        (
            SentimentQuad::tasd("service general", AspectTerm::explicit("waiter").unwrap(), Polarity::Negative)
                .unwrap(),
            Task::Tasd,
            "service general is bad because waiter is bad",
        ),
        (
            SentimentQuad::aste("chinese food", "nice", Polarity::Positive).unwrap(),
            Task::Aste,
            "it is great because chinese food is nice",
        ),
    ];
    for (quad, task, expected) in &cases {
        let got = linearize_quad(quad, *task, &mode, &vocab).map_err(|e| e.to_string())?;
        ensure(got == *expected, format!("{task}: got {got:?}, expected {expected:?}"))?;
    }
    within(start.elapsed(), 1.0)?;
    Ok(format!("3/3 clauses exact in {:.3}s", start.elapsed().as_secs_f64()))
}

fn roundtrip() -> Check {
    let start = Instant::now();
    let mut synth = Synthesizer::new(2024);
    let vocab = synth.vocab(13);
    let mut cfg = SyntheticConfig::new(Task::Asqp);
    cfg.min_quads = 1;
    cfg.max_quads = 4;
    let examples = synth.examples(&vocab, &cfg, 10_000);
    let mode = ProjectionMode::natural();
    let recoverer = Recoverer::new(Task::Asqp, &vocab, &mode).strict(true);
    let mut mismatches = 0;
    let mut failures = 0;
    for ex in &examples {
        ensure(!ex.quads().iter().any(|q| q.aspect().as_deref() == Some("it")), "aspect \"it\" generated")?;
        let target = build_target(ex, &mode, &vocab).map_err(|e| e.to_string())?;
        let r = recoverer.recover(&target.text, ex.sentence());
        failures += r.failures.len();
        if r.sentiment_quads() != ex.quads() {
            mismatches += 1;
        }
    }
    ensure(failures == 0 && mismatches == 0, format!("{mismatches} mismatched examples, {failures} clause failures"))?;
    within(start.elapsed(), 5.0)?;
    let n_quads: usize = examples.iter().map(|e| e.quads().len()).sum();
    Ok(format!("10000 examples / {n_quads} quads exact, 0 failures, {:.2}s", start.elapsed().as_secs_f64()))
}

fn oracle_f1() -> Check {
    let start = Instant::now();
    let mut synth = Synthesizer::new(7);
    let vocab = synth.vocab(13);
    let mut examples = Vec::new();
    for task in [Task::Asqp, Task::Aste, Task::Tasd] {
        examples.extend(synth.examples(&vocab, &SyntheticConfig::new(task), 1000 / 3 + 1));
    }
    examples.truncate(1000);
    let mut detail = Vec::new();
    for kind in [ModeKind::Natural, ModeKind::SymbolicBoth, ModeKind::PlainTuple] {
        let mode = ProjectionMode::new(kind);
        let backend = OracleBackend::new(&examples, &mode, &vocab, false).map_err(|e| e.to_string())?;
        let out = pipeline::e2e(&examples, &backend, &mode, &vocab, false, true, GenerationCounting::Overlapping)
            .map_err(|e| e.to_string())?;
        let s = out.evaluation.score;
        ensure(
            s.precision == 1.0 && s.recall == 1.0 && s.f1 == 1.0,
            format!("{kind}: P={} R={} F1={}", s.precision, s.recall, s.f1),
        )?;
        detail.push(kind.as_str());
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!("P=R=F1=1.0 on 1000 mixed-task examples ({}), {:.2}s", detail.join(", "), start.elapsed().as_secs_f64()))
}

fn corruption_curve() -> Check {
    let start = Instant::now();
    let mut synth = Synthesizer::new(99);
    let vocab = synth.vocab(13);
    let mut cfg = SyntheticConfig::new(Task::Asqp);
    cfg.min_quads = 1;
    cfg.max_quads = 1;
    let examples = synth.examples(&vocab, &cfg, 10_000);
    let mode = ProjectionMode::natural();
    let mut measured = Vec::new();
    for rho in [0.1, 0.3, 0.5] {
        let pc = PerturbConfig::new(rho, 1234, ElementWeights::default()).map_err(|e| e.to_string())?;
        let backend = PerturbBackend::new(&examples, &pc, &vocab, &mode, false).map_err(|e| e.to_string())?;
        let out = pipeline::e2e(&examples, &backend, &mode, &vocab, false, false, GenerationCounting::Overlapping)
            .map_err(|e| e.to_string())?;
        let f1 = out.evaluation.score.f1;
        ensure((f1 - (1.0 - rho)).abs() <= 0.02, format!("rho={rho}: F1={f1:.4}, expected {:.2} +/- 0.02", 1.0 - rho))?;
        measured.push(format!("rho={rho} F1={f1:.4}"));
    }
    within(start.elapsed(), 30.0)?;
    Ok(format!("{}, {:.2}s", measured.join(", "), start.elapsed().as_secs_f64()))
}

/// Pairwise comparison only: no sets, no sorting.
fn brute_force(preds: &[Vec<SentimentQuad>], golds: &[Vec<SentimentQuad>]) -> (usize, usize, usize) {
    fn distinct(v: &[SentimentQuad]) -> Vec<&SentimentQuad> {
        let mut out: Vec<&SentimentQuad> = Vec::new();
        for q in v {
            if !out.contains(&q) {
                out.push(q);
            }
        }
        out
    }
    let (mut tp, mut np, mut ng) = (0, 0, 0);
    for (p, g) in preds.iter().zip(golds) {
        let (p, g) = (distinct(p), distinct(g));
        tp += p.iter().filter(|x| g.iter().any(|y| y == *x)).count();
        np += p.len();
        ng += g.len();
    }
    (tp, np, ng)
}

fn scorer_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cats = ["food quality", "service general"];
    let aspects = [None, Some("pasta"), Some("waiter")];
    let opinions = ["good", "bad"];
    let random_quad = |rng: &mut ChaCha8Rng| {
        SentimentQuad::asqp(
            cats[rng.random_range(0..2)],
            AspectTerm::new(aspects[rng.random_range(0..3)]).unwrap(),
            opinions[rng.random_range(0..2)],
            Polarity::ALL[rng.random_range(0..3)],
        )
        .unwrap()
    };
    let mut discrepancies = 0;
    for _ in 0..1000 {
        let n_ex = rng.random_range(1..=4);
        let mut preds = Vec::new();
        let mut golds = Vec::new();
        for _ in 0..n_ex {
            let np = rng.random_range(0..=5);
            let ng = rng.random_range(0..=5);
            preds.push((0..np).map(|_| random_quad(&mut rng)).collect::<Vec<_>>());
            golds.push((0..ng).map(|_| random_quad(&mut rng)).collect::<Vec<_>>());
        }
        let r = score(&preds, &golds).map_err(|e| e.to_string())?;
        let (tp, np, ng) = brute_force(&preds, &golds);
        let p = if np == 0 { 0.0 } else { tp as f64 / np as f64 };
        let rc = if ng == 0 { 0.0 } else { tp as f64 / ng as f64 };
        let f = if p + rc == 0.0 { 0.0 } else { 2.0 * p * rc / (p + rc) };
        if (r.tp, r.n_pred, r.n_gold) != (tp, np, ng)
            || (r.precision - p).abs() > 1e-12
            || (r.recall - rc).abs() > 1e-12
            || (r.f1 - f).abs() > 1e-12
        {
            discrepancies += 1;
        }
    }
    ensure(discrepancies == 0, format!("{discrepancies} discrepancies"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!("1000 instances, 0 discrepancies, {:.2}s", start.elapsed().as_secs_f64()))
}

type Row = (Split, [usize; 4]);

const PUBLISHED: [(&str, [Row; 3]); 2] = [
    (
        "rest15",
        [(Split::Train, [834, 1005, 34, 315]), (Split::Dev, [209, 252, 14, 81]), (Split::Test, [537, 453, 37, 305])],
    ),
    (
        "rest16",
        [(Split::Train, [1264, 1369, 62, 558]), (Split::Dev, [316, 341, 23, 143]), (Split::Test, [544, 583, 40, 176])],
    ),
];

fn as_row(s: &SplitStats) -> [usize; 4] {
    [s.n_sentences, s.n_pos, s.n_neu, s.n_neg]
}

fn dataset_statistics() -> Check {
    let start = Instant::now();
    if let Some(dir) = std::env::var_os("ASQP_DATA_DIR") {
        let dir = Path::new(&dir);
        for (name, rows) in PUBLISHED {
            let mut examples = Vec::new();
            for (split, file) in [(Split::Train, "train.jsonl"), (Split::Dev, "dev.jsonl"), (Split::Test, "test.jsonl")]
            {
                let read = read_examples(&dir.join(name).join(file)).map_err(|e| e.to_string())?;
                examples.extend(read.into_iter().map(|e| e.with_split(split)));
            }
            let stats = compute_stats(&examples);
            for (split, expected) in rows {
                let got = as_row(stats.get(split));
                ensure(got == expected, format!("{name} {}: got {got:?}, expected {expected:?}", split.as_str()))?;
            }
        }
        within(start.elapsed(), 1.0)?;
        return Ok("all 24 published counts reproduced".into());
    }

    // datasets unavailable: the statistics invariants on synthetic data
    let mut synth = Synthesizer::new(15);
    let vocab = synth.vocab(13);
    let base = synth.examples(&vocab, &SyntheticConfig::new(Task::Asqp), 2000);
    let (train, dev) = split_train_dev(&base[..1500], 0.2, 3).map_err(|e| e.to_string())?;
    let test: Vec<Example> = base[1500..].iter().cloned().map(|e| e.with_split(Split::Test)).collect();
    let all: Vec<Example> = train.iter().chain(&dev).chain(&test).cloned().collect();
    let stats = compute_stats(&all);
    for (split, part) in [(Split::Train, &train), (Split::Dev, &dev), (Split::Test, &test)] {
        let s = stats.get(split);
        let quads: usize = part.iter().map(|e| e.quads().len()).sum();
        let count = |p: Polarity| part.iter().flat_map(|e| e.quads()).filter(|q| q.polarity() == p).count();
        ensure(s.n_sentences == part.len(), format!("{}: sentence count", split.as_str()))?;
        ensure(
            s.n_pos + s.n_neu + s.n_neg == quads,
            format!("{}: polarity counts do not sum to quads", split.as_str()),
        )?;
        ensure(
            [s.n_pos, s.n_neu, s.n_neg]
                == [count(Polarity::Positive), count(Polarity::Neutral), count(Polarity::Negative)],
            format!("{}: per-polarity count", split.as_str()),
        )?;
    }
    ensure(stats.dev.n_sentences == 300 && stats.train.n_sentences == 1200, "split sizes")?;

    // the CLI reports the same numbers
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    fs::write(tmp.path().join("synthetic.jsonl"), examples_to_jsonl(&all)).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_asqp"))
        .current_dir(tmp.path())
        .args(["stats", "synthetic.jsonl"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), "stats subcommand failed")?;
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    for split in [Split::Train, Split::Dev, Split::Test] {
        let row = &report["datasets"][0][split.as_str()];
        let got =
            ["sentences", "positive", "neutral", "negative"].map(|k| row[k].as_u64().unwrap_or(u64::MAX) as usize);
        ensure(got == as_row(stats.get(split)), format!("stats CLI {} row differs", split.as_str()))?;
    }
    within(start.elapsed(), 1.0)?;
    Ok("datasets unavailable (ASQP_DATA_DIR unset); stats invariants hold on 2000 synthetic examples".into())
}

fn transfer_mix() -> Check {
    let start = Instant::now();
    let mut synth = Synthesizer::new(31);
    let vocab = synth.vocab(13);
    let aste_pool = synth.examples(&vocab, &SyntheticConfig::new(Task::Aste), 1200);
    let tasd_pool = synth.examples(&vocab, &SyntheticConfig::new(Task::Tasd), 1200);
    let asqp_train = synth.examples(&vocab, &SyntheticConfig::new(Task::Asqp), 834);
    let aste = sample_count(&aste_pool, 500, 1).map_err(|e| e.to_string())?;
    let tasd = sample_count(&tasd_pool, 100, 1).map_err(|e| e.to_string())?;
    let asqp = sample_fraction(&asqp_train, 0.05, 1).map_err(|e| e.to_string())?;
    ensure(asqp.len() == 42, format!("5% of 834 gave {}", asqp.len()))?;
    let mode = ProjectionMode::natural();
    let pairs = mix_tasks(&[(&aste, Task::Aste), (&tasd, Task::Tasd), (&asqp, Task::Asqp)], &mode, &vocab, 8)
        .map_err(|e| e.to_string())?;
    ensure(pairs.len() == 642, format!("{} pairs", pairs.len()))?;
    for p in &pairs {
        let suffix = format!(" {}", p.task.token());
        let sentence = p.input.strip_suffix(&suffix).ok_or_else(|| format!("input {:?} lacks {suffix:?}", p.input))?;
        let r = Recoverer::new(p.task, &vocab, &mode).strict(true).recover(&p.target, sentence);
        ensure(
            r.failures.is_empty() && !r.quads.is_empty(),
            format!("target {:?} does not parse as {}", p.target, p.task),
        )?;
    }
    within(start.elapsed(), 2.0)?;
    Ok(format!(
        "642 pairs (500 aste + 100 tasd + 42 asqp), all suffixed and parsing, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn error_taxonomy() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let vocab = ["food quality", "service general", "ambience general"];
    fs::write(tmp.path().join("vocab.txt"), vocab.join("\n")).map_err(|e| e.to_string())?;
    let gold = [
        r#"{"sentence": "the pasta is over-cooked", "quads": [{"category": "food quality", "aspect": "pasta", "opinion": "over-cooked", "polarity": "negative"}], "task": "asqp"}"#,
        r#"{"sentence": "the waiter was rude", "quads": [{"category": "service general", "aspect": "waiter", "opinion": "rude", "polarity": "negative"}], "task": "asqp"}"#,
        r#"{"sentence": "lovely decor", "quads": [{"category": "ambience general", "aspect": "decor", "opinion": "lovely", "polarity": "positive"}], "task": "asqp"}"#,
        r#"{"sentence": "the sushi was fresh", "quads": [{"category": "food quality", "aspect": "sushi", "opinion": "fresh", "polarity": "positive"}], "task": "asqp"}"#,
    ];
    fs::write(tmp.path().join("gold.jsonl"), gold.join("\n")).map_err(|e| e.to_string())?;
    let run = |pred: &[&str], extra: &[&str]| -> Result<Value, String> {
        fs::write(tmp.path().join("pred.txt"), pred.join("\n") + "\n").map_err(|e| e.to_string())?;
        let mut args = vec!["analyze-errors", "--pred", "pred.txt", "--gold", "gold.jsonl", "--vocab", "vocab.txt"];
        args.extend_from_slice(extra);
        let out = Command::new(env!("CARGO_BIN_EXE_asqp"))
            .current_dir(tmp.path())
            .args(&args)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), String::from_utf8_lossy(&out.stderr).into_owned())?;
        let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        Ok(v["breakdown"].clone())
    };
    let expect = |b: &Value, what: &str| -> Result<(), String> {
        let got = ["opinion_term", "category", "polarity", "generation", "aspect_term"]
            .map(|k| b[k].as_u64().unwrap_or(u64::MAX));
        ensure(got == [1, 1, 1, 1, 0], format!("{what}: opinion/category/polarity/generation/aspect = {got:?}"))
    };
    let base = [
        // span boundary: "cooked" instead of "over-cooked"
        "food quality is bad because pasta is cooked",
        // category confusion
        "food quality is bad because waiter is rude",
        // polarity flip
        "ambience general is bad because decor is lovely",
    ];
    // out-of-vocabulary category, counted only as a generation error
    let mut exclusive = base.to_vec();
    exclusive.push("food freshness is great because sushi is fresh");
    let b = run(&exclusive, &["--exclusive-generation"])?;
    expect(&b, "exclusive, unknown category")?;
    // a word absent from the sentence, under the default overlapping counting
    let mut overlapping = base.to_vec();
    overlapping.push("food quality is great because sushi is tasty");
    let b2 = run(&overlapping, &[])?;
    ensure(b2["counting"] == "overlapping", "default counting is not overlapping")?;
    let got = ["opinion_term", "category", "polarity", "generation"].map(|k| b2[k].as_u64().unwrap_or(u64::MAX));
    ensure(
        got == [2, 1, 1, 1],
        format!("overlapping, hallucinated opinion: opinion/category/polarity/generation = {got:?}"),
    )?;
    Ok("opinion=1 category=1 polarity=1 generation=1 (exclusive counting); overlapping counts also as expected".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("published target strings", published_strings),
        ("roundtrip", roundtrip),
        ("oracle F1", oracle_f1),
        ("analytic corruption curve", corruption_curve),
        ("scorer oracle equivalence", scorer_oracle),
        ("dataset statistics", dataset_statistics),
        ("transfer-mix integrity", transfer_mix),
        ("error-taxonomy smoke", error_taxonomy),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
