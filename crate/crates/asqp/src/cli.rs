//! The `asqp` command line.
//!
//! Reports go to `--output` (or stdout) as JSON; human-readable tables and
//! warnings go to stderr. Exit status is 0 on success, 2 on a usage error
//! and 1 on any data or IO error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Duration;

use asqp_core::backend::{ElementWeights, PerturbConfig};
use asqp_core::dataset::{
    compute_stats, derive_polarity_lexicon, merge_annotations, mix_tasks, sample_count, sample_fraction,
    split_train_dev, DatasetStats,
};
use asqp_core::delimited::TupleOrder;
use asqp_core::eval::GenerationCounting;
use asqp_core::linearize::{ModeKind, PolarityLexicon, ProjectionMode};
use asqp_core::recover::RecoveryResult;
use asqp_core::{CategoryVocab, Example, Split, Task};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::backend::{AnyBackend, BackendKind, BackendSpec};
use crate::config::FileConfig;
use crate::http::{HttpConfig, ENDPOINT_ENV};
use crate::io::{self, Prediction};
use crate::pipeline::{self, Evaluation, Pair};
use crate::records::{
    BreakdownRecord, ConflictRecord, ExampleDiagnosticRecord, PairRecord, QuadErrorRecord, QuadRecord, RecoveryRecord,
    ScoreRecord,
};
use crate::report::{
    self, AnalyzeReport, DatasetStatsRecord, E2eReport, EvaluateReport, PerturbSettings, RecoverySummary, StatsReport,
};
use crate::{Error, Result};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "asqp",
    version,
    about = "Aspect sentiment quad prediction: targets, recovery, scoring and data tools"
)]
struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random choice [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for one per core [default: 0].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModeArgs {
    /// Task to read the data as (examples of another task are projected).
    #[arg(long)]
    task: Option<Task>,
    /// Target projection: natural, symbolic-polarity, symbolic-category, symbolic-both or plain-tuple.
    #[arg(long)]
    mode: Option<ModeKind>,
    /// Category vocabulary, one per line. Required by the symbolic modes;
    /// otherwise derived from the data in order of first appearance.
    #[arg(long, value_name = "FILE")]
    vocab: Option<PathBuf>,
    /// Polarity words as `positive,neutral,negative`, or `derive` to use the
    /// most frequent opinion per polarity in the data [default: great,ok,bad].
    #[arg(long)]
    lexicon: Option<String>,
    /// Reject recovered quads that fail any validity check.
    #[arg(long)]
    strict: bool,
    /// Append the task token to every input.
    #[arg(long)]
    transfer_suffix: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum PairFormat {
    #[default]
    Tsv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write model input/target pairs for a dataset.
    BuildTargets {
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: PairFormat,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Recover quads from generated sequences.
    Parse {
        /// Generations: plain text, JSON strings or `{"output": ...}` lines.
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        /// Gold examples aligned with the generations, for sentences and tasks.
        #[arg(long, value_name = "FILE")]
        gold: Option<PathBuf>,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Score predictions against gold examples.
    Evaluate {
        /// Predictions aligned with the gold file: raw generations, `parse` output or examples.
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Score predictions and break the wrong ones down by error type.
    AnalyzeErrors {
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Count a prediction with a generation error only as a generation error.
        #[arg(long)]
        exclusive_generation: bool,
        /// Length of the worst-cases listing.
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Draw the worst cases from a seeded sample of this many erroneous examples.
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Convert `sentence####[tuples]` files to JSONL.
    Import {
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, default_value = "asqp")]
        task: Task,
        /// Tuple element order, e.g. `a,c,p,o` [default depends on the task].
        #[arg(long)]
        order: Option<String>,
        #[arg(long, default_value = "train")]
        split: Split,
    },
    /// Join (aspect, opinion, polarity) and (category, aspect, polarity) annotations into quads.
    Merge {
        #[arg(long, value_name = "FILE")]
        opinion: PathBuf,
        #[arg(long, value_name = "FILE")]
        category: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Where to write the conflicting anchors as JSONL.
        #[arg(long, value_name = "FILE")]
        conflicts: Option<PathBuf>,
    },
    /// Seeded train/dev partition.
    Split {
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        dev_ratio: Option<f64>,
        #[arg(long, value_name = "FILE")]
        train_out: PathBuf,
        #[arg(long, value_name = "FILE")]
        dev_out: PathBuf,
    },
    /// Sentence and polarity counts per split.
    Stats {
        /// `NAME=FILE` or `FILE` (named after the file stem); files sharing a name are pooled.
        #[arg(required = true, value_name = "DATASET")]
        datasets: Vec<String>,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Seeded random subset.
    Sample {
        #[arg(long, short, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, conflicts_with = "count", required_unless_present = "count")]
        ratio: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Shuffle several task datasets into one training set with task suffixes.
    TransferMix {
        /// `TASK=FILE`, repeatable.
        #[arg(long = "data", required = true, value_name = "TASK=FILE")]
        data: Vec<String>,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: PairFormat,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Generate, recover and score a gold dataset with a backend.
    E2e {
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Raw generations, one JSON string per line.
        #[arg(long, value_name = "FILE")]
        generations: Option<PathBuf>,
        /// oracle, perturb or http [default: oracle].
        #[arg(long)]
        backend: Option<BackendKind>,
        /// Corruption probability per quad (perturb backend).
        #[arg(long)]
        rho: Option<f64>,
        /// Corruption weights as `category,aspect,opinion,polarity` [default: equal].
        #[arg(long)]
        weights: Option<String>,
        /// Base URL of the generation server (http backend).
        #[arg(long, env = ENDPOINT_ENV)]
        endpoint: Option<String>,
        #[arg(long)]
        max_batch: Option<usize>,
        #[arg(long)]
        retries: Option<usize>,
        #[arg(long)]
        backoff_ms: Option<u64>,
        #[arg(long)]
        timeout_secs: Option<u64>,
        #[arg(long)]
        max_in_flight: Option<usize>,
        #[arg(long)]
        exclusive_generation: bool,
        #[command(flatten)]
        mode: ModeArgs,
    },
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("asqp: error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        jobs: cli.jobs.or(file.jobs).unwrap_or(0),
        file,
    };
    let jobs = ctx.jobs;
    pipeline::with_jobs(jobs, move || ctx.dispatch(cli.command))?
}

struct Context {
    seed: u64,
    jobs: usize,
    file: FileConfig,
}

/// [`ModeArgs`] after merging with the config file.
struct Resolved {
    task: Option<Task>,
    mode: ProjectionMode,
    vocab: CategoryVocab,
    strict: bool,
    transfer_suffix: bool,
}

fn parse_file_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Error::Config(format!("{key}: {e}")))
}

impl Context {
    fn dispatch(&self, command: Command) -> Result<()> {
        match command {
            Command::BuildTargets { input, output, format, mode } => {
                self.build_targets(&input, output.as_deref(), format, &mode)
            }
            Command::Parse { input, gold, output, mode } => {
                self.parse(&input, gold.as_deref(), output.as_deref(), &mode)
            }
            Command::Evaluate { pred, gold, output, mode } => self.evaluate(&pred, &gold, output.as_deref(), &mode),
            Command::AnalyzeErrors { pred, gold, output, exclusive_generation, top, sample, mode } => {
                self.analyze(&pred, &gold, output.as_deref(), exclusive_generation, top, sample, &mode)
            }
            Command::Import { input, output, task, order, split } => {
                self.import(&input, output.as_deref(), task, order, split)
            }
            Command::Merge { opinion, category, output, conflicts } => {
                self.merge(&opinion, &category, output.as_deref(), conflicts.as_deref())
            }
            Command::Split { input, dev_ratio, train_out, dev_out } => {
                self.split(&input, dev_ratio, &train_out, &dev_out)
            }
            Command::Stats { datasets, output } => self.stats(&datasets, output.as_deref()),
            Command::Sample { input, output, ratio, count } => self.sample(&input, output.as_deref(), ratio, count),
            Command::TransferMix { data, output, format, mode } => {
                self.transfer_mix(&data, output.as_deref(), format, &mode)
            }
            Command::E2e {
                gold,
                output,
                generations,
                backend,
                rho,
                weights,
                endpoint,
                max_batch,
                retries,
                backoff_ms,
                timeout_secs,
                max_in_flight,
                exclusive_generation,
                mode,
            } => {
                let http = HttpFlags { endpoint, max_batch, retries, backoff_ms, timeout_secs, max_in_flight };
                self.e2e(
                    &gold,
                    output.as_deref(),
                    generations.as_deref(),
                    backend,
                    rho,
                    weights,
                    http,
                    exclusive_generation,
                    &mode,
                )
            }
        }
    }

    fn resolve(&self, args: &ModeArgs, data: &[Example]) -> Result<Resolved> {
        let file = &self.file;
        let task = match args.task {
            Some(t) => Some(t),
            None => file.task.as_deref().map(|t| parse_file_value("task", t)).transpose()?,
        };
        let kind = match args.mode {
            Some(m) => m,
            None => file.mode.as_deref().map(|m| parse_file_value("mode", m)).transpose()?.unwrap_or(ModeKind::Natural),
        };
        let vocab = match args.vocab.as_ref().or(file.vocab.as_ref()) {
            Some(path) => io::read_vocab(path)?,
            None if kind.is_symbolic() => {
                return Err(Error::Usage(format!("--mode {kind} needs a category vocabulary (--vocab)")))
            }
            None => CategoryVocab::from_examples(data),
        };
        let lexicon = match args.lexicon.as_deref().or(file.lexicon.as_deref()) {
            None => PolarityLexicon::default(),
            Some("derive") => derive_polarity_lexicon(data)?,
            Some(words) => {
                let w: Vec<&str> = words.split(',').map(str::trim).collect();
                match w.as_slice() {
                    [pos, neu, neg] => PolarityLexicon::new(pos, neu, neg)?,
                    _ => {
                        return Err(Error::Usage(format!("--lexicon needs three comma-separated words, got {words:?}")))
                    }
                }
            }
        };
        Ok(Resolved {
            task,
            mode: ProjectionMode::new(kind).with_lexicon(lexicon),
            vocab,
            strict: args.strict || file.strict.unwrap_or(false),
            transfer_suffix: args.transfer_suffix || file.transfer_suffix.unwrap_or(false),
        })
    }

    fn build_targets(&self, input: &Path, output: Option<&Path>, format: PairFormat, args: &ModeArgs) -> Result<()> {
        let examples = io::read_examples(input)?;
        let r = self.resolve(args, &examples)?;
        let examples = project_all(examples, r.task);
        let pairs = pipeline::build_pairs(&examples, &r.mode, &r.vocab, r.transfer_suffix)?;
        let tasks: Vec<Task> = examples.iter().map(Example::task).collect();
        io::write_output(output, &render_pairs(&pairs, &tasks, format))?;
        eprintln!("{} pairs", pairs.len());
        Ok(())
    }

    fn parse(&self, input: &Path, gold: Option<&Path>, output: Option<&Path>, args: &ModeArgs) -> Result<()> {
        let texts: Vec<String> = io::read_predictions(input)?
            .into_iter()
            .enumerate()
            .map(|(i, p)| match p {
                Prediction::Text(t) => Ok(t),
                _ => Err(Error::Data(format!("{}:{}: expected a generated sequence", input.display(), i + 1))),
            })
            .collect::<Result<_>>()?;
        let golds = match gold {
            Some(path) => io::read_examples(path)?,
            None => Vec::new(),
        };
        let r = self.resolve(args, &golds)?;
        let examples = if gold.is_some() {
            project_all(golds, r.task)
        } else {
            // without gold there is no sentence, so span checks cannot pass
            let task = r.task.unwrap_or(Task::Asqp);
            let placeholder = Example::new("-", Vec::new(), task, Split::Train)?;
            vec![placeholder; texts.len()]
        };
        let results = pipeline::recover_all(&texts, &examples, &r.vocab, &r.mode, r.strict)?;
        let mut out = String::new();
        for res in &results {
            out.push_str(&serde_json::to_string(&RecoveryRecord::from(res)).expect("serializable record"));
            out.push('\n');
        }
        io::write_output(output, &out)?;
        let summary = recovery_summary(&results);
        eprintln!(
            "{} lines, {} segments, {} quads, {} failures, {} ambiguous",
            texts.len(),
            summary.segments,
            results.iter().map(|r| r.quads.len()).sum::<usize>(),
            summary.failures,
            summary.ambiguous_splits
        );
        Ok(())
    }

    fn load_scored(&self, pred: &Path, gold: &Path, args: &ModeArgs, counting: GenerationCounting) -> Result<Scored> {
        let golds = io::read_examples(gold)?;
        let r = self.resolve(args, &golds)?;
        let golds = project_all(golds, r.task);
        let preds = io::read_predictions(pred)?;
        let resolved = pipeline::resolve_predictions(&preds, &golds, &r.vocab, &r.mode, r.strict)?;
        let evaluation = pipeline::evaluate(&resolved.quads, &golds, counting)?;
        let recovery = (!resolved.recovered.is_empty()).then(|| {
            let results: Vec<RecoveryResult> = resolved.recovered.values().cloned().collect();
            recovery_summary(&results)
        });
        Ok(Scored { golds, evaluation, recovery })
    }

    fn evaluate(&self, pred: &Path, gold: &Path, output: Option<&Path>, args: &ModeArgs) -> Result<()> {
        let scored = self.load_scored(pred, gold, args, GenerationCounting::Overlapping)?;
        let score = ScoreRecord::from(scored.evaluation.score);
        let rep = EvaluateReport { n_examples: scored.golds.len(), score, recovery: scored.recovery };
        io::write_output(output, &report::to_json(&rep))?;
        eprint!("{}", report::score_table(&score));
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn analyze(
        &self,
        pred: &Path,
        gold: &Path,
        output: Option<&Path>,
        exclusive: bool,
        top: usize,
        sample: Option<usize>,
        args: &ModeArgs,
    ) -> Result<()> {
        let counting = counting(exclusive || self.file.exclusive_generation.unwrap_or(false));
        let scored = self.load_scored(pred, gold, args, counting)?;
        let analysis = &scored.evaluation.analysis;
        let per_example: Vec<ExampleDiagnosticRecord> = analysis
            .per_example
            .iter()
            .enumerate()
            .filter(|(_, errors)| !errors.is_empty())
            .map(|(i, errors)| ExampleDiagnosticRecord {
                index: i,
                sentence: scored.golds[i].sentence().into(),
                gold: scored.golds[i].quads().iter().map(QuadRecord::from).collect(),
                errors: errors.iter().map(QuadErrorRecord::from).collect(),
            })
            .collect();
        let mut pool = per_example.clone();
        if let Some(n) = sample {
            pool.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
            pool.truncate(n);
        }
        // stable: ties keep input order
        pool.sort_by_key(|d| (std::cmp::Reverse(d.errors.len()), d.index));
        pool.truncate(top);
        let score = ScoreRecord::from(scored.evaluation.score);
        let breakdown = BreakdownRecord::new(analysis.breakdown, counting);
        let rep = AnalyzeReport { n_examples: scored.golds.len(), score, breakdown, per_example, worst_cases: pool };
        io::write_output(output, &report::to_json(&rep))?;
        eprint!("{}{}", report::score_table(&score), report::breakdown_table(&rep.breakdown));
        Ok(())
    }

    fn import(
        &self,
        input: &Path,
        output: Option<&Path>,
        task: Task,
        order: Option<String>,
        split: Split,
    ) -> Result<()> {
        let order = match order.or_else(|| self.file.order.clone()) {
            Some(o) => o.parse::<TupleOrder>().map_err(|e| Error::Usage(format!("--order: {e}")))?,
            None => TupleOrder::default_for(task),
        };
        order.check(task).map_err(|e| Error::Usage(format!("--order: {e}")))?;
        let examples = io::read_delimited(input, task, &order, split)?;
        io::write_examples(output, &examples)?;
        eprintln!("{} examples", examples.len());
        Ok(())
    }

    fn merge(
        &self,
        opinion: &Path,
        category: &Path,
        output: Option<&Path>,
        conflicts_out: Option<&Path>,
    ) -> Result<()> {
        let (merged, conflicts) = merge_annotations(&io::read_examples(opinion)?, &io::read_examples(category)?);
        io::write_examples(output, &merged)?;
        if let Some(path) = conflicts_out {
            let mut out = String::new();
            for c in &conflicts {
                out.push_str(&serde_json::to_string(&ConflictRecord::from(c)).expect("serializable record"));
                out.push('\n');
            }
            io::write_output(Some(path), &out)?;
        }
        eprintln!("{} merged examples, {} conflicting anchors", merged.len(), conflicts.len());
        Ok(())
    }

    fn split(&self, input: &Path, dev_ratio: Option<f64>, train_out: &Path, dev_out: &Path) -> Result<()> {
        let ratio = dev_ratio.or(self.file.dev_ratio).unwrap_or(0.2);
        let (train, dev) = split_train_dev(&io::read_examples(input)?, ratio, self.seed)?;
        io::write_examples(Some(train_out), &train)?;
        io::write_examples(Some(dev_out), &dev)?;
        eprintln!("train {} / dev {}", train.len(), dev.len());
        Ok(())
    }

    fn stats(&self, specs: &[String], output: Option<&Path>) -> Result<()> {
        let mut order: Vec<String> = Vec::new();
        let mut pooled: BTreeMap<String, Vec<Example>> = BTreeMap::new();
        for spec in specs {
            let (name, path) = match spec.split_once('=') {
                Some((name, path)) => (name.to_string(), PathBuf::from(path)),
                None => {
                    let path = PathBuf::from(spec);
                    let stem =
                        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.clone());
                    (stem, path)
                }
            };
            let examples = io::read_examples(&path)?;
            if !pooled.contains_key(&name) {
                order.push(name.clone());
            }
            pooled.entry(name).or_default().extend(examples);
        }
        let stats: Vec<(String, DatasetStats)> = order
            .into_iter()
            .map(|name| {
                let s = compute_stats(&pooled[&name]);
                (name, s)
            })
            .collect();
        let rep = StatsReport { datasets: stats.iter().map(|(n, s)| DatasetStatsRecord::new(n, s)).collect() };
        io::write_output(output, &report::to_json(&rep))?;
        eprint!("{}", report::stats_table(&stats));
        Ok(())
    }

    fn sample(&self, input: &Path, output: Option<&Path>, ratio: Option<f64>, count: Option<usize>) -> Result<()> {
        let examples = io::read_examples(input)?;
        let sampled = match (ratio, count) {
            (Some(r), None) => sample_fraction(&examples, r, self.seed)?,
            (None, Some(n)) => sample_count(&examples, n, self.seed)?,
            _ => return Err(Error::Usage("give exactly one of --ratio and --count".into())),
        };
        io::write_examples(output, &sampled)?;
        eprintln!("{} of {} examples", sampled.len(), examples.len());
        Ok(())
    }

    fn transfer_mix(&self, data: &[String], output: Option<&Path>, format: PairFormat, args: &ModeArgs) -> Result<()> {
        let mut sets: Vec<(Vec<Example>, Task)> = Vec::new();
        for spec in data {
            let (task, path) =
                spec.split_once('=').ok_or_else(|| Error::Usage(format!("--data expects TASK=FILE, got {spec:?}")))?;
            let task: Task = task.parse().map_err(|e| Error::Usage(format!("--data {spec:?}: {e}")))?;
            sets.push((io::read_examples(Path::new(path))?, task));
        }
        let all: Vec<Example> = sets.iter().flat_map(|(d, _)| d.iter().cloned()).collect();
        let r = self.resolve(args, &all)?;
        let borrowed: Vec<(&[Example], Task)> = sets.iter().map(|(d, t)| (d.as_slice(), *t)).collect();
        let mixed = mix_tasks(&borrowed, &r.mode, &r.vocab, self.seed)?;
        let tasks: Vec<Task> = mixed.iter().map(|p| p.task).collect();
        let pairs: Vec<Pair> = mixed.into_iter().map(|p| Pair { input: p.input, target: p.target }).collect();
        io::write_output(output, &render_pairs(&pairs, &tasks, format))?;
        eprintln!("{} pairs", pairs.len());
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn e2e(
        &self,
        gold: &Path,
        output: Option<&Path>,
        generations: Option<&Path>,
        backend: Option<BackendKind>,
        rho: Option<f64>,
        weights: Option<String>,
        http: HttpFlags,
        exclusive: bool,
        args: &ModeArgs,
    ) -> Result<()> {
        let file = &self.file;
        let golds = io::read_examples(gold)?;
        let r = self.resolve(args, &golds)?;
        let golds = project_all(golds, r.task);
        let kind = match backend {
            Some(b) => b,
            None => file.backend.as_deref().map(str::parse).transpose()?.unwrap_or_default(),
        };
        let rho = rho.or(file.rho);
        if kind == BackendKind::Perturb && rho.is_none() {
            return Err(Error::Usage("the perturb backend needs --rho".into()));
        }
        let weights = match weights.or_else(|| file.weights.clone()) {
            Some(w) => parse_weights(&w)?,
            None => ElementWeights::default(),
        };
        let perturb = PerturbConfig::new(rho.unwrap_or(0.0), self.seed, weights)?;
        let http = http.resolve(file);
        let spec = BackendSpec {
            kind,
            golds: &golds,
            mode: &r.mode,
            vocab: &r.vocab,
            transfer_suffix: r.transfer_suffix,
            perturb,
            http,
        };
        let backend = AnyBackend::build(&spec)?;
        let counting = counting(exclusive || file.exclusive_generation.unwrap_or(false));
        let outcome = pipeline::e2e(&golds, &backend, &r.mode, &r.vocab, r.transfer_suffix, r.strict, counting)?;
        if let Some(path) = generations {
            let mut out = String::new();
            for line in &outcome.outputs {
                out.push_str(&serde_json::to_string(line).expect("serializable string"));
                out.push('\n');
            }
            io::write_output(Some(path), &out)?;
        }
        let score = ScoreRecord::from(outcome.evaluation.score);
        let breakdown = BreakdownRecord::new(outcome.evaluation.analysis.breakdown, counting);
        let rep = E2eReport {
            backend: kind.as_str().into(),
            mode: r.mode.kind().as_str().into(),
            strict: r.strict,
            transfer_suffix: r.transfer_suffix,
            perturb: (kind == BackendKind::Perturb)
                .then(|| PerturbSettings { rho: perturb.rho(), seed: perturb.seed() }),
            n_examples: golds.len(),
            score,
            recovery: recovery_summary(&outcome.recovered),
            breakdown,
        };
        io::write_output(output, &report::to_json(&rep))?;
        eprint!("{}{}", report::score_table(&score), report::breakdown_table(&rep.breakdown));
        Ok(())
    }
}

struct Scored {
    golds: Vec<Example>,
    evaluation: Evaluation,
    recovery: Option<RecoverySummary>,
}

struct HttpFlags {
    endpoint: Option<String>,
    max_batch: Option<usize>,
    retries: Option<usize>,
    backoff_ms: Option<u64>,
    timeout_secs: Option<u64>,
    max_in_flight: Option<usize>,
}

impl HttpFlags {
    /// `None` when no endpoint is configured anywhere.
    fn resolve(self, file: &FileConfig) -> Option<HttpConfig> {
        let endpoint = self.endpoint.or_else(|| file.endpoint.clone())?;
        let mut cfg = HttpConfig::new(endpoint);
        if let Some(n) = self.max_batch.or(file.max_batch) {
            cfg.max_batch = n;
        }
        if let Some(n) = self.retries.or(file.retries) {
            cfg.retries = n;
        }
        if let Some(ms) = self.backoff_ms.or(file.backoff_ms) {
            cfg.backoff = Duration::from_millis(ms);
        }
        if let Some(s) = self.timeout_secs.or(file.timeout_secs) {
            cfg.timeout = Duration::from_secs(s);
        }
        if let Some(n) = self.max_in_flight.or(file.max_in_flight) {
            cfg.max_in_flight = n;
        }
        Some(cfg)
    }
}

fn counting(exclusive: bool) -> GenerationCounting {
    if exclusive {
        GenerationCounting::Exclusive
    } else {
        GenerationCounting::Overlapping
    }
}

fn project_all(examples: Vec<Example>, task: Option<Task>) -> Vec<Example> {
    match task {
        Some(t) => examples.into_iter().map(|e| if e.task() == t { e } else { e.project(t) }).collect(),
        None => examples,
    }
}

fn parse_weights(s: &str) -> Result<ElementWeights> {
    let w: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Usage(format!("--weights {s:?}: {e}")))?;
    match w.as_slice() {
        [category, aspect, opinion, polarity] => {
            Ok(ElementWeights { category: *category, aspect: *aspect, opinion: *opinion, polarity: *polarity })
        }
        _ => Err(Error::Usage(format!("--weights needs four numbers (category,aspect,opinion,polarity), got {s:?}"))),
    }
}

fn recovery_summary(results: &[RecoveryResult]) -> RecoverySummary {
    RecoverySummary {
        segments: results.iter().map(RecoveryResult::segment_count).sum(),
        failures: results.iter().map(|r| r.failures.len()).sum(),
        ambiguous_splits: results.iter().map(|r| r.ambiguous_splits).sum(),
        duplicates: results.iter().map(|r| r.duplicates).sum(),
    }
}

fn render_pairs(pairs: &[Pair], tasks: &[Task], format: PairFormat) -> String {
    let mut out = String::new();
    for (p, task) in pairs.iter().zip(tasks) {
        match format {
            // canonical text has no tabs or newlines
            PairFormat::Tsv => {
                out.push_str(&p.input);
                out.push('\t');
                out.push_str(&p.target);
            }
            PairFormat::Jsonl => {
                let rec = PairRecord { input: p.input.clone(), target: p.target.clone(), task: task.as_str().into() };
                out.push_str(&serde_json::to_string(&rec).expect("serializable record"));
            }
        }
        out.push('\n');
    }
    out
}
