use std::fs;
use std::io::Write;
use std::path::Path;

use asqp_core::delimited::{parse_line, TupleOrder};
use asqp_core::recover::ParsedQuad;
use asqp_core::{CategoryVocab, Example, Split, Task};
use serde_json::Value;

use crate::records::{ExampleRecord, RecoveryRecord};
use crate::{Error, Result};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes()).and_then(|()| out.flush()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Non-blank lines with their 1-based line numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty())
}

pub fn parse_example_line(path: &Path, line_no: usize, line: &str) -> Result<Example> {
    let record: ExampleRecord = serde_json::from_str(line).map_err(|source| Error::MalformedLine {
        path: path.into(),
        line: line_no,
        source,
    })?;
    record.to_example().map_err(|source| Error::Schema { path: path.into(), line: line_no, source })
}

/// Reads the canonical JSONL example format.
pub fn read_examples(path: &Path) -> Result<Vec<Example>> {
    let text = read_to_string(path)?;
    numbered_lines(&text).map(|(n, line)| parse_example_line(path, n, line)).collect()
}

pub fn examples_to_jsonl(examples: &[Example]) -> String {
    let mut out = String::new();
    for ex in examples {
        // records hold only strings and sequences, serialization cannot fail
        out.push_str(&serde_json::to_string(&ExampleRecord::from(ex)).expect("serializable record"));
        out.push('\n');
    }
    out
}

pub fn write_examples(path: Option<&Path>, examples: &[Example]) -> Result<()> {
    write_output(path, &examples_to_jsonl(examples))
}

/// One category per line, order significant.
pub fn read_vocab(path: &Path) -> Result<CategoryVocab> {
    Ok(CategoryVocab::from_lines(&read_to_string(path)?)?)
}

/// Reads `<sentence>####<tuple list>` lines.
pub fn read_delimited(path: &Path, task: Task, order: &TupleOrder, split: Split) -> Result<Vec<Example>> {
    let text = read_to_string(path)?;
    numbered_lines(&text)
        .map(|(n, line)| {
            parse_line(line, task, order, split).map_err(|source| Error::Schema { path: path.into(), line: n, source })
        })
        .collect()
}

/// A line of a prediction file.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    /// Raw generated text still to be parsed.
    Text(String),
    /// A structured prediction in the example format.
    Example(Example),
    /// Output of the `parse` subcommand.
    Recovered(Vec<ParsedQuad>),
}

/// Reads predictions, one per line. Accepted line shapes: example JSON,
/// `parse` output JSON, `{"output": "..."}`, a JSON string, or plain text.
/// Every line counts, so a blank line is an empty generation.
pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let text = read_to_string(path)?;
    text.lines().enumerate().map(|(i, line)| parse_prediction_line(path, i + 1, line)).collect()
}

fn parse_prediction_line(path: &Path, line_no: usize, line: &str) -> Result<Prediction> {
    let schema = |source| Error::Schema { path: path.into(), line: line_no, source };
    let malformed = |source| Error::MalformedLine { path: path.into(), line: line_no, source };
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) if map.contains_key("sentence") => {
            let record: ExampleRecord = serde_json::from_value(Value::Object(map)).map_err(malformed)?;
            Ok(Prediction::Example(record.to_example().map_err(schema)?))
        }
        Ok(Value::Object(map)) if map.contains_key("failures") => {
            let record: RecoveryRecord = serde_json::from_value(Value::Object(map)).map_err(malformed)?;
            let quads = record.quads.iter().map(|q| q.to_parsed()).collect::<Result<_, _>>().map_err(schema)?;
            Ok(Prediction::Recovered(quads))
        }
        Ok(Value::Object(map)) => match map.get("output") {
            Some(Value::String(s)) => Ok(Prediction::Text(s.clone())),
            _ => Err(Error::Data(format!(
                "{}:{line_no}: prediction object needs \"sentence\", \"failures\" or \"output\"",
                path.display()
            ))),
        },
        Ok(Value::String(s)) => Ok(Prediction::Text(s)),
        _ => Ok(Prediction::Text(line.to_string())),
    }
}
