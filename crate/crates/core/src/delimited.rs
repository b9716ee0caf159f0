//! Parser for the `<sentence>####<tuple list>` annotation lines commonly
//! used to distribute ABSA datasets, e.g.
//!
//! ```text
//! The pasta is over-cooked!####[['pasta', 'food quality', 'negative', 'over-cooked']]
//! ```
//!
//! The tuple list is a Python literal: a list of lists or tuples of quoted
//! strings. Element order differs between releases, so it is configurable.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{CoreError, Result};
use crate::text::canonicalize;
use crate::types::{AspectTerm, Example, Polarity, SentimentQuad, Split, Task};

const DELIMITER: &str = "####";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    Category,
    Aspect,
    Opinion,
    Polarity,
}

/// Position of each sentiment element inside an annotated tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleOrder(Vec<Element>);

impl TupleOrder {
    /// `[aspect, category, polarity, opinion]` for ASQP, `[aspect, opinion,
    /// polarity]` for ASTE and `[aspect, category, polarity]` for TASD.
    pub fn default_for(task: Task) -> Self {
        use Element::*;
        TupleOrder(match task {
            Task::Asqp => alloc::vec![Aspect, Category, Polarity, Opinion],
            Task::Aste => alloc::vec![Aspect, Opinion, Polarity],
            Task::Tasd => alloc::vec![Aspect, Category, Polarity],
        })
    }

    pub fn elements(&self) -> &[Element] {
        &self.0
    }

    /// Checks that the order names exactly the elements `task` predicts.
    pub fn check(&self, task: Task) -> Result<()> {
        let mut expected = TupleOrder::default_for(task).0;
        for e in &self.0 {
            match expected.iter().position(|x| x == e) {
                Some(i) => {
                    expected.remove(i);
                }
                None => {
                    return Err(CoreError::Unparseable {
                        reason: format!("element {e:?} repeated or not part of {task}"),
                    })
                }
            }
        }
        if let Some(e) = expected.first() {
            return Err(CoreError::Unparseable { reason: format!("tuple order is missing {e:?}") });
        }
        Ok(())
    }
}

impl FromStr for TupleOrder {
    type Err = CoreError;

    /// Comma-separated element names or initials, e.g. `a,c,p,o`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|name| match canonicalize(name).as_str() {
                "c" | "category" => Ok(Element::Category),
                "a" | "aspect" => Ok(Element::Aspect),
                "o" | "opinion" => Ok(Element::Opinion),
                "p" | "s" | "polarity" | "sentiment" => Ok(Element::Polarity),
                other => Err(CoreError::Unparseable { reason: format!("unknown tuple element {other:?}") }),
            })
            .collect::<Result<Vec<_>>>()
            .map(TupleOrder)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Literal {
    Str(String),
    Seq(Vec<Literal>),
    None,
}

struct LiteralParser<'a> {
    rest: &'a str,
}

impl<'a> LiteralParser<'a> {
    fn err<T>(&self, what: &str) -> Result<T> {
        let near: String = self.rest.chars().take(20).collect();
        Err(CoreError::Unparseable { reason: format!("{what} near {near:?}") })
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        match self.rest.strip_prefix(c) {
            Some(r) => {
                self.rest = r;
                true
            }
            None => false,
        }
    }

    fn value(&mut self) -> Result<Literal> {
        self.skip_ws();
        match self.rest.chars().next() {
            Some('[') => self.seq('[', ']'),
            Some('(') => self.seq('(', ')'),
            Some(q @ ('\'' | '"')) => self.string(q),
            _ if self.rest.starts_with("None") => {
                self.rest = &self.rest[4..];
                Ok(Literal::None)
            }
            _ => self.err("expected a list, tuple or string"),
        }
    }

    fn seq(&mut self, open: char, close: char) -> Result<Literal> {
        self.eat(open);
        let mut items = Vec::new();
        loop {
            if self.eat(close) {
                return Ok(Literal::Seq(items));
            }
            items.push(self.value()?);
            if !self.eat(',') {
                if self.eat(close) {
                    return Ok(Literal::Seq(items));
                }
                return self.err("expected ',' or closing bracket");
            }
        }
    }

    fn string(&mut self, quote: char) -> Result<Literal> {
        let mut out = String::new();
        let mut chars = self.rest[1..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, 't')) => out.push('\t'),
                    Some((_, e)) => out.push(e),
                    None => break,
                },
                c if c == quote => {
                    self.rest = &self.rest[1 + i + c.len_utf8()..];
                    return Ok(Literal::Str(out));
                }
                c => out.push(c),
            }
        }
        self.err("unterminated string")
    }
}

fn parse_tuple_list(text: &str) -> Result<Vec<Vec<Option<String>>>> {
    let mut parser = LiteralParser { rest: text };
    let value = parser.value()?;
    parser.skip_ws();
    if !parser.rest.is_empty() {
        return parser.err("trailing input");
    }
    let Literal::Seq(tuples) = value else {
        return Err(CoreError::Unparseable { reason: "annotation is not a list".into() });
    };
    tuples
        .into_iter()
        .map(|t| match t {
            Literal::Seq(items) => items
                .into_iter()
                .map(|item| match item {
                    Literal::Str(s) => Ok(Some(s)),
                    Literal::None => Ok(None),
                    Literal::Seq(_) => Err(CoreError::Unparseable { reason: "nested tuple element".into() }),
                })
                .collect(),
            _ => Err(CoreError::Unparseable { reason: "annotation entry is not a tuple".into() }),
        })
        .collect()
}

fn is_null(v: &Option<String>) -> bool {
    v.as_deref().is_none_or(|s| s.trim().eq_ignore_ascii_case("null") || s.trim().is_empty())
}

/// Category labels such as `FOOD#QUALITY` or `food_quality` become `food quality`.
fn category_name(raw: &str) -> String {
    canonicalize(&raw.replace(['#', '_'], " "))
}

/// Parses one annotation line into an example for `task`.
pub fn parse_line(line: &str, task: Task, order: &TupleOrder, split: Split) -> Result<Example> {
    order.check(task)?;
    let (sentence, annotation) = line
        .split_once(DELIMITER)
        .ok_or_else(|| CoreError::Unparseable { reason: format!("missing {DELIMITER:?} delimiter") })?;
    let mut quads = Vec::new();
    for tuple in parse_tuple_list(annotation.trim())? {
        if tuple.len() != order.0.len() {
            return Err(CoreError::Arity { expected: order.0.len(), found: tuple.len() });
        }
        let (mut category, mut aspect, mut opinion, mut polarity) = (None, AspectTerm::implicit(), None, None);
        for (element, value) in order.0.iter().zip(&tuple) {
            let text = value.as_deref().unwrap_or_default();
            match element {
                Element::Category => category = Some(category_name(text)),
                Element::Aspect if is_null(value) => aspect = AspectTerm::implicit(),
                Element::Aspect => aspect = AspectTerm::explicit(text)?,
                Element::Opinion => opinion = Some(text),
                Element::Polarity => polarity = Some(text.parse::<Polarity>()?),
            }
        }
        // order.check guarantees polarity is present
        let polarity = polarity.ok_or(CoreError::Arity { expected: order.0.len(), found: tuple.len() })?;
        quads.push(SentimentQuad::new(category.as_deref(), aspect, opinion, polarity)?);
    }
    Example::new(sentence, quads, task, split)
}
