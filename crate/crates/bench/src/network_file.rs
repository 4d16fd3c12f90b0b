//! JSON network files.
//!
//! A file has three sections: `parameters`, `blocks` and `switches`. Every
//! error carries the line and column of the offending element.

use std::fmt;
use std::path::Path;

use netpart_core::{Block, Parameters, PartitionProblem, Switch};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkError {
    pub message: String,
    /// 1-based position; `None` for errors not tied to one location.
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl NetworkError {
    fn at(text: &str, offset: usize, message: String) -> Self {
        let (line, column) = line_col(text, offset);
        Self { message, line: Some(line), column: Some(column) }
    }

    fn unpositioned(message: String) -> Self {
        Self { message, line: None, column: None }
    }
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {}, column {}: {}", l, c, self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for NetworkError {}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, column)
}

#[derive(Deserialize)]
struct RawDocument<'a> {
    parameters: Parameters,
    #[serde(borrow)]
    blocks: Vec<&'a RawValue>,
    #[serde(borrow, default)]
    switches: Vec<&'a RawValue>,
}

#[derive(Serialize)]
struct Document<'a> {
    parameters: &'a Parameters,
    blocks: &'a [Block],
    switches: &'a [Switch],
}

fn offset_of(text: &str, raw: &RawValue) -> usize {
    raw.get().as_ptr() as usize - text.as_ptr() as usize
}

/// Decodes one array element, shifting serde positions to file positions.
fn element<T: for<'de> Deserialize<'de>>(text: &str, raw: &RawValue, what: &str) -> Result<T, NetworkError> {
    serde_json::from_str(raw.get()).map_err(|e| {
        let start = offset_of(text, raw);
        let (line, column) = line_col(text, start);
        let (line, column) = if e.line() <= 1 { (line, column + e.column().saturating_sub(1)) } else { (line + e.line() - 1, e.column()) };
        NetworkError { message: format!("{}: {}", what, e), line: Some(line), column: Some(column) }
    })
}

pub fn parse_network_str(text: &str) -> Result<PartitionProblem, NetworkError> {
    let doc: RawDocument = serde_json::from_str(text).map_err(|e| NetworkError {
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
    })?;

    let mut blocks: Vec<(Block, usize)> = Vec::with_capacity(doc.blocks.len());
    for (i, raw) in doc.blocks.iter().enumerate() {
        let block: Block = element(text, raw, &format!("blocks[{}]", i))?;
        blocks.push((block, offset_of(text, raw)));
    }
    blocks.sort_by_key(|(b, _)| b.id);
    for (pos, (block, offset)) in blocks.iter().enumerate() {
        if block.id != pos {
            let message = if pos > 0 && blocks[pos - 1].0.id == block.id {
                format!("duplicate block id {}", block.id)
            } else {
                format!("block ids must be 0..{} without gaps, found {}", blocks.len(), block.id)
            };
            return Err(NetworkError::at(text, *offset, message));
        }
    }

    let mut switches: Vec<(Switch, usize)> = Vec::with_capacity(doc.switches.len());
    for (i, raw) in doc.switches.iter().enumerate() {
        let switch: Switch = element(text, raw, &format!("switches[{}]", i))?;
        let offset = offset_of(text, raw);
        for end in [switch.from, switch.to] {
            if end >= blocks.len() {
                return Err(NetworkError::at(text, offset, format!("switch {} references unknown block {}", switch.id, end)));
            }
        }
        switches.push((switch, offset));
    }
    switches.sort_by_key(|(s, _)| s.id);
    for (pos, (switch, offset)) in switches.iter().enumerate() {
        if switch.id != pos {
            let message = if pos > 0 && switches[pos - 1].0.id == switch.id {
                format!("duplicate switch id {}", switch.id)
            } else {
                format!("switch ids must be 0..{} without gaps, found {}", switches.len(), switch.id)
            };
            return Err(NetworkError::at(text, *offset, message));
        }
    }

    PartitionProblem::new(
        blocks.into_iter().map(|(b, _)| b).collect(),
        switches.into_iter().map(|(s, _)| s).collect(),
        doc.parameters,
    )
    .map_err(|e| NetworkError::unpositioned(e.to_string()))
}

#[derive(Debug)]
pub enum ReadError {
    Io(std::io::Error),
    Network(NetworkError),
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadError::Io(e) => write!(f, "{}", e),
            ReadError::Network(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for ReadError {}

pub fn parse_network(path: &Path) -> Result<PartitionProblem, ReadError> {
    let text = std::fs::read_to_string(path).map_err(ReadError::Io)?;
    parse_network_str(&text).map_err(ReadError::Network)
}

/// Canonical form: blocks and switches in id order, pretty-printed.
pub fn serialize_network(problem: &PartitionProblem) -> String {
    let doc = Document { parameters: problem.params(), blocks: problem.blocks(), switches: problem.switches() };
    let mut text = serde_json::to_string_pretty(&doc).expect("network documents always serialize");
    text.push('\n');
    text
}
