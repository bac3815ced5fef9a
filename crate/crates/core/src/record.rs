//! JSON Lines dataset records.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::ProofTree;
use crate::questions::Provenance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One question with its full context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub id: String,
    pub theory_formal: String,
    pub context: String,
    pub question: String,
    pub statement_formal: String,
    pub answer: bool,
    pub depth: u32,
    pub provenance: Provenance,
    pub proofs: Vec<ProofTree>,
    pub split: Split,
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: String },
    #[error("line {line}: unknown field `{field}`")]
    UnknownField { line: usize, field: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn classify(line: usize, e: serde_json::Error) -> SchemaError {
    let message = e.to_string();
    if message.starts_with("missing field") {
        if let Some(field) = backticked(&message) {
            return SchemaError::MissingField { line, field };
        }
    }
    if message.starts_with("unknown field") {
        if let Some(field) = backticked(&message) {
            return SchemaError::UnknownField { line, field };
        }
    }
    SchemaError::Invalid { line, message }
}

impl Record {
    pub fn from_line(line: &str) -> Result<Record, SchemaError> {
        serde_json::from_str(line).map_err(|e| classify(1, e))
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<Record>, SchemaError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| classify(i + 1, e))?);
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut writer: W, records: &[Record]) -> std::io::Result<()> {
    for r in records {
        writer.write_all(r.to_line().as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
