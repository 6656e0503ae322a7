//! Line-oriented snapshot of a built [`CollectionIndex`].
//!
//! One JSON object per line: a header carrying the format version and the
//! document count, the document id table, then one record per posting list
//! in key order. Writing a loaded snapshot reproduces the input bytes.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::CollectionIndex;
use crate::error::{Error, Result};
use crate::model::{ConceptId, Statement, Term};

pub const SNAPSHOT_VERSION: u32 = 1;
const FORMAT: &str = "narrative-index";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    doc_count: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record {
    Docs { ids: Vec<String> },
    Term { key: Term, docs: Vec<u32> },
    Concept { key: ConceptId, docs: Vec<u32> },
    Statement { key: Statement, docs: Vec<u32> },
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<snapshot>", e)
}

fn write_line(out: &mut impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, value).map_err(|e| io_err(e.into()))?;
    out.write_all(b"\n").map_err(io_err)
}

pub fn write_snapshot(index: &CollectionIndex, mut out: impl Write) -> Result<()> {
    write_line(
        &mut out,
        &Header {
            format: FORMAT.into(),
            version: SNAPSHOT_VERSION,
            doc_count: index.doc_count(),
        },
    )?;
    write_line(
        &mut out,
        &Record::Docs {
            ids: index.doc_ids.clone(),
        },
    )?;
    for (key, docs) in &index.terms {
        let record = Record::Term {
            key: key.clone(),
            docs: docs.clone(),
        };
        write_line(&mut out, &record)?;
    }
    for (key, docs) in &index.concepts {
        let record = Record::Concept {
            key: key.clone(),
            docs: docs.clone(),
        };
        write_line(&mut out, &record)?;
    }
    for (key, docs) in &index.statements {
        let record = Record::Statement {
            key: key.clone(),
            docs: docs.clone(),
        };
        write_line(&mut out, &record)?;
    }
    out.flush().map_err(io_err)
}

pub fn read_snapshot(input: impl BufRead) -> Result<CollectionIndex> {
    let bad = |line: usize, reason: String| Error::parse("<snapshot>", line, reason);
    let mut lines = input.lines().enumerate();

    let (_, first) = lines.next().ok_or_else(|| bad(1, "empty snapshot".into()))?;
    let header: Header = serde_json::from_str(&first.map_err(io_err)?).map_err(|e| bad(1, e.to_string()))?;
    if header.format != FORMAT || header.version != SNAPSHOT_VERSION {
        return Err(bad(
            1,
            format!("unsupported snapshot {} v{}", header.format, header.version),
        ));
    }

    let mut index = CollectionIndex::default();
    let mut saw_docs = false;
    for (i, line) in lines {
        let number = i + 1;
        let line = line.map_err(io_err)?;
        let record: Record = serde_json::from_str(&line).map_err(|e| bad(number, e.to_string()))?;
        let check = |docs: &[u32]| -> Result<()> {
            let sorted = docs.windows(2).all(|w| w[0] < w[1]);
            let in_range = docs.iter().all(|d| (*d as usize) < header.doc_count);
            if docs.is_empty() || !sorted || !in_range {
                return Err(bad(number, "posting list must be non-empty, sorted and in range".into()));
            }
            Ok(())
        };
        match record {
            Record::Docs { ids } => {
                if saw_docs || ids.len() != header.doc_count {
                    return Err(bad(number, "document table does not match the header".into()));
                }
                if !ids.windows(2).all(|w| w[0] < w[1]) {
                    return Err(bad(number, "document ids must be strictly ascending".into()));
                }
                index.doc_ids = ids;
                saw_docs = true;
            }
            Record::Term { key, docs } => {
                check(&docs)?;
                index.terms.insert(key, docs);
            }
            Record::Concept { key, docs } => {
                check(&docs)?;
                index.concepts.insert(key, docs);
            }
            Record::Statement { key, docs } => {
                check(&docs)?;
                index.statements.insert(key, docs);
            }
        }
    }
    if !saw_docs {
        return Err(bad(2, "missing document table".into()));
    }
    Ok(index)
}
