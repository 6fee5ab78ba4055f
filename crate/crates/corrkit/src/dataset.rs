//! JSON Lines dataset files, one record per line.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use corrkit_core::datagen::{DatasetRecord, RecordMeta, SlotBinding, SlotName, Split, Task};
use corrkit_core::token::from_words;
use corrkit_core::{EntityPair, LabelTag, TaggedPair, Token};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairLine {
    pub slot: u8,
    pub reparandum: Vec<String>,
    pub repair: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingLine {
    pub slot: String,
    pub original: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaLine {
    pub task: String,
    pub request_template_id: String,
    pub correction_template_id: String,
    pub bindings: Vec<BindingLine>,
}

/// Wire shape of one dataset line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordLine {
    pub id: String,
    pub split: String,
    pub request_tokens: Vec<String>,
    pub correction_tokens: Vec<String>,
    pub labels: Vec<String>,
    pub boundary: usize,
    pub corrected_tokens: Vec<String>,
    pub pairs: Vec<PairLine>,
    pub meta: MetaLine,
}

fn texts(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.text.clone()).collect()
}

fn surface(words: &[String]) -> String {
    words.join(" ")
}

impl From<&DatasetRecord> for RecordLine {
    fn from(r: &DatasetRecord) -> Self {
        RecordLine {
            id: r.id.clone(),
            split: r.split.as_str().into(),
            request_tokens: texts(r.tagged.request_tokens()),
            correction_tokens: texts(r.tagged.correction_tokens()),
            labels: r
                .tagged
                .labels()
                .iter()
                .map(|l| l.as_str().into())
                .collect(),
            boundary: r.tagged.boundary(),
            corrected_tokens: texts(&r.gold_corrected),
            pairs: r
                .gold_pairs
                .iter()
                .map(|p| PairLine {
                    slot: p.slot.get(),
                    reparandum: texts(&p.reparandum),
                    repair: texts(&p.repair),
                })
                .collect(),
            meta: MetaLine {
                task: r.meta.task.as_str().into(),
                request_template_id: r.meta.request_template_id.clone(),
                correction_template_id: r.meta.correction_template_id.clone(),
                bindings: r
                    .meta
                    .bindings
                    .iter()
                    .map(|b| BindingLine {
                        slot: b.slot.as_str().into(),
                        original: surface(&b.original),
                        replacement: b.replacement.as_deref().map(surface),
                    })
                    .collect(),
            },
        }
    }
}

fn split_words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

impl TryFrom<RecordLine> for DatasetRecord {
    type Error = String;

    fn try_from(line: RecordLine) -> Result<Self, String> {
        let split: Split = line.split.parse().map_err(|e| format!("{e}"))?;
        if line.boundary != line.request_tokens.len() {
            return Err(format!(
                "boundary {} does not equal the request length {}",
                line.boundary,
                line.request_tokens.len()
            ));
        }
        let labels = line
            .labels
            .iter()
            .map(|l| l.parse::<LabelTag>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let tagged = TaggedPair::new(&line.request_tokens, &line.correction_tokens, labels)
            .map_err(|e| e.to_string())?;
        let gold_pairs = line
            .pairs
            .iter()
            .map(|p| EntityPair::new(p.slot, &p.reparandum, &p.repair))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let task: Task = line.meta.task.parse().map_err(|e| format!("{e}"))?;
        let bindings = line
            .meta
            .bindings
            .iter()
            .map(|b| {
                Ok(SlotBinding {
                    slot: b.slot.parse::<SlotName>().map_err(|e| e.to_string())?,
                    original: split_words(&b.original),
                    replacement: b.replacement.as_deref().map(split_words),
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(DatasetRecord {
            id: line.id,
            split,
            tagged,
            gold_corrected: from_words(&line.corrected_tokens),
            gold_pairs,
            meta: RecordMeta {
                task,
                request_template_id: line.meta.request_template_id,
                correction_template_id: line.meta.correction_template_id,
                bindings,
            },
        })
    }
}

/// Serializes one record as a single JSON line, without the newline.
pub fn to_json_line(record: &DatasetRecord) -> String {
    serde_json::to_string(&RecordLine::from(record)).expect("record lines always serialize")
}

pub fn write_records<W: Write>(mut out: W, records: &[DatasetRecord]) -> io::Result<()> {
    for r in records {
        out.write_all(to_json_line(r).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<(), DatasetError> {
    let io_err = |source| DatasetError::Io {
        path: path.into(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_records(BufWriter::new(file), records).map_err(io_err)
}

/// Reads records; blank lines are skipped.
pub fn read_records<R: BufRead>(
    input: R,
    origin: &Path,
) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|source| DatasetError::Io {
            path: origin.into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| DatasetError::Malformed {
            path: origin.into(),
            line: i + 1,
            message,
        };
        let parsed: RecordLine =
            serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        out.push(DatasetRecord::try_from(parsed).map_err(malformed)?);
    }
    Ok(out)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.into(),
        source,
    })?;
    read_records(BufReader::new(file), path)
}
