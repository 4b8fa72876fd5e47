//! Reader and writer for the M2 annotation format.
//!
//! ```text
//! S This are a sentence .
//! A 1 2|||SVA|||is|||REQUIRED|||-NONE-|||0
//! A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||1
//!
//! ```
//!
//! Each block holds one `S` line followed by `A` lines, and blocks are separated by
//! blank lines. An `A` line carries `start end`, error type, replacement, required flag,
//! comment and annotator id, joined by `|||`. A `noop` line registers an annotator who
//! found nothing to correct. Input may use LF or CRLF; output always uses LF.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{AnnotatedSentence, Corpus};
use crate::edit::{validate_edit_set, Edit, EditAnnotation};
use crate::error::{ParseError, ValidationError};
use crate::token::{tokenize, Sentence};

const FIELD_SEP: &str = "|||";
const NONE_MARKER: &str = "-NONE-";
const NOOP_TYPE: &str = "noop";
const DEFAULT_REQUIRED: &str = "REQUIRED";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct M2Document {
    pub sentences: Vec<AnnotatedSentence>,
}

impl M2Document {
    pub fn into_corpus(self, name: impl Into<String>) -> Corpus {
        Corpus::new(name, self.sentences)
    }
}

struct OpenBlock {
    source: Sentence,
    gold: BTreeMap<u32, Vec<Edit>>,
}

impl OpenBlock {
    fn finish(self) -> AnnotatedSentence {
        let mut gold = self.gold;
        if gold.is_empty() {
            gold.insert(0, Vec::new());
        }
        for edits in gold.values_mut() {
            edits.sort_by_key(|e| (e.start, e.end));
        }
        AnnotatedSentence { source: self.source, gold }
    }
}

pub fn parse_m2(text: &str) -> Result<M2Document, ParseError> {
    let mut sentences = Vec::new();
    let mut block: Option<OpenBlock> = None;

    for (index, raw) in text.split('\n').enumerate() {
        let line_no = index + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if let Some(done) = block.take() {
                sentences.push(done.finish());
            }
            continue;
        }
        if let Some(rest) = strip_tag(line, 'S') {
            if let Some(done) = block.take() {
                sentences.push(done.finish());
            }
            block = Some(OpenBlock { source: tokenize(rest), gold: BTreeMap::new() });
        } else if let Some(rest) = strip_tag(line, 'A') {
            let open = block
                .as_mut()
                .ok_or_else(|| ParseError::syntax(line_no, "annotation line before any source line"))?;
            match parse_annotation(rest, line_no)? {
                Annotation::Noop { annotator } => {
                    open.gold.entry(annotator).or_default();
                }
                Annotation::Edit(edit) => {
                    let annotator = edit.annotator_id.expect("parser sets annotator");
                    let edits = open.gold.entry(annotator).or_default();
                    edits.push(edit);
                    validate_edit_set(edits, open.source.len())
                        .map_err(|source| ParseError::Invalid { line: line_no, source })?;
                }
            }
        } else {
            return Err(ParseError::syntax(line_no, format!("expected an S or A line, found {line:?}")));
        }
    }
    if let Some(done) = block.take() {
        sentences.push(done.finish());
    }
    Ok(M2Document { sentences })
}

fn strip_tag(line: &str, tag: char) -> Option<&str> {
    let rest = line.strip_prefix(tag)?;
    if rest.is_empty() {
        Some(rest)
    } else if rest.starts_with(char::is_whitespace) {
        Some(&rest[1..])
    } else {
        None
    }
}

enum Annotation {
    Noop { annotator: u32 },
    Edit(Edit),
}

fn parse_annotation(rest: &str, line_no: usize) -> Result<Annotation, ParseError> {
    let fields: Vec<&str> = rest.split(FIELD_SEP).collect();
    if fields.len() < 6 {
        return Err(ParseError::syntax(
            line_no,
            format!("expected 6 '|||'-separated fields, found {}", fields.len()),
        ));
    }
    let mut offsets = fields[0].split_whitespace();
    let (Some(start), Some(end), None) = (offsets.next(), offsets.next(), offsets.next()) else {
        return Err(ParseError::syntax(line_no, format!("expected two offsets, found {:?}", fields[0])));
    };
    let parse_offset = |s: &str| {
        s.parse::<i64>()
            .map_err(|_| ParseError::syntax(line_no, format!("offset {s:?} is not an integer")))
    };
    let (start, end) = (parse_offset(start)?, parse_offset(end)?);
    let annotator_field = fields[fields.len() - 1].trim();
    let annotator = annotator_field.parse::<u32>().map_err(|_| {
        ParseError::syntax(line_no, format!("annotator id {annotator_field:?} is not a non-negative integer"))
    })?;
    let error_type = fields[1];
    if error_type == NOOP_TYPE || (start == -1 && end == -1) {
        return Ok(Annotation::Noop { annotator });
    }
    if start < 0 || end < 0 {
        return Err(ParseError::syntax(line_no, format!("negative offsets {start} {end}")));
    }
    let (start, end) = (start as usize, end as usize);
    if start > end {
        return Err(ParseError::Invalid { line: line_no, source: ValidationError::InvertedSpan { start, end } });
    }
    let replacement_field = fields[2].trim();
    let replacement = if replacement_field == NONE_MARKER {
        Vec::new()
    } else {
        tokenize(replacement_field).into_tokens()
    };
    let annotation = EditAnnotation {
        required: fields[3].to_owned(),
        comment: fields[4..fields.len() - 1].join(FIELD_SEP),
    };
    let mut edit = Edit::new(start, end, replacement).with_type(error_type).with_annotator(annotator);
    edit.annotation = Some(annotation);
    Ok(Annotation::Edit(edit))
}

pub fn serialize_m2(doc: &M2Document) -> String {
    let mut out = String::new();
    for sentence in &doc.sentences {
        if sentence.source.is_empty() {
            out.push_str("S\n");
        } else {
            let _ = writeln!(out, "S {}", sentence.source.to_line());
        }
        for (&annotator, edits) in &sentence.gold {
            if edits.is_empty() {
                let _ = writeln!(
                    out,
                    "A -1 -1{FIELD_SEP}{NOOP_TYPE}{FIELD_SEP}{NONE_MARKER}{FIELD_SEP}{DEFAULT_REQUIRED}{FIELD_SEP}{NONE_MARKER}{FIELD_SEP}{annotator}"
                );
            }
            for edit in edits {
                let replacement = if edit.replacement.is_empty() {
                    NONE_MARKER.to_owned()
                } else {
                    edit.replacement_line()
                };
                let (required, comment) = match &edit.annotation {
                    Some(a) => (a.required.as_str(), a.comment.as_str()),
                    None => (DEFAULT_REQUIRED, NONE_MARKER),
                };
                let _ = writeln!(
                    out,
                    "A {} {}{FIELD_SEP}{}{FIELD_SEP}{replacement}{FIELD_SEP}{required}{FIELD_SEP}{comment}{FIELD_SEP}{annotator}",
                    edit.start, edit.end, edit.error_type
                );
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotatorPolicy {
    /// One reference file per annotator id seen anywhere in the document.
    All,
    /// Only annotator 0.
    First,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReferenceLines {
    pub annotator: u32,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParallelText {
    pub sources: Vec<String>,
    pub references: Vec<ReferenceLines>,
}

/// Materializes source lines and per-annotator reference lines.
///
/// A sentence without annotator `k` contributes its lowest-id annotator's reference to file `k`.
pub fn to_parallel(doc: &M2Document, policy: AnnotatorPolicy) -> ParallelText {
    if doc.sentences.is_empty() {
        return ParallelText::default();
    }
    let annotators: Vec<u32> = match policy {
        AnnotatorPolicy::First => vec![0],
        AnnotatorPolicy::All => {
            let mut ids: Vec<u32> = doc.sentences.iter().flat_map(|s| s.annotator_ids()).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        }
    };
    let sources = doc.sentences.iter().map(|s| s.source.to_line()).collect();
    let references = annotators
        .into_iter()
        .map(|annotator| {
            let lines = doc
                .sentences
                .iter()
                .map(|s| {
                    s.reference(annotator)
                        .or_else(|| s.reference(s.lowest_annotator()))
                        .expect("parsed sentences have an annotator")
                        .to_line()
                })
                .collect();
            ReferenceLines { annotator, lines }
        })
        .collect();
    ParallelText { sources, references }
}
