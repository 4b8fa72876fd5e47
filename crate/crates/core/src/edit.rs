//! Span edits over token sequences and their application.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::token::{Sentence, Token};

/// Error type given to system edits recovered from an alignment.
pub const UNKNOWN_ERROR_TYPE: &str = "UNK";

/// Free-text M2 fields that scoring ignores but serialization must preserve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditAnnotation {
    pub required: String,
    pub comment: String,
}

/// Replacement of the half-open token span `[start, end)` by `replacement`.
///
/// `start == end` is a pure insertion before `start`; an empty replacement is a deletion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<Token>,
    pub error_type: String,
    pub annotator_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<EditAnnotation>,
}

impl Edit {
    pub fn new(start: usize, end: usize, replacement: Vec<Token>) -> Self {
        Edit {
            start,
            end,
            replacement,
            error_type: UNKNOWN_ERROR_TYPE.to_owned(),
            annotator_id: None,
            annotation: None,
        }
    }

    pub fn with_type(mut self, error_type: impl Into<String>) -> Self {
        self.error_type = error_type.into();
        self
    }

    pub fn with_annotator(mut self, annotator_id: u32) -> Self {
        self.annotator_id = Some(annotator_id);
        self
    }

    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }

    /// Same span and same replacement; type and annotator are ignored.
    pub fn same_correction(&self, other: &Edit, case_insensitive: bool) -> bool {
        self.start == other.start
            && self.end == other.end
            && tokens_equal(&self.replacement, &other.replacement, case_insensitive)
    }

    pub fn replacement_line(&self) -> String {
        self.replacement.iter().map(Token::as_str).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}) -> {:?}", self.start, self.end, self.replacement_line())
    }
}

pub(crate) fn tokens_equal(a: &[Token], b: &[Token], case_insensitive: bool) -> bool {
    if !case_insensitive {
        return a == b;
    }
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.as_str().to_lowercase() == y.as_str().to_lowercase())
}

/// Checks bounds and pairwise non-overlap, returning the edits ordered by `(start, end)`.
///
/// Two pure insertions at the same index are rejected because their order is ambiguous.
pub fn validate_edit_set(edits: &[Edit], sentence_len: usize) -> Result<Vec<&Edit>, ValidationError> {
    for edit in edits {
        if edit.start > edit.end {
            return Err(ValidationError::InvertedSpan { start: edit.start, end: edit.end });
        }
        if edit.end > sentence_len {
            return Err(ValidationError::OutOfBounds {
                start: edit.start,
                end: edit.end,
                len: sentence_len,
            });
        }
    }
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    for pair in sorted.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let clash = a.end > b.start || (a.is_insertion() && b.is_insertion() && a.start == b.start);
        if clash {
            return Err(ValidationError::OverlappingEdits { first: a.to_string(), second: b.to_string() });
        }
    }
    Ok(sorted)
}

/// Applies a non-overlapping edit set to `source`, right to left so earlier indices stay valid.
pub fn apply_edits(source: &Sentence, edits: &[Edit]) -> Result<Sentence, ValidationError> {
    let sorted = validate_edit_set(edits, source.len())?;
    let mut tokens = source.tokens().to_vec();
    for edit in sorted.into_iter().rev() {
        tokens.splice(edit.start..edit.end, edit.replacement.iter().cloned());
    }
    Ok(Sentence::new(tokens))
}
