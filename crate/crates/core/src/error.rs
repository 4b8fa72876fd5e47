use std::path::PathBuf;

use thiserror::Error;

/// A structural invariant was violated by some input value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },
    #[error("edit span [{start}, {end}) is inverted")]
    InvertedSpan { start: usize, end: usize },
    #[error("edit span [{start}, {end}) is out of bounds for a sentence of {len} tokens")]
    OutOfBounds { start: usize, end: usize, len: usize },
    #[error("overlapping edits {first} and {second}")]
    OverlappingEdits { first: String, second: String },
    #[error("sentence has no annotators")]
    NoAnnotators,
}

/// A malformed or invalid line in an annotation file. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: ValidationError },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, message: message.into() }
    }

    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Invalid { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("system {system:?} has {found} hypotheses but corpus {corpus:?} has {expected} sentences")]
    LengthMismatch { corpus: String, system: String, expected: usize, found: usize },
    #[error("input lists differ in length: {sources} sources, {hypotheses} hypotheses, {references} references")]
    InputLengthMismatch { sources: usize, hypotheses: usize, references: usize },
    #[error("sentence {index} has an empty reference set")]
    EmptyReferenceSet { index: usize },
    #[error("beta must be finite and positive, got {0}")]
    InvalidBeta(f64),
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
    #[error("WER is undefined for corpus {corpus:?}: it has no source words")]
    UndefinedWer { corpus: String },
    #[error("corpus {corpus:?} carries no gold edits; F-beta needs M2 annotations")]
    NoGoldEdits { corpus: String },
    #[error("missing scores for {0}")]
    MissingCells(String),
    #[error("need at least {needed} corpora, got {got}")]
    TooFewCorpora { needed: usize, got: usize },
}

/// Top-level error for file-driven operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{count} evaluation entries failed")]
    Failures { count: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Short category name used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Manifest(_) => "manifest",
            Error::Score(_) => "score",
            Error::Io { .. } => "io",
            Error::Failures { .. } => "failures",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
