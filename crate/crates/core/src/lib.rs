//! Evaluation toolkit for grammatical error correction across corpora.
//!
//! * [`m2`] reads and writes M² annotation files.
//! * [`maxmatch`] computes MaxMatch precision, recall and F-beta.
//! * [`gleu`] computes sampled-reference GLEU.
//! * [`wer`] measures how far references are from the source.
//! * [`harness`] runs manifests of systems and corpora and builds the reports.

pub mod corpus;
pub mod edit;
pub mod error;
pub mod gleu;
pub mod harness;
pub mod m2;
pub mod maxmatch;
pub mod token;
pub mod wer;

pub use corpus::{AnnotatedSentence, Corpus, CorpusMetadata, HypothesisSet, TopicCount};
pub use edit::{apply_edits, validate_edit_set, Edit, EditAnnotation};
pub use error::{Error, ParseError, Result, ScoreError, ValidationError};
pub use gleu::{gleu_corpus, GleuParams, GleuScore, NgramStats};
pub use m2::{parse_m2, serialize_m2, to_parallel, AnnotatorPolicy, M2Document, ParallelText};
pub use maxmatch::{f_beta, f_beta_from_pr, score_corpus, score_sentence, CorpusScore, MatchCounts, MatchParams};
pub use token::{tokenize, Sentence, Token};
pub use wer::{corpus_properties, corpus_wer, edit_distance, CorpusProperties, RefPolicy, WerStats};
