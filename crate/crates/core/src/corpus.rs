//! Annotated sentences, corpora and system hypothesis sets.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::edit::{apply_edits, validate_edit_set, Edit};
use crate::error::{ScoreError, ValidationError};
use crate::token::{tokenize, Sentence};

/// A source sentence plus one gold edit set per annotator.
///
/// An annotator with an empty edit set judged the sentence correct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub source: Sentence,
    pub gold: BTreeMap<u32, Vec<Edit>>,
}

impl AnnotatedSentence {
    /// Builds and validates; each annotator's edits are stored sorted by span.
    pub fn new(source: Sentence, gold: BTreeMap<u32, Vec<Edit>>) -> Result<Self, ValidationError> {
        let mut sentence = AnnotatedSentence { source, gold };
        sentence.validate()?;
        for edits in sentence.gold.values_mut() {
            edits.sort_by_key(|e| (e.start, e.end));
        }
        Ok(sentence)
    }

    /// A sentence annotated as correct by annotator 0.
    pub fn unannotated(source: Sentence) -> Self {
        AnnotatedSentence { source, gold: BTreeMap::from([(0, Vec::new())]) }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.gold.is_empty() {
            return Err(ValidationError::NoAnnotators);
        }
        for edits in self.gold.values() {
            validate_edit_set(edits, self.source.len())?;
        }
        Ok(())
    }

    pub fn annotator_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.gold.keys().copied()
    }

    pub fn lowest_annotator(&self) -> u32 {
        *self.gold.keys().next().expect("validated sentences have an annotator")
    }

    /// The corrected sentence according to `annotator`, if that annotator is present.
    pub fn reference(&self, annotator: u32) -> Option<Sentence> {
        let edits = self.gold.get(&annotator)?;
        Some(apply_edits(&self.source, edits).expect("gold edits are validated on construction"))
    }

    /// One reference per annotator, in annotator order.
    pub fn references(&self) -> Vec<Sentence> {
        self.gold
            .values()
            .map(|edits| apply_edits(&self.source, edits).expect("gold edits are validated on construction"))
            .collect()
    }
}

/// Topic count column; some corpora have too many topics to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopicCount {
    Count(u32),
    Many,
}

impl Serialize for TopicCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TopicCount::Count(n) => s.serialize_u32(*n),
            TopicCount::Many => s.serialize_str("many"),
        }
    }
}

impl<'de> Deserialize<'de> for TopicCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(TopicCount::Count(n)),
            Raw::Text(t) if t.eq_ignore_ascii_case("many") => Ok(TopicCount::Many),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"many\", got {t:?}"
            ))),
        }
    }
}

impl fmt::Display for TopicCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopicCount::Count(n) => write!(f, "{n}"),
            TopicCount::Many => f.write_str("Many"),
        }
    }
}

/// Descriptive corpus properties that cannot be derived from the annotations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMetadata {
    #[serde(default)]
    pub topics: Option<TopicCount>,
    #[serde(default)]
    pub multiple_l1: Option<bool>,
    #[serde(default)]
    pub multiple_proficiency: Option<bool>,
    #[serde(default)]
    pub publicly_available: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub sentences: Vec<AnnotatedSentence>,
    pub metadata: CorpusMetadata,
    /// False when gold edits were synthesized from plain reference text, which makes
    /// the corpus unsuitable for edit-level scoring.
    pub has_edit_annotations: bool,
}

impl Corpus {
    pub fn new(name: impl Into<String>, sentences: Vec<AnnotatedSentence>) -> Self {
        Corpus {
            name: name.into(),
            sentences,
            metadata: CorpusMetadata::default(),
            has_edit_annotations: true,
        }
    }

    pub fn with_metadata(mut self, metadata: CorpusMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sources(&self) -> Vec<Sentence> {
        self.sentences.iter().map(|s| s.source.clone()).collect()
    }

    /// Builds a corpus from parallel text: one source line per sentence and one
    /// reference file per annotator. Each reference becomes a single edit covering
    /// the region between the longest common prefix and suffix.
    pub fn from_parallel(
        name: impl Into<String>,
        sources: &[Sentence],
        references: &[Vec<Sentence>],
    ) -> Result<Self, ScoreError> {
        for refs in references {
            if refs.len() != sources.len() {
                return Err(ScoreError::InputLengthMismatch {
                    sources: sources.len(),
                    hypotheses: sources.len(),
                    references: refs.len(),
                });
            }
        }
        let sentences = sources
            .iter()
            .enumerate()
            .map(|(i, source)| {
                let gold = references
                    .iter()
                    .enumerate()
                    .map(|(k, refs)| (k as u32, diff_as_edit(source, &refs[i], k as u32)))
                    .collect::<BTreeMap<_, _>>();
                if gold.is_empty() {
                    AnnotatedSentence::unannotated(source.clone())
                } else {
                    AnnotatedSentence { source: source.clone(), gold }
                }
            })
            .collect();
        let mut corpus = Corpus::new(name, sentences);
        corpus.has_edit_annotations = false;
        Ok(corpus)
    }
}

fn diff_as_edit(source: &Sentence, reference: &Sentence, annotator: u32) -> Vec<Edit> {
    let (a, b) = (source.tokens(), reference.tokens());
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    if prefix == a.len() && prefix == b.len() {
        return Vec::new();
    }
    let replacement = b[prefix..b.len() - suffix].to_vec();
    vec![Edit::new(prefix, a.len() - suffix, replacement).with_type("PARALLEL").with_annotator(annotator)]
}

/// One system's corrected output for a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisSet {
    pub system_name: String,
    pub run_id: u32,
    pub sentences: Vec<Sentence>,
}

impl HypothesisSet {
    pub fn new(system_name: impl Into<String>, run_id: u32, sentences: Vec<Sentence>) -> Self {
        HypothesisSet { system_name: system_name.into(), run_id, sentences }
    }

    /// One whitespace-tokenized sentence per line.
    pub fn from_text(system_name: impl Into<String>, run_id: u32, text: &str) -> Self {
        HypothesisSet::new(system_name, run_id, text.lines().map(tokenize).collect())
    }

    pub fn check_against(&self, corpus: &Corpus) -> Result<(), ScoreError> {
        if self.sentences.len() != corpus.len() {
            return Err(ScoreError::LengthMismatch {
                corpus: corpus.name.clone(),
                system: self.system_name.clone(),
                expected: corpus.len(),
                found: self.sentences.len(),
            });
        }
        Ok(())
    }
}
