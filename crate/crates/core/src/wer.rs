//! Word error rate of a gold-annotated corpus and the corpus property table.
//!
//! WER is the total word-level edit distance between each source sentence and its
//! corrected reference divided by the total number of source words. Totals are exact
//! rationals; rounding happens only when a value is formatted.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusMetadata};
use crate::error::ScoreError;
use crate::token::{Sentence, Token};

/// Word-level Levenshtein distance with unit costs.
pub fn edit_distance(x: &Sentence, y: &Sentence) -> usize {
    token_distance(x.tokens(), y.tokens())
}

pub(crate) fn token_distance(a: &[Token], b: &[Token]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut curr = vec![0usize; short.len() + 1];
    for (i, lt) in long.iter().enumerate() {
        curr[0] = i + 1;
        for (j, st) in short.iter().enumerate() {
            let sub = prev[j] + usize::from(lt != st);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// How a sentence with several annotators contributes its distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefPolicy {
    /// Annotator 0, or the lowest id present.
    #[default]
    First,
    /// Smallest distance over annotators.
    Min,
    /// Arithmetic mean over annotators, kept exact.
    Mean,
}

impl std::str::FromStr for RefPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(RefPolicy::First),
            "min" => Ok(RefPolicy::Min),
            "mean" => Ok(RefPolicy::Mean),
            other => Err(format!("unknown reference policy {other:?} (expected first, min or mean)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WerStats {
    pub total_edit_distance: Ratio<u64>,
    pub total_source_words: u64,
}

impl WerStats {
    pub fn wer(&self) -> Ratio<u64> {
        self.total_edit_distance / Ratio::from_integer(self.total_source_words)
    }

    pub fn wer_f64(&self) -> f64 {
        let w = self.wer();
        *w.numer() as f64 / *w.denom() as f64
    }

    /// WER in percent, two decimals, rounded half up.
    pub fn percent_string(&self) -> String {
        format_ratio_percent(self.wer())
    }
}

/// Formats `value × 100` with two decimals, rounding half up, using exact arithmetic.
pub fn format_ratio_percent(value: Ratio<u64>) -> String {
    let (num, den) = (u128::from(*value.numer()), u128::from(*value.denom()));
    let hundredths = (num * 20_000 + den) / (2 * den);
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

pub fn corpus_wer(corpus: &Corpus, policy: RefPolicy) -> Result<WerStats, ScoreError> {
    let per_sentence: Vec<(Ratio<u64>, u64)> = corpus
        .sentences
        .par_iter()
        .map(|sentence| {
            let words = sentence.source.len() as u64;
            let distance = match policy {
                RefPolicy::First => {
                    let reference = sentence
                        .reference(sentence.lowest_annotator())
                        .expect("lowest annotator exists");
                    Ratio::from_integer(edit_distance(&sentence.source, &reference) as u64)
                }
                RefPolicy::Min => {
                    let best = sentence
                        .references()
                        .iter()
                        .map(|r| edit_distance(&sentence.source, r))
                        .min()
                        .expect("validated sentences have an annotator");
                    Ratio::from_integer(best as u64)
                }
                RefPolicy::Mean => {
                    let refs = sentence.references();
                    let sum: usize = refs.iter().map(|r| edit_distance(&sentence.source, r)).sum();
                    Ratio::new(sum as u64, refs.len() as u64)
                }
            };
            (distance, words)
        })
        .collect();
    let (total_edit_distance, total_source_words) = per_sentence
        .into_iter()
        .fold((Ratio::from_integer(0), 0u64), |(d, n), (dd, nn)| (d + dd, n + nn));
    if total_source_words == 0 {
        return Err(ScoreError::UndefinedWer { corpus: corpus.name.clone() });
    }
    Ok(WerStats { total_edit_distance, total_source_words })
}

/// One row of the corpus property table.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusProperties {
    pub name: String,
    pub sentence_count: usize,
    /// Largest number of annotators on any sentence.
    pub reference_count: usize,
    /// `None` when the corpus has no source words.
    pub wer: Option<WerStats>,
    pub metadata: CorpusMetadata,
}

impl CorpusProperties {
    pub fn wer_percent_string(&self) -> String {
        self.wer.as_ref().map_or_else(|| "n/a".to_owned(), WerStats::percent_string)
    }
}

pub fn corpus_properties(corpus: &Corpus, policy: RefPolicy) -> CorpusProperties {
    CorpusProperties {
        name: corpus.name.clone(),
        sentence_count: corpus.len(),
        reference_count: corpus.sentences.iter().map(|s| s.gold.len()).max().unwrap_or(0),
        wer: corpus_wer(corpus, policy).ok(),
        metadata: corpus.metadata.clone(),
    }
}
