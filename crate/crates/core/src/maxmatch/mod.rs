//! MaxMatch scoring: recover the system's edits from a `(source, hypothesis)` pair so
//! that they agree with the gold annotation as much as possible, then count matches.
//!
//! The system edit set is a path through the [`EditLattice`]. Among all paths the
//! matcher prefers, in order: more edits equal to a gold edit, fewer edits, and the
//! lexicographically smallest edit sequence by `(start, end)` (then by hypothesis
//! offsets). Two pure insertions at the same index are never selected back to back;
//! the merged insertion is always available instead.

mod lattice;

use std::collections::BTreeMap;
use std::rc::Rc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, HypothesisSet};
use crate::edit::{tokens_equal, Edit};
use crate::error::ScoreError;
use crate::token::{Sentence, Token};

pub use lattice::EditLattice;
use lattice::{ArcEdit, ArcKind};

pub const DEFAULT_MAX_UNCHANGED_WORDS: usize = 2;
pub const DEFAULT_BETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchParams {
    pub max_unchanged_words: usize,
    pub case_insensitive: bool,
}

impl Default for MatchParams {
    fn default() -> Self {
        MatchParams { max_unchanged_words: DEFAULT_MAX_UNCHANGED_WORDS, case_insensitive: false }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl MatchCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        MatchCounts { tp, fp, fn_ }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

impl std::ops::Add for MatchCounts {
    type Output = MatchCounts;

    fn add(self, rhs: MatchCounts) -> MatchCounts {
        MatchCounts::new(self.tp + rhs.tp, self.fp + rhs.fp, self.fn_ + rhs.fn_)
    }
}

impl std::ops::AddAssign for MatchCounts {
    fn add_assign(&mut self, rhs: MatchCounts) {
        *self = *self + rhs;
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn check_beta(beta: f64) -> Result<(), ScoreError> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(ScoreError::InvalidBeta(beta))
    }
}

/// Weighted harmonic mean of precision and recall; `0/0` is taken as 0.
pub fn f_beta_from_pr(precision: f64, recall: f64, beta: f64) -> Result<f64, ScoreError> {
    check_beta(beta)?;
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    Ok(if den == 0.0 { 0.0 } else { (1.0 + b2) * precision * recall / den })
}

/// F-beta from raw counts. Counts are unsigned, so only `beta` can be invalid.
pub fn f_beta(tp: u64, fp: u64, fn_: u64, beta: f64) -> Result<f64, ScoreError> {
    let counts = MatchCounts::new(tp, fp, fn_);
    f_beta_from_pr(counts.precision(), counts.recall(), beta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusScore {
    pub counts: MatchCounts,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub sentences: usize,
}

/// Persistent list so candidate paths share suffixes.
struct Chain {
    edit: ArcEdit,
    next: Option<Rc<Chain>>,
}

#[derive(Clone)]
struct Best {
    matched: u32,
    edits: u32,
    chain: Option<Rc<Chain>>,
}

fn cmp_chains(mut a: &Option<Rc<Chain>>, mut b: &Option<Rc<Chain>>) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    loop {
        match (a, b) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                if Rc::ptr_eq(x, y) {
                    return Ordering::Equal;
                }
                match x.edit.cmp(&y.edit) {
                    Ordering::Equal => {
                        a = &x.next;
                        b = &y.next;
                    }
                    other => return other,
                }
            }
        }
    }
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        use std::cmp::Ordering;
        match self.matched.cmp(&other.matched) {
            Ordering::Greater => return true,
            Ordering::Less => return false,
            Ordering::Equal => {}
        }
        match self.edits.cmp(&other.edits) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
        cmp_chains(&self.chain, &other.chain) == Ordering::Less
    }
}

fn matches_gold(arc: &ArcEdit, hypothesis: &[Token], gold: &[Edit], case_insensitive: bool) -> bool {
    let replacement = &hypothesis[arc.hyp_start..arc.hyp_end];
    gold.iter().any(|g| {
        g.start == arc.start && g.end == arc.end && tokens_equal(&g.replacement, replacement, case_insensitive)
    })
}

/// Best path through the lattice for one gold set.
fn select_path(lattice: &EditLattice, hypothesis: &[Token], gold: &[Edit], case_insensitive: bool) -> Best {
    // Two states per vertex: index 1 means the path arrived through a pure insertion.
    let count = lattice.vertex_count();
    let mut best: Vec<[Option<Best>; 2]> = vec![[None, None]; count];
    let target = lattice.target();
    best[target] = [
        Some(Best { matched: 0, edits: 0, chain: None }),
        Some(Best { matched: 0, edits: 0, chain: None }),
    ];
    // Every arc increases the vertex index, so reverse index order is topological.
    for u in (0..target).rev() {
        if !lattice.is_on_path(u) {
            continue;
        }
        for after_insertion in [false, true] {
            let mut chosen: Option<Best> = None;
            for arc in lattice.arcs(u) {
                let candidate = match arc.kind {
                    ArcKind::Match => best[arc.to][0].clone(),
                    ArcKind::Edit(edit) => {
                        if after_insertion && edit.is_insertion() {
                            continue;
                        }
                        best[arc.to][usize::from(edit.is_insertion())].as_ref().map(|rest| Best {
                            matched: rest.matched
                                + u32::from(matches_gold(&edit, hypothesis, gold, case_insensitive)),
                            edits: rest.edits + 1,
                            chain: Some(Rc::new(Chain { edit, next: rest.chain.clone() })),
                        })
                    }
                };
                if let Some(candidate) = candidate {
                    if chosen.as_ref().is_none_or(|c| candidate.better_than(c)) {
                        chosen = Some(candidate);
                    }
                }
            }
            best[u][usize::from(after_insertion)] = chosen;
        }
    }
    best[0][0].take().expect("the lattice always connects source start to end")
}

fn chain_to_edits(chain: &Option<Rc<Chain>>, hypothesis: &[Token]) -> Vec<Edit> {
    let mut out = Vec::new();
    let mut cursor = chain;
    while let Some(link) = cursor {
        let e = link.edit;
        out.push(Edit::new(e.start, e.end, hypothesis[e.hyp_start..e.hyp_end].to_vec()));
        cursor = &link.next;
    }
    out
}

/// Recovers the system edit set that best agrees with `gold`. Edits are returned sorted
/// by span, with error type `UNK` and no annotator.
pub fn extract_system_edits(
    source: &Sentence,
    hypothesis: &Sentence,
    gold: &[Edit],
    params: &MatchParams,
) -> Vec<Edit> {
    let lattice = EditLattice::build(source.tokens(), hypothesis.tokens(), params.max_unchanged_words);
    let best = select_path(&lattice, hypothesis.tokens(), gold, params.case_insensitive);
    chain_to_edits(&best.chain, hypothesis.tokens())
}

/// Per-annotator match counts. The path is re-optimized for each annotator's gold set.
pub fn score_sentence(
    source: &Sentence,
    hypothesis: &Sentence,
    gold_by_annotator: &BTreeMap<u32, Vec<Edit>>,
    params: &MatchParams,
) -> BTreeMap<u32, MatchCounts> {
    let lattice = EditLattice::build(source.tokens(), hypothesis.tokens(), params.max_unchanged_words);
    gold_by_annotator
        .iter()
        .map(|(&annotator, gold)| {
            let best = select_path(&lattice, hypothesis.tokens(), gold, params.case_insensitive);
            let tp = u64::from(best.matched);
            let selected = u64::from(best.edits);
            (annotator, MatchCounts::new(tp, selected - tp, gold.len() as u64 - tp))
        })
        .collect()
}

/// Picks, sentence by sentence, the annotator whose counts maximize the running corpus
/// F-beta after they are added. Ties go to the lowest annotator id.
pub fn accumulate_best_annotator(
    per_sentence: &[BTreeMap<u32, MatchCounts>],
    beta: f64,
) -> Result<MatchCounts, ScoreError> {
    check_beta(beta)?;
    let mut total = MatchCounts::default();
    for sentence in per_sentence {
        let mut chosen: Option<(f64, MatchCounts)> = None;
        for counts in sentence.values() {
            let candidate = total + *counts;
            let f = f_beta_from_pr(candidate.precision(), candidate.recall(), beta)?;
            if chosen.is_none_or(|(best_f, _)| f > best_f) {
                chosen = Some((f, *counts));
            }
        }
        if let Some((_, counts)) = chosen {
            total += counts;
        }
    }
    Ok(total)
}

pub fn score_corpus(
    corpus: &Corpus,
    hypotheses: &HypothesisSet,
    beta: f64,
    params: &MatchParams,
) -> Result<CorpusScore, ScoreError> {
    check_beta(beta)?;
    hypotheses.check_against(corpus)?;
    let per_sentence: Vec<BTreeMap<u32, MatchCounts>> = corpus
        .sentences
        .par_iter()
        .zip(hypotheses.sentences.par_iter())
        .map(|(annotated, hyp)| score_sentence(&annotated.source, hyp, &annotated.gold, params))
        .collect();
    let counts = accumulate_best_annotator(&per_sentence, beta)?;
    Ok(CorpusScore {
        counts,
        precision: counts.precision(),
        recall: counts.recall(),
        f_beta: f_beta_from_pr(counts.precision(), counts.recall(), beta)?,
        sentences: corpus.len(),
    })
}
