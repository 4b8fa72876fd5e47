//! Corpus-level GLEU.
//!
//! For each order `n` and sentence, with `h`, `r`, `s` the counts of an n-gram in the
//! hypothesis, the reference and the source:
//!
//! ```text
//! numerator   = Σ min(h, r) − Σ max(0, min(h, s) − min(h, r))
//! denominator = Σ h
//! p_n         = max(0, Σ_sentences numerator) / max(1, Σ_sentences denominator)
//! GLEU        = BP · exp(Σ_n ln(p_n) / N)
//! ```
//!
//! The brevity penalty is `exp(1 − r/c)` when the total hypothesis length `c` is below
//! the total reference length `r`, 1 otherwise, and 0 when `c = 0`. Any `p_n = 0` gives 0.
//!
//! Multi-reference corpora are scored by sampling one reference per sentence on every
//! iteration. Sampling uses SplitMix64 seeded with `seed + iteration`; the reference
//! index for a sentence with `k` references is `(next_u64() as u128 * k) >> 64`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ScoreError;
use crate::token::{Sentence, Token};

pub const DEFAULT_ORDER: usize = 4;
pub const DEFAULT_ITERATIONS: usize = 500;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GleuParams {
    pub order: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Add one to numerator and denominator for orders 2 and up.
    pub smoothing: bool,
}

impl Default for GleuParams {
    fn default() -> Self {
        GleuParams { order: DEFAULT_ORDER, iterations: DEFAULT_ITERATIONS, seed: DEFAULT_SEED, smoothing: false }
    }
}

/// SplitMix64 (Steele, Lea & Flood). Portable and fully specified by its constants.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..bound` by multiply-shift.
    pub fn next_index(&mut self, bound: usize) -> usize {
        ((u128::from(self.next_u64()) * bound as u128) >> 64) as usize
    }
}

/// Summed n-gram statistics; numerators may go negative before flooring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramStats {
    pub numerators: Vec<i64>,
    pub denominators: Vec<u64>,
    pub hypothesis_len: u64,
    pub reference_len: u64,
}

impl NgramStats {
    pub fn zero(order: usize) -> Self {
        NgramStats {
            numerators: vec![0; order],
            denominators: vec![0; order],
            hypothesis_len: 0,
            reference_len: 0,
        }
    }

    pub fn add(&mut self, other: &NgramStats) {
        for (a, b) in self.numerators.iter_mut().zip(&other.numerators) {
            *a += b;
        }
        for (a, b) in self.denominators.iter_mut().zip(&other.denominators) {
            *a += b;
        }
        self.hypothesis_len += other.hypothesis_len;
        self.reference_len += other.reference_len;
    }

    /// Floored precision per order.
    pub fn precisions(&self, smoothing: bool) -> Vec<f64> {
        self.numerators
            .iter()
            .zip(&self.denominators)
            .enumerate()
            .map(|(i, (&num, &den))| {
                let (num, den) = (num.max(0) as f64, den.max(1) as f64);
                if smoothing && i >= 1 {
                    (num + 1.0) / (den + 1.0)
                } else {
                    num / den
                }
            })
            .collect()
    }

    pub fn score(&self, smoothing: bool) -> f64 {
        let precisions = self.precisions(smoothing);
        if precisions.contains(&0.0) || self.hypothesis_len == 0 {
            return 0.0;
        }
        let (c, r) = (self.hypothesis_len as f64, self.reference_len as f64);
        let log_bp = if c >= r { 0.0 } else { 1.0 - r / c };
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / precisions.len() as f64;
        (log_bp + log_mean).exp()
    }
}

fn ngram_counts(tokens: &[Token], n: usize) -> HashMap<&[Token], i64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Statistics contributed by one sentence against one reference.
pub fn sentence_stats(source: &Sentence, hypothesis: &Sentence, reference: &Sentence, order: usize) -> NgramStats {
    let mut stats = NgramStats::zero(order);
    stats.hypothesis_len = hypothesis.len() as u64;
    stats.reference_len = reference.len() as u64;
    for n in 1..=order {
        let hyp = ngram_counts(hypothesis.tokens(), n);
        let refs = ngram_counts(reference.tokens(), n);
        let src = ngram_counts(source.tokens(), n);
        let mut numerator = 0i64;
        let mut denominator = 0u64;
        for (gram, &h) in &hyp {
            let matched = h.min(refs.get(gram).copied().unwrap_or(0));
            let kept_source = h.min(src.get(gram).copied().unwrap_or(0));
            numerator += matched - (kept_source - matched).max(0);
            denominator += h as u64;
        }
        stats.numerators[n - 1] = numerator;
        stats.denominators[n - 1] = denominator;
    }
    stats
}

fn check_order(order: usize) -> Result<(), ScoreError> {
    if order == 0 {
        Err(ScoreError::InvalidOrder)
    } else {
        Ok(())
    }
}

/// One GLEU evaluation with exactly one reference per sentence.
pub fn gleu_iteration(
    sources: &[Sentence],
    hypotheses: &[Sentence],
    references: &[Sentence],
    order: usize,
    smoothing: bool,
) -> Result<f64, ScoreError> {
    check_order(order)?;
    if sources.len() != hypotheses.len() || sources.len() != references.len() {
        return Err(ScoreError::InputLengthMismatch {
            sources: sources.len(),
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    let mut total = NgramStats::zero(order);
    for ((s, h), r) in sources.iter().zip(hypotheses).zip(references) {
        total.add(&sentence_stats(s, h, r, order));
    }
    Ok(total.score(smoothing))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GleuScore {
    pub mean: f64,
    /// Population standard deviation over iterations.
    pub std: f64,
    pub iterations: usize,
}

/// Sampled multi-reference GLEU. `reference_sets[i]` holds every reference of sentence `i`.
pub fn gleu_corpus(
    sources: &[Sentence],
    hypotheses: &[Sentence],
    reference_sets: &[Vec<Sentence>],
    params: &GleuParams,
) -> Result<GleuScore, ScoreError> {
    check_order(params.order)?;
    if sources.len() != hypotheses.len() || sources.len() != reference_sets.len() {
        return Err(ScoreError::InputLengthMismatch {
            sources: sources.len(),
            hypotheses: hypotheses.len(),
            references: reference_sets.len(),
        });
    }
    if let Some(index) = reference_sets.iter().position(Vec::is_empty) {
        return Err(ScoreError::EmptyReferenceSet { index });
    }
    // Sentence statistics depend only on which reference is drawn, so compute them once.
    let per_reference: Vec<Vec<NgramStats>> = sources
        .par_iter()
        .zip(hypotheses.par_iter())
        .zip(reference_sets.par_iter())
        .map(|((s, h), refs)| refs.iter().map(|r| sentence_stats(s, h, r, params.order)).collect())
        .collect();

    let single_reference = reference_sets.iter().all(|refs| refs.len() == 1);
    let iterations = if single_reference { 1 } else { params.iterations.max(1) };
    let scores: Vec<f64> = (0..iterations)
        .into_par_iter()
        .map(|iteration| {
            let mut rng = SplitMix64::new(params.seed.wrapping_add(iteration as u64));
            let mut total = NgramStats::zero(params.order);
            for options in &per_reference {
                let pick = if options.len() == 1 { 0 } else { rng.next_index(options.len()) };
                total.add(&options[pick]);
            }
            total.score(params.smoothing)
        })
        .collect();

    let mean = scores.iter().sum::<f64>() / iterations as f64;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / iterations as f64;
    Ok(GleuScore { mean, std: var.sqrt(), iterations })
}
