//! Synthetic workloads shared by the benchmarks.

use std::collections::BTreeMap;

use gec_eval::gleu::SplitMix64;
use gec_eval::{apply_edits, AnnotatedSentence, Corpus, Edit, HypothesisSet, Sentence, Token};

const VOCAB: [&str; 24] = [
    "the", "a", "cat", "dog", "is", "are", "was", "on", "in", "at", "mat", "house", "he", "she", "they", "go", "goes",
    "went", "to", "school", "and", "but", ".", ",",
];

fn word(rng: &mut SplitMix64) -> Token {
    Token::new(VOCAB[rng.next_index(VOCAB.len())]).expect("vocabulary words are valid tokens")
}

fn random_edits(rng: &mut SplitMix64, len: usize, max_edits: usize) -> Vec<Edit> {
    let mut edits = Vec::new();
    let mut pos = 0;
    for _ in 0..rng.next_index(max_edits + 1) {
        if pos >= len {
            break;
        }
        let start = pos + rng.next_index((len - pos).min(6));
        let end = (start + rng.next_index(3)).min(len);
        let replacement = (0..rng.next_index(3)).map(|_| word(rng)).collect::<Vec<_>>();
        if start == end && replacement.is_empty() {
            pos = start + 1;
            continue;
        }
        edits.push(Edit::new(start, end, replacement));
        pos = end + 1;
    }
    edits
}

/// A two-annotator corpus of `n` sentences and a hypothesis set that applies some gold
/// edits and adds some noise.
pub fn synthetic(n: usize, seed: u64) -> (Corpus, HypothesisSet) {
    let mut rng = SplitMix64::new(seed);
    let mut sentences = Vec::with_capacity(n);
    let mut hyps = Vec::with_capacity(n);
    for _ in 0..n {
        let len = 8 + rng.next_index(20);
        let source: Sentence = (0..len).map(|_| word(&mut rng)).collect();
        let mut gold = BTreeMap::new();
        for annotator in 0..2u32 {
            let edits: Vec<Edit> =
                random_edits(&mut rng, len, 3).into_iter().map(|e| e.with_annotator(annotator)).collect();
            gold.insert(annotator, edits);
        }
        let hyp_edits = if rng.next_index(2) == 0 { gold[&0].clone() } else { random_edits(&mut rng, len, 3) };
        hyps.push(apply_edits(&source, &hyp_edits).expect("generated edits are disjoint"));
        sentences.push(AnnotatedSentence::new(source, gold).expect("generated edits are disjoint"));
    }
    (Corpus::new("synthetic", sentences), HypothesisSet::new("noisy", 0, hyps))
}
