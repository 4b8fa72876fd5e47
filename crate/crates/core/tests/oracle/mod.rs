//! Slow, independent reference implementations used to check the library.
//!
//! Shared between test targets with `#[path]`, so not every item is used by every target.
#![allow(dead_code)]

use std::collections::HashMap;

/// Levenshtein distance by plain recursion (no table).
pub fn levenshtein_recursive<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = levenshtein_recursive(ra, rb) + usize::from(x != y);
            let del = levenshtein_recursive(ra, b) + 1;
            let ins = levenshtein_recursive(a, rb) + 1;
            sub.min(del).min(ins)
        }
    }
}

/// Cost and the fewest matched tokens over all minimum-cost alignments of `a` and `b`.
fn cost_and_min_matches(a: &[&str], b: &[&str]) -> (usize, usize) {
    let mut memo = HashMap::new();
    fn go<'a>(a: &[&'a str], b: &[&'a str], memo: &mut HashMap<(usize, usize), (usize, usize)>) -> (usize, usize) {
        if let Some(&v) = memo.get(&(a.len(), b.len())) {
            return v;
        }
        let v = match (a.split_first(), b.split_first()) {
            (None, _) => (b.len(), 0),
            (_, None) => (a.len(), 0),
            (Some((x, ra)), Some((y, rb))) => {
                let (c, m) = go(ra, rb, memo);
                let diag = if x == y { (c, m + 1) } else { (c + 1, m) };
                let (c, m) = go(ra, b, memo);
                let del = (c + 1, m);
                let (c, m) = go(a, rb, memo);
                let ins = (c + 1, m);
                diag.min(del).min(ins)
            }
        };
        memo.insert((a.len(), b.len()), v);
        v
    }
    go(a, b, &mut memo)
}

/// Best (tp, -edits) from a search state, keyed by (i, j, after_insertion, budget).
type Memo = HashMap<(usize, usize, bool, usize), Option<(i64, i64)>>;

/// A gold edit as plain data: source span and replacement tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldEdit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
}

/// Brute-force MaxMatch counts `(tp, fp, fn)` for one sentence and one annotator.
///
/// Enumerates every way to cut `(source, hypothesis)` into consecutive segments, each
/// either a single equal token or an edit whose spans differ, subject to:
/// the segment costs add up to the global edit distance; each edit has a minimum-cost
/// alignment with at most `max_unchanged` equal tokens; two pure insertions are never
/// adjacent. Among those, maximizes matched gold edits, then minimizes edit count.
pub fn maxmatch_counts(
    source: &[&str],
    hypothesis: &[&str],
    gold: &[GoldEdit],
    max_unchanged: usize,
) -> (u64, u64, u64) {
    let total = cost_and_min_matches(source, hypothesis).0;
    let mut memo = Memo::new();
    let best = search(source, hypothesis, gold, max_unchanged, 0, 0, false, total, &mut memo)
        .expect("the all-edits decomposition always exists");
    let (tp, neg_edits) = best;
    let edits = -neg_edits;
    (tp as u64, (edits - tp) as u64, gold.len() as u64 - tp as u64)
}

#[allow(clippy::too_many_arguments)]
fn search(
    src: &[&str],
    hyp: &[&str],
    gold: &[GoldEdit],
    k: usize,
    i: usize,
    j: usize,
    after_insertion: bool,
    budget: usize,
    memo: &mut Memo,
) -> Option<(i64, i64)> {
    if i == src.len() && j == hyp.len() {
        return (budget == 0).then_some((0, 0));
    }
    if let Some(&v) = memo.get(&(i, j, after_insertion, budget)) {
        return v;
    }
    let mut best: Option<(i64, i64)> = None;
    let mut consider = |candidate: Option<(i64, i64)>| {
        if let Some(c) = candidate {
            if best.is_none_or(|b| c > b) {
                best = Some(c);
            }
        }
    };
    if i < src.len() && j < hyp.len() && src[i] == hyp[j] {
        consider(search(src, hyp, gold, k, i + 1, j + 1, false, budget, memo));
    }
    for i2 in i..=src.len() {
        for j2 in j..=hyp.len() {
            let (s, h) = (&src[i..i2], &hyp[j..j2]);
            if s == h {
                continue;
            }
            let insertion = s.is_empty();
            if insertion && after_insertion {
                continue;
            }
            let (cost, matches) = cost_and_min_matches(s, h);
            if cost > budget || matches > k {
                continue;
            }
            let hit = gold.iter().any(|g| {
                g.start == i && g.end == i2 && g.replacement.len() == h.len() && g.replacement.iter().zip(h).all(|(a, b)| a == b)
            });
            let rest = search(src, hyp, gold, k, i2, j2, insertion, budget - cost, memo);
            consider(rest.map(|(tp, neg)| (tp + i64::from(hit), neg - 1)));
        }
    }
    memo.insert((i, j, after_insertion, budget), best);
    best
}

/// Applies non-overlapping gold edits to a source sentence.
pub fn apply(source: &[&str], edits: &[GoldEdit]) -> Vec<String> {
    let mut sorted: Vec<&GoldEdit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    let mut out = Vec::new();
    let mut pos = 0;
    for e in sorted {
        out.extend(source[pos..e.start].iter().map(|s| s.to_string()));
        out.extend(e.replacement.iter().cloned());
        pos = e.end;
    }
    out.extend(source[pos..].iter().map(|s| s.to_string()));
    out
}

/// F-beta straight from the definition, 0 when undefined.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

fn ngram_counts<'a>(tokens: &[&'a str], n: usize) -> HashMap<Vec<&'a str>, i64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

/// One GLEU evaluation with a fixed reference per sentence, no smoothing.
pub fn gleu_fixed(sources: &[Vec<&str>], hypotheses: &[Vec<&str>], references: &[Vec<&str>], order: usize) -> f64 {
    let mut log_sum = 0.0;
    for n in 1..=order {
        let (mut num, mut den) = (0i64, 0i64);
        for ((s, h), r) in sources.iter().zip(hypotheses).zip(references) {
            let (sc, hc, rc) = (ngram_counts(s, n), ngram_counts(h, n), ngram_counts(r, n));
            for (g, &hg) in &hc {
                let rg = rc.get(g).copied().unwrap_or(0);
                let sg = sc.get(g).copied().unwrap_or(0);
                num += hg.min(rg) - (hg.min(sg) - hg.min(rg)).max(0);
                den += hg;
            }
        }
        let p = num.max(0) as f64 / den.max(1) as f64;
        if p == 0.0 {
            return 0.0;
        }
        log_sum += p.ln() / order as f64;
    }
    let c: usize = hypotheses.iter().map(Vec::len).sum();
    let r: usize = references.iter().map(Vec::len).sum();
    let bp = if c == 0 {
        0.0
    } else if c >= r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    bp * log_sum.exp()
}

/// Deterministic instance generator on top of the library's portable PRNG.
pub struct Rng(gec_eval::gleu::SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(gec_eval::gleu::SplitMix64::new(seed))
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.0.next_index(bound)
    }
}

const WORDS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// One MaxMatch instance: source and hypothesis of at most 8 tokens, at most 3 gold edits.
#[derive(Debug, Clone)]
pub struct Instance {
    pub source: Vec<&'static str>,
    pub hypothesis: Vec<&'static str>,
    pub gold: Vec<GoldEdit>,
}

fn random_words(rng: &mut Rng, max: usize) -> Vec<&'static str> {
    let n = rng.below(max + 1);
    (0..n).map(|_| WORDS[rng.below(WORDS.len())]).collect()
}

pub fn random_instance(rng: &mut Rng) -> Instance {
    let source = random_words(rng, 8);
    let mut gold = Vec::new();
    let mut pos = 0;
    for _ in 0..rng.below(4) {
        if pos > source.len() {
            break;
        }
        let start = pos + rng.below(source.len() - pos + 1);
        let end = (start + rng.below(3)).min(source.len());
        let replacement: Vec<String> = random_words(rng, 2).into_iter().map(String::from).collect();
        if replacement.iter().map(String::as_str).eq(source[start..end].iter().copied()) {
            continue;
        }
        gold.push(GoldEdit { start, end, replacement });
        // Leave a gap so no two edits touch at the same insertion point.
        pos = end + 1;
    }
    let hypothesis = loop {
        let hyp: Vec<&'static str> = match rng.below(3) {
            0 => {
                let applied: Vec<GoldEdit> = gold.iter().filter(|_| rng.below(2) == 0).cloned().collect();
                apply(&source, &applied).iter().map(|w| *WORDS.iter().find(|x| *x == w).unwrap()).collect()
            }
            1 => {
                let mut h = source.clone();
                for _ in 0..1 + rng.below(3) {
                    match rng.below(3) {
                        0 if !h.is_empty() => {
                            let i = rng.below(h.len());
                            h[i] = WORDS[rng.below(WORDS.len())];
                        }
                        1 if !h.is_empty() => {
                            h.remove(rng.below(h.len()));
                        }
                        _ => h.insert(rng.below(h.len() + 1), WORDS[rng.below(WORDS.len())]),
                    }
                }
                h
            }
            _ => random_words(rng, 8),
        };
        if hyp.len() <= 8 {
            break hyp;
        }
    };
    Instance { source, hypothesis, gold }
}
