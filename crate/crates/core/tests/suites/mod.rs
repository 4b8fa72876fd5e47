//! Property suites shared by the core integration tests and the acceptance target.
//! Each returns a short summary on success and a description of the first failure otherwise.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gec_eval::gleu::{gleu_iteration, sentence_stats};
use gec_eval::{
    corpus_wer, edit_distance, gleu_corpus, score_sentence, AnnotatedSentence, Corpus, Edit, GleuParams, MatchParams,
    RefPolicy, Sentence, Token,
};
use num_rational::Ratio;

use crate::oracle::{gleu_fixed, levenshtein_recursive, maxmatch_counts, random_instance, GoldEdit, Instance, Rng};

pub type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

pub fn sentence(words: &[&str]) -> Sentence {
    words.iter().map(|w| Token::new(*w).unwrap()).collect()
}

fn gold_edits(gold: &[GoldEdit]) -> Vec<Edit> {
    gold.iter()
        .map(|g| Edit::new(g.start, g.end, g.replacement.iter().map(|w| Token::new(w.as_str()).unwrap()).collect()))
        .collect()
}

fn library_counts(instance: &Instance, k: usize) -> (u64, u64, u64) {
    let annotated = AnnotatedSentence::new(sentence(&instance.source), BTreeMap::from([(0, gold_edits(&instance.gold))]))
        .expect("generated gold edits are valid");
    let params = MatchParams { max_unchanged_words: k, case_insensitive: false };
    let c = score_sentence(&annotated.source, &sentence(&instance.hypothesis), &annotated.gold, &params)[&0];
    (c.tp, c.fp, c.fn_)
}

/// `score_sentence` against the brute-force decomposition oracle.
pub fn maxmatch_oracle(cases: usize, seed: u64) -> Outcome {
    let mut rng = Rng::new(seed);
    let (mut with_tp, mut with_fp) = (0, 0);
    for case in 0..cases {
        let instance = random_instance(&mut rng);
        let k = [2, 2, 1, 0][case % 4];
        let expected = maxmatch_counts(&instance.source, &instance.hypothesis, &instance.gold, k);
        let got = library_counts(&instance, k);
        ensure!(got == expected, "case {case} (k={k}) {instance:?}: library {got:?}, oracle {expected:?}");
        with_tp += usize::from(got.0 > 0);
        with_fp += usize::from(got.1 > 0);
    }
    ensure!(with_tp * 10 > cases && with_fp * 5 > cases, "weak generator: tp>0 in {with_tp}, fp>0 in {with_fp}");
    Ok(format!("{cases} instances equal; {with_tp} with tp>0, {with_fp} with fp>0"))
}

fn random_tokens(rng: &mut Rng, max: usize) -> Vec<&'static str> {
    const W: [&str; 4] = ["a", "b", "c", "d"];
    let n = rng.below(max + 1);
    (0..n).map(|_| W[rng.below(W.len())]).collect()
}

/// Edit distance against plain recursion, metric axioms, bounds, and the worked example.
pub fn wer_suite(cases: usize, seed: u64) -> Outcome {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let (x, y, z) = (random_tokens(&mut rng, 7), random_tokens(&mut rng, 7), random_tokens(&mut rng, 7));
        let (sx, sy, sz) = (sentence(&x), sentence(&y), sentence(&z));
        let d = edit_distance(&sx, &sy);
        ensure!(d == levenshtein_recursive(&x, &y), "case {case}: d({x:?}, {y:?}) = {d}, oracle differs");
        ensure!(d == edit_distance(&sy, &sx), "case {case}: asymmetric");
        ensure!((d == 0) == (x == y), "case {case}: identity of indiscernibles");
        ensure!(
            edit_distance(&sx, &sz) <= d + edit_distance(&sy, &sz),
            "case {case}: triangle inequality fails for {x:?} {y:?} {z:?}"
        );
        ensure!(d <= x.len().max(y.len()) && d >= x.len().abs_diff(y.len()), "case {case}: bounds");
    }

    let src = sentence(&["a", "b", "c"]);
    let gold = BTreeMap::from([(0, vec![Edit::new(1, 2, vec![Token::new("x").unwrap()])])]);
    let corpus = Corpus::new("one", vec![AnnotatedSentence::new(src, gold).unwrap()]);
    let wer = corpus_wer(&corpus, RefPolicy::First).map_err(|e| e.to_string())?.wer();
    ensure!(wer == Ratio::new(1, 3), "single-sentence WER {wer}, expected 1/3");

    // min never exceeds first on random two-annotator corpora.
    for case in 0..200 {
        let mut sentences = Vec::new();
        for _ in 0..3 {
            let inst_a = random_instance(&mut rng);
            let source = sentence(&inst_a.source);
            let mut second = random_instance(&mut rng).gold;
            second.retain(|g| g.end <= inst_a.source.len());
            let gold = BTreeMap::from([(0, gold_edits(&inst_a.gold)), (1, gold_edits(&second))]);
            match AnnotatedSentence::new(source, gold) {
                Ok(s) => sentences.push(s),
                Err(_) => continue,
            }
        }
        let corpus = Corpus::new("c", sentences);
        if let (Ok(first), Ok(min)) = (corpus_wer(&corpus, RefPolicy::First), corpus_wer(&corpus, RefPolicy::Min)) {
            ensure!(min.wer() <= first.wer(), "case {case}: min policy above first");
        }
    }
    Ok(format!("{cases} pairs equal the recursive oracle; axioms hold; 'a b c' -> 'a x c' gives 1/3"))
}

fn sents(lines: &[&str]) -> Vec<Sentence> {
    lines.iter().map(|l| gec_eval::tokenize(l)).collect()
}

fn words<'a>(lines: &[&'a str]) -> Vec<Vec<&'a str>> {
    lines.iter().map(|l| l.split_whitespace().collect()).collect()
}

/// GLEU: fixed points, the uncorrected-error fixture, determinism, exhaustive bounds on
/// a 2×2 fixture, range, and agreement with the n-gram oracle.
pub fn gleu_suite(seed: u64) -> Outcome {
    let params = GleuParams::default();

    // Perfect hypotheses.
    let refs = sents(&["the cat sat on the mat .", "she goes to school every day ."]);
    let srcs = sents(&["the cat sit on mat .", "she go to school everyday ."]);
    let perfect = gleu_corpus(&srcs, &refs, &refs.iter().map(|r| vec![r.clone()]).collect::<Vec<_>>(), &params)
        .map_err(|e| e.to_string())?;
    ensure!(perfect.mean == 1.0 && perfect.std == 0.0, "perfect hypothesis scored {perfect:?}");

    // Uncorrected error: p_1 = (1 - 1) / 2 = 0, so GLEU = 0. The correction scores 1 with
    // N = 2; at N = 4 the two-token sentence has no 3-grams and p_3 = 0 / max(1, 0) = 0.
    let (s, r, h) = (sents(&["a b"]), sents(&["a c"]), sents(&["a b"]));
    let stats = sentence_stats(&s[0], &h[0], &r[0], 4);
    ensure!(stats.numerators[0] == 0 && stats.denominators[0] == 2, "unigram stats {stats:?}");
    let uncorrected = gleu_iteration(&s, &h, &r, 4, false).map_err(|e| e.to_string())?;
    let corrected = gleu_iteration(&s, &r, &r, 2, false).map_err(|e| e.to_string())?;
    ensure!(uncorrected == 0.0 && corrected == 1.0, "fixture scored {uncorrected} / {corrected}");

    // 2×2 fixture: two sentences, two references each.
    let sources = ["the boy go to school by bus every day .", "i has many friend in my city ."];
    let references = [
        ["the boy goes to school by bus every day .", "the boy went to school by bus every day ."],
        ["i have many friends in my city .", "i have a lot of friends in my city ."],
    ];
    let hypotheses = ["the boy goes to school by bus every day .", "i have many friend in my city ."];
    let src_w = words(&sources);
    let hyp_w = words(&hypotheses);
    let mut exhaustive = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let chosen = words(&[references[0][a], references[1][b]]);
            exhaustive.push(gleu_fixed(&src_w, &hyp_w, &chosen, 4));
        }
    }
    let lo = exhaustive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = exhaustive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ref_sets: Vec<Vec<Sentence>> = references.iter().map(|pair| sents(pair)).collect();
    let sampled_params = GleuParams { iterations: 500, seed: 1, ..GleuParams::default() };
    let sampled = gleu_corpus(&sents(&sources), &sents(&hypotheses), &ref_sets, &sampled_params)
        .map_err(|e| e.to_string())?;
    ensure!(lo > 0.0 && lo < hi, "degenerate fixture bounds [{lo}, {hi}]");
    ensure!(lo <= sampled.mean && sampled.mean <= hi, "sampled mean {} outside [{lo}, {hi}]", sampled.mean);
    let again = gleu_corpus(&sents(&sources), &sents(&hypotheses), &ref_sets, &sampled_params)
        .map_err(|e| e.to_string())?;
    ensure!(
        again.mean.to_bits() == sampled.mean.to_bits() && again.std.to_bits() == sampled.std.to_bits(),
        "same seed gave {again:?} then {sampled:?}"
    );

    // Random corpora: range, and single-reference agreement with the oracle.
    let mut rng = Rng::new(seed);
    for case in 0..300 {
        let n = 1 + rng.below(4);
        let mut s = Vec::new();
        let mut h = Vec::new();
        let mut r = Vec::new();
        for _ in 0..n {
            s.push(random_tokens(&mut rng, 7));
            h.push(random_tokens(&mut rng, 7));
            r.push(random_tokens(&mut rng, 7));
        }
        let to_sents = |v: &Vec<Vec<&str>>| v.iter().map(|w| sentence(w)).collect::<Vec<_>>();
        let lib = gleu_iteration(&to_sents(&s), &to_sents(&h), &to_sents(&r), 2, false).map_err(|e| e.to_string())?;
        let expected = gleu_fixed(&s, &h, &r, 2);
        ensure!((lib - expected).abs() < 1e-12, "case {case}: library {lib}, oracle {expected}");
        ensure!((0.0..=1.0).contains(&lib), "case {case}: out of range {lib}");
        let ref_sets: Vec<Vec<Sentence>> = r.iter().map(|w| vec![sentence(w), sentence(&h[0])]).collect();
        let sampled = gleu_corpus(
            &to_sents(&s),
            &to_sents(&h),
            &ref_sets,
            &GleuParams { order: 2, iterations: 20, seed: case as u64, smoothing: false },
        )
        .map_err(|e| e.to_string())?;
        ensure!((0.0..=1.0).contains(&sampled.mean), "case {case}: sampled mean out of range");
    }
    Ok(format!("fixed points hold; 2x2 sampled mean {:.4} within [{lo:.4}, {hi:.4}]; 300 random corpora match", sampled.mean))
}
