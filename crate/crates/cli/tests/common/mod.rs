//! Fixture writers and a runner for the `gec-eval` binary.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gec_eval::gleu::SplitMix64;

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gec-eval"));
    cmd.env_remove("GEC_EVAL_OUT_DIR");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

/// One corpus of `n` sentences, each with a single gold edit `go -> goes` at token 3.
fn one_edit_corpus(tag: &str, n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        let _ = writeln!(out, "S the {tag} item{i} go there today .");
        let _ = writeln!(out, "A 3 4|||R:VERB:SVA|||goes|||REQUIRED|||-NONE-|||0\n");
    }
    out
}

/// Hypotheses fixing the first `correct` sentences and adding a spurious edit to the last
/// `spurious` ones.
fn one_edit_hypotheses(tag: &str, n: usize, correct: usize, spurious: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        let verb = if i < correct { "goes" } else { "go" };
        let place = if i >= n - spurious { "here" } else { "there" };
        let _ = writeln!(out, "the {tag} item{i} {verb} {place} today .");
    }
    out
}

/// (correct, spurious) hypothesis counts on one corpus.
type Counts = (usize, usize);

/// Counts (correct, spurious) per system on each corpus, out of 100 sentences each.
/// On A, T leads; on B, L leads C by 5.34 F0.5 points and T is third.
pub const FLIP_SYSTEMS: [(&str, Counts, Counts); 4] = [
    ("T", (60, 5), (48, 5)),
    ("L", (50, 10), (60, 5)),
    ("C", (40, 0), (50, 5)),
    ("S", (30, 20), (30, 10)),
];

/// Writes a 4 system x 2 corpus x 2 run manifest whose second run fixes two sentences fewer.
pub fn write_flip_fixture(dir: &Path) -> PathBuf {
    let n = 100;
    write(dir, "A.m2", &one_edit_corpus("alpha", n));
    write(dir, "B.m2", &one_edit_corpus("beta", n));
    let mut manifest = String::from(
        "metrics = [\"f_beta\", \"gleu\", \"wer\"]\n\n[params]\ngleu_iterations = 20\n\n\
         [[corpus]]\nname = \"A\"\nformat = \"m2\"\npath = \"A.m2\"\n\n\
         [[corpus]]\nname = \"B\"\nformat = \"m2\"\npath = \"B.m2\"\n",
    );
    for (system, a, b) in FLIP_SYSTEMS {
        let mut files = Vec::new();
        for (corpus, tag, (correct, spurious)) in [("A", "alpha", a), ("B", "beta", b)] {
            let mut runs = Vec::new();
            for (run, drop) in [(0, 0), (1, 2)] {
                let name = format!("{system}.{corpus}.{run}");
                write(dir, &name, &one_edit_hypotheses(tag, n, correct - drop, spurious));
                runs.push(format!("\"{name}\""));
            }
            files.push(format!("{corpus} = [{}]", runs.join(", ")));
        }
        let _ = write!(manifest, "\n[[system]]\nname = \"{system}\"\nhypotheses = {{ {} }}\n", files.join(", "));
    }
    write(dir, "flip.toml", &manifest)
}

/// Two systems on two corpora with exactly reversed rankings.
pub fn write_swap_fixture(dir: &Path) -> PathBuf {
    let n = 20;
    write(dir, "X.m2", &one_edit_corpus("x", n));
    write(dir, "Y.m2", &one_edit_corpus("y", n));
    write(dir, "P.X", &one_edit_hypotheses("x", n, 15, 0));
    write(dir, "P.Y", &one_edit_hypotheses("y", n, 5, 0));
    write(dir, "Q.X", &one_edit_hypotheses("x", n, 5, 0));
    write(dir, "Q.Y", &one_edit_hypotheses("y", n, 15, 0));
    write(
        dir,
        "swap.toml",
        "metrics = [\"f_beta\", \"wer\"]\n\n\
         [[corpus]]\nname = \"X\"\nformat = \"m2\"\npath = \"X.m2\"\n\n\
         [[corpus]]\nname = \"Y\"\nformat = \"m2\"\npath = \"Y.m2\"\n\n\
         [[system]]\nname = \"P\"\nhypotheses = { X = [\"P.X\"], Y = [\"P.Y\"] }\n\n\
         [[system]]\nname = \"Q\"\nhypotheses = { X = [\"Q.X\"], Y = [\"Q.Y\"] }\n",
    )
}

const VOCAB: [&str; 32] = [
    "the", "a", "an", "cat", "dog", "students", "teacher", "is", "are", "was", "were", "on", "in", "at", "to", "of",
    "school", "house", "book", "books", "go", "goes", "went", "have", "has", "and", "but", "because", "very", "many",
    ".", ",",
];

/// An FCE-sized single-reference M2 corpus and a noisy hypothesis file.
pub fn write_scale_fixture(dir: &Path, sentences: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = SplitMix64::new(seed);
    let mut m2 = String::new();
    let mut hyp = String::new();
    for _ in 0..sentences {
        let len = 8 + rng.next_index(23);
        let source: Vec<&str> = (0..len).map(|_| VOCAB[rng.next_index(VOCAB.len())]).collect();
        let _ = writeln!(m2, "S {}", source.join(" "));
        let mut edits = Vec::new();
        let mut pos = 0;
        for _ in 0..rng.next_index(4) {
            if pos + 2 >= len {
                break;
            }
            let start = pos + rng.next_index((len - pos - 1).min(8));
            let end = start + rng.next_index(2);
            let replacement: Vec<&str> =
                (0..rng.next_index(3)).map(|_| VOCAB[rng.next_index(VOCAB.len())]).collect();
            if replacement.is_empty() && start == end {
                continue;
            }
            edits.push((start, end, replacement));
            pos = end + 1;
        }
        if edits.is_empty() {
            m2.push_str("A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n");
        }
        for (s, e, r) in &edits {
            let repl = if r.is_empty() { "-NONE-".to_owned() } else { r.join(" ") };
            let _ = writeln!(m2, "A {s} {e}|||R:OTHER|||{repl}|||REQUIRED|||-NONE-|||0");
        }
        m2.push('\n');

        // The hypothesis applies each gold edit with probability 1/2 and sometimes adds noise.
        let mut out: Vec<&str> = Vec::new();
        let mut cursor = 0;
        for (s, e, r) in &edits {
            out.extend(&source[cursor..*s]);
            if rng.next_index(2) == 0 {
                out.extend(r.iter().copied());
            } else {
                out.extend(&source[*s..*e]);
            }
            cursor = *e;
        }
        out.extend(&source[cursor..]);
        if rng.next_index(4) == 0 && !out.is_empty() {
            let i = rng.next_index(out.len());
            out[i] = VOCAB[rng.next_index(VOCAB.len())];
        }
        let _ = writeln!(hyp, "{}", out.join(" "));
    }
    (write(dir, "scale.m2", &m2), write(dir, "scale.hyp", &hyp))
}
