use std::fs;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Corpus, HypothesisSet};
use crate::error::{Error, Result, ScoreError};
use crate::gleu::gleu_corpus;
use crate::harness::manifest::{Metric, MetricParams, RunManifest};
use crate::maxmatch::{score_corpus, MatchCounts};
use crate::token::Sentence;
use crate::wer::{corpus_wer, WerStats};

/// Scores of one system run on one corpus. Fractions in `[0, 1]`; `None` when not requested
/// or not computable for the corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub system: String,
    pub corpus: String,
    pub run_id: u32,
    pub sentences: usize,
    pub counts: Option<MatchCounts>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_beta: Option<f64>,
    pub gleu_mean: Option<f64>,
    pub gleu_std: Option<f64>,
    /// WER of the gold annotation, repeated on each row as context.
    pub corpus_wer: Option<f64>,
}

/// A corpus with everything the metrics need precomputed once.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub corpus: Corpus,
    pub sources: Vec<Sentence>,
    pub references: Vec<Vec<Sentence>>,
    pub wer: Option<WerStats>,
}

impl PreparedCorpus {
    pub fn new(corpus: Corpus, params: &MetricParams) -> Self {
        let sources = corpus.sources();
        let references = corpus.sentences.par_iter().map(|s| s.references()).collect();
        let wer = corpus_wer(&corpus, params.ref_policy).ok();
        PreparedCorpus { corpus, sources, references, wer }
    }
}

/// Computes the requested metrics for one hypothesis set.
pub fn score_hypotheses(
    prepared: &PreparedCorpus,
    hypotheses: &HypothesisSet,
    metrics: &[Metric],
    params: &MetricParams,
) -> Result<MetricReport, ScoreError> {
    let corpus = &prepared.corpus;
    hypotheses.check_against(corpus)?;
    let mut report = MetricReport {
        system: hypotheses.system_name.clone(),
        corpus: corpus.name.clone(),
        run_id: hypotheses.run_id,
        sentences: corpus.len(),
        counts: None,
        precision: None,
        recall: None,
        f_beta: None,
        gleu_mean: None,
        gleu_std: None,
        corpus_wer: None,
    };
    if metrics.contains(&Metric::FBeta) && corpus.has_edit_annotations {
        let score = score_corpus(corpus, hypotheses, params.beta, &params.matching())?;
        report.counts = Some(score.counts);
        report.precision = Some(score.precision);
        report.recall = Some(score.recall);
        report.f_beta = Some(score.f_beta);
    }
    if metrics.contains(&Metric::Gleu) {
        let gleu = gleu_corpus(&prepared.sources, &hypotheses.sentences, &prepared.references, &params.gleu())?;
        report.gleu_mean = Some(gleu.mean);
        report.gleu_std = Some(gleu.std);
    }
    if metrics.contains(&Metric::Wer) {
        report.corpus_wer = prepared.wer.map(|w| w.wer_f64());
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryFailure {
    pub system: String,
    pub corpus: String,
    pub run_id: Option<u32>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub corpora: Vec<PreparedCorpus>,
    pub reports: Vec<MetricReport>,
    pub failures: Vec<EntryFailure>,
}

/// Scores every (system, corpus, run) triple of the manifest.
///
/// Manifest and corpus problems abort with an error. Problems with individual hypothesis
/// files are collected as failures; results come back in manifest order regardless of
/// how the work was scheduled.
pub fn evaluate(manifest: &RunManifest) -> Result<Evaluation> {
    let problems = manifest.check_structure();
    if !problems.is_empty() {
        return Err(Error::Manifest(problems.join("; ")));
    }
    let corpora = manifest
        .corpora
        .iter()
        .map(|entry| manifest.load_corpus(entry).map(|c| PreparedCorpus::new(c, &manifest.params)))
        .collect::<Result<Vec<_>>>()?;

    enum Job<'a> {
        Score { system: &'a str, corpus: usize, run_id: u32, path: std::path::PathBuf },
        Missing { system: &'a str, corpus: usize },
    }
    let mut jobs = Vec::new();
    for system in &manifest.systems {
        let runs = system.runs();
        for (ci, entry) in manifest.corpora.iter().enumerate() {
            match system.hypotheses.get(&entry.name) {
                Some(files) => {
                    for (&run_id, path) in runs.iter().zip(files) {
                        jobs.push(Job::Score { system: &system.name, corpus: ci, run_id, path: manifest.resolve(path) });
                    }
                }
                None => jobs.push(Job::Missing { system: &system.name, corpus: ci }),
            }
        }
    }

    let outcomes: Vec<std::result::Result<MetricReport, EntryFailure>> = jobs
        .par_iter()
        .map(|job| match job {
            Job::Missing { system, corpus } => Err(EntryFailure {
                system: system.to_string(),
                corpus: corpora[*corpus].corpus.name.clone(),
                run_id: None,
                message: "no hypothesis files listed for this corpus".to_owned(),
            }),
            Job::Score { system, corpus, run_id, path } => {
                let prepared = &corpora[*corpus];
                let fail = |message: String| EntryFailure {
                    system: system.to_string(),
                    corpus: prepared.corpus.name.clone(),
                    run_id: Some(*run_id),
                    message,
                };
                let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
                let hyp = HypothesisSet::from_text(*system, *run_id, &text);
                score_hypotheses(prepared, &hyp, &manifest.metrics, &manifest.params)
                    .map_err(|e| fail(format!("{}: {e}", path.display())))
            }
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => reports.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(Evaluation { corpora, reports, failures })
}
