use serde::Serialize;

use crate::harness::evaluate::MetricReport;

/// Mean and sample standard deviation of one metric over runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// `n - 1` denominator; 0 for a single run.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Summary { mean, std, min, max, n })
    }
}

/// Per (system, corpus) averages over runs. `f_beta` is the mean of per-run F values,
/// not F of the mean precision and recall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatedScore {
    pub system: String,
    pub corpus: String,
    pub runs: Vec<u32>,
    pub precision: Option<Summary>,
    pub recall: Option<Summary>,
    pub f_beta: Option<Summary>,
    pub gleu: Option<Summary>,
    pub corpus_wer: Option<f64>,
}

/// Groups reports by (system, corpus), keeping first-seen order.
pub fn aggregate_runs(reports: &[MetricReport]) -> Vec<AggregatedScore> {
    let mut groups: Vec<(&str, &str, Vec<&MetricReport>)> = Vec::new();
    for report in reports {
        match groups.iter_mut().find(|(s, c, _)| *s == report.system && *c == report.corpus) {
            Some((_, _, members)) => members.push(report),
            None => groups.push((&report.system, &report.corpus, vec![report])),
        }
    }
    groups
        .into_iter()
        .map(|(system, corpus, members)| {
            let collect = |f: fn(&MetricReport) -> Option<f64>| {
                let values: Vec<f64> = members.iter().filter_map(|r| f(r)).collect();
                Summary::of(&values)
            };
            AggregatedScore {
                system: system.to_owned(),
                corpus: corpus.to_owned(),
                runs: members.iter().map(|r| r.run_id).collect(),
                precision: collect(|r| r.precision),
                recall: collect(|r| r.recall),
                f_beta: collect(|r| r.f_beta),
                gleu: collect(|r| r.gleu_mean),
                corpus_wer: members.iter().find_map(|r| r.corpus_wer),
            }
        })
        .collect()
}
