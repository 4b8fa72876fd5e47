//! System scores on the corpora with the lowest and highest gold WER.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::ScoreError;
use crate::harness::aggregate::AggregatedScore;
use crate::harness::report::format_score;
use crate::wer::CorpusProperties;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeCorpus {
    pub corpus: String,
    pub wer: f64,
    pub wer_percent: String,
    /// Other corpora with exactly the same WER, passed over by name order.
    pub tied_with: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeRow {
    pub system: String,
    pub low: Option<Prf>,
    pub high: Option<Prf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WerExtremes {
    pub low: ExtremeCorpus,
    pub high: ExtremeCorpus,
    pub rows: Vec<ExtremeRow>,
}

fn pick(candidates: &[(&str, Ratio<u64>, String)], best: Ratio<u64>) -> ExtremeCorpus {
    let mut names: Vec<&str> = candidates.iter().filter(|c| c.1 == best).map(|c| c.0).collect();
    names.sort_unstable();
    let chosen = candidates.iter().find(|c| c.0 == names[0]).expect("chosen corpus is a candidate");
    ExtremeCorpus {
        corpus: chosen.0.to_owned(),
        wer: *best.numer() as f64 / *best.denom() as f64,
        wer_percent: chosen.2.clone(),
        tied_with: names[1..].iter().map(|s| s.to_string()).collect(),
    }
}

/// Finds the min and max WER corpora (exact rational comparison; ties go to the lower
/// name) and lines up each system's mean P/R/F on both.
pub fn wer_extremes_report(
    aggregated: &[AggregatedScore],
    properties: &[CorpusProperties],
) -> Result<WerExtremes, ScoreError> {
    let candidates: Vec<(&str, Ratio<u64>, String)> = properties
        .iter()
        .filter_map(|p| p.wer.map(|w| (p.name.as_str(), w.wer(), w.percent_string())))
        .collect();
    if candidates.len() < 2 {
        return Err(ScoreError::TooFewCorpora { needed: 2, got: candidates.len() });
    }
    let min = candidates.iter().map(|c| c.1).min().expect("non-empty");
    let max = candidates.iter().map(|c| c.1).max().expect("non-empty");
    let low = pick(&candidates, min);
    let high = pick(&candidates, max);

    let mut systems: Vec<&str> = Vec::new();
    for a in aggregated {
        if !systems.contains(&a.system.as_str()) {
            systems.push(&a.system);
        }
    }
    let prf = |system: &str, corpus: &str| {
        let a = aggregated.iter().find(|a| a.system == system && a.corpus == corpus)?;
        Some(Prf { precision: a.precision?.mean, recall: a.recall?.mean, f_beta: a.f_beta?.mean })
    };
    let rows = systems
        .into_iter()
        .map(|s| ExtremeRow { system: s.to_owned(), low: prf(s, &low.corpus), high: prf(s, &high.corpus) })
        .collect();
    Ok(WerExtremes { low, high, rows })
}

impl WerExtremes {
    /// Markdown table with per-column maxima in bold.
    pub fn to_markdown(&self) -> String {
        let columns: Vec<Vec<Option<String>>> = (0..6)
            .map(|col| {
                self.rows
                    .iter()
                    .map(|r| {
                        let side = if col < 3 { r.low } else { r.high };
                        side.map(|p| format_score([p.precision, p.recall, p.f_beta][col % 3]))
                    })
                    .collect()
            })
            .collect();
        let best: Vec<Option<f64>> = columns
            .iter()
            .map(|c| c.iter().flatten().map(|s| s.parse::<f64>().expect("formatted score")).reduce(f64::max))
            .collect();

        let mut out = String::new();
        let _ = writeln!(
            out,
            "| System | Low ({}) P | R | F0.5 | High ({}) P | R | F0.5 |",
            self.low.wer_percent, self.high.wer_percent
        );
        out.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("| ");
            out.push_str(&row.system);
            for (col, column) in columns.iter().enumerate() {
                out.push_str(" | ");
                match &column[i] {
                    Some(s) if Some(s.parse::<f64>().expect("formatted score")) == best[col] => {
                        let _ = write!(out, "**{s}**");
                    }
                    Some(s) => out.push_str(s),
                    None => out.push_str("n/a"),
                }
            }
            out.push_str(" |\n");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Low WER: {} ({}%)", self.low.corpus, self.low.wer_percent);
        let _ = writeln!(out, "High WER: {} ({}%)", self.high.corpus, self.high.wer_percent);
        for (label, side) in [("Low", &self.low), ("High", &self.high)] {
            if !side.tied_with.is_empty() {
                let _ = writeln!(
                    out,
                    "Note: {label} WER tie between {} and {}; chose {} by name.",
                    side.corpus,
                    side.tied_with.join(", "),
                    side.corpus
                );
            }
        }
        out
    }
}
