//! Rendering of score, ranking and property tables, and the compare output bundle.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::TopicCount;
use crate::error::{Error, Result};
use crate::harness::aggregate::{aggregate_runs, AggregatedScore};
use crate::harness::evaluate::{evaluate, EntryFailure, Evaluation, MetricReport};
use crate::harness::extremes::{wer_extremes_report, WerExtremes};
use crate::harness::manifest::{MetricParams, RunManifest};
use crate::harness::ranking::{rank_systems, RankMetric, RankingTable};
use crate::wer::{corpus_properties, CorpusProperties};

/// `value × 100` with two decimals, rounded half up.
///
/// The scaled value is first snapped to 1e-6 so that binary noise such as
/// `0.60055 → 60.054999…` does not flip the rounding direction.
pub fn format_score(value: f64) -> String {
    let scaled = (value * 100.0 * 1e6).round() / 1e6;
    let hundredths = (scaled * 100.0 + 0.5).floor();
    let v = hundredths / 100.0;
    if v == 0.0 {
        "0.00".to_owned()
    } else {
        format!("{v:.2}")
    }
}

fn opt_score(value: Option<f64>) -> String {
    value.map(format_score).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Markdown,
    Json,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "md" | "markdown" => Ok(TableFormat::Markdown),
            "json" => Ok(TableFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv, md or json)")),
        }
    }
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.write_record(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn markdown_table(header: &[&str], align_right: &[bool], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let rule: Vec<&str> = align_right.iter().map(|&r| if r { "---:" } else { "---" }).collect();
    let _ = writeln!(out, "|{}|", rule.join("|"));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

fn json_lines<T: Serialize>(records: &[T]) -> String {
    let mut out = serde_json::to_string_pretty(records).expect("records serialize");
    out.push('\n');
    out
}

fn flag(value: Option<bool>) -> String {
    match value {
        Some(true) => "yes".to_owned(),
        Some(false) => "no".to_owned(),
        None => String::new(),
    }
}

fn with_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertiesRecord {
    pub corpus: String,
    pub sentences: usize,
    pub references: usize,
    /// Percent with two decimals, or "n/a".
    pub wer: String,
    pub topics: Option<TopicCount>,
    pub multiple_l1: Option<bool>,
    pub multiple_proficiency: Option<bool>,
    pub publicly_available: Option<bool>,
}

impl From<&CorpusProperties> for PropertiesRecord {
    fn from(p: &CorpusProperties) -> Self {
        PropertiesRecord {
            corpus: p.name.clone(),
            sentences: p.sentence_count,
            references: p.reference_count,
            wer: p.wer_percent_string(),
            topics: p.metadata.topics,
            multiple_l1: p.metadata.multiple_l1,
            multiple_proficiency: p.metadata.multiple_proficiency,
            publicly_available: p.metadata.publicly_available,
        }
    }
}

const PROPERTY_COLUMNS: [&str; 8] =
    ["corpus", "sentences", "references", "wer", "topics", "multiple_l1", "multiple_proficiency", "publicly_available"];

/// One row per corpus: size, reference count, WER and the descriptive flags.
pub fn properties_table(properties: &[CorpusProperties], format: TableFormat) -> String {
    let records: Vec<PropertiesRecord> = properties.iter().map(PropertiesRecord::from).collect();
    match format {
        TableFormat::Json => json_lines(&records),
        TableFormat::Csv | TableFormat::Markdown => {
            let md = format == TableFormat::Markdown;
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.corpus.clone(),
                        if md { with_thousands(r.sentences) } else { r.sentences.to_string() },
                        r.references.to_string(),
                        r.wer.clone(),
                        r.topics.map(|t| t.to_string()).unwrap_or_default(),
                        flag(r.multiple_l1),
                        flag(r.multiple_proficiency),
                        flag(r.publicly_available),
                    ]
                })
                .collect();
            if md {
                let header = ["Corpus", "N", "M", "WER", "Topics", "Multiple L1", "Multiple proficiency", "Public"];
                markdown_table(&header, &[false, true, true, true, true, false, false, false], &rows)
            } else {
                csv_string(&PROPERTY_COLUMNS, &rows)
            }
        }
    }
}

/// Column order of `scores.csv` and of `score --format csv`.
pub const SCORE_COLUMNS: [&str; 13] = [
    "system", "corpus", "run_id", "sentences", "tp", "fp", "fn", "precision", "recall", "f_beta", "gleu", "gleu_std",
    "corpus_wer",
];

/// Per-run metric rows. CSV and Markdown show scores ×100; JSON keeps fractions.
pub fn reports_table(reports: &[MetricReport], format: TableFormat) -> String {
    if format == TableFormat::Json {
        return json_lines(reports);
    }
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let count = |f: fn(&crate::maxmatch::MatchCounts) -> u64| {
                r.counts.as_ref().map(|c| f(c).to_string()).unwrap_or_default()
            };
            vec![
                r.system.clone(),
                r.corpus.clone(),
                r.run_id.to_string(),
                r.sentences.to_string(),
                count(|c| c.tp),
                count(|c| c.fp),
                count(|c| c.fn_),
                opt_score(r.precision),
                opt_score(r.recall),
                opt_score(r.f_beta),
                opt_score(r.gleu_mean),
                opt_score(r.gleu_std),
                opt_score(r.corpus_wer),
            ]
        })
        .collect();
    match format {
        TableFormat::Csv => csv_string(&SCORE_COLUMNS, &rows),
        _ => {
            let mut align = [true; 13];
            align[0] = false;
            align[1] = false;
            markdown_table(&SCORE_COLUMNS, &align, &rows)
        }
    }
}

/// Markdown for every ranking table; a metric that could not be ranked gets a note instead.
pub fn rankings_markdown(tables: &[(RankMetric, std::result::Result<RankingTable, String>)]) -> String {
    let mut out = String::new();
    for (metric, table) in tables {
        let _ = writeln!(out, "# {} rankings\n", metric.label());
        let table = match table {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(out, "Not available: {e}\n");
                continue;
            }
        };
        if table.rankings.is_empty() {
            let _ = writeln!(out, "No corpus has {} scores.\n", metric.label());
            continue;
        }
        for ranking in &table.rankings {
            let _ = writeln!(out, "## {}\n", ranking.corpus);
            let rows: Vec<Vec<String>> = ranking
                .entries
                .iter()
                .map(|e| vec![e.rank.to_string(), e.system.clone(), format_score(e.score), format_score(e.std)])
                .collect();
            out.push_str(&markdown_table(&["Rank", "System", metric.label(), "Std"], &[true, false, true, true], &rows));
            out.push('\n');
        }
        if !table.correlations.is_empty() {
            let _ = writeln!(out, "## Kendall tau-b between corpus rankings\n");
            let rows: Vec<Vec<String>> = table
                .correlations
                .iter()
                .map(|c| {
                    let tau = c.tau.map_or_else(|| "n/a".to_owned(), |t| format!("{t:.4}"));
                    vec![c.first.clone(), c.second.clone(), tau]
                })
                .collect();
            out.push_str(&markdown_table(&["Corpus", "Corpus", "tau"], &[false, false, true], &rows));
            out.push('\n');
        }
        let tops: Vec<String> =
            table.rankings.iter().map(|r| format!("{}: {}", r.corpus, r.top().unwrap_or("-"))).collect();
        let _ = writeln!(out, "Top system per corpus: {}", tops.join(", "));
        let _ = writeln!(out, "Top-system disagreement: {}\n", if table.top_system_disagreement { "yes" } else { "no" });
    }
    out
}

#[derive(Debug, Clone, Serialize)]
struct RankingRecord<'a> {
    metric: RankMetric,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a RankingTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Debug, Clone, Serialize)]
struct ReportJson<'a> {
    params: &'a MetricParams,
    corpora: Vec<PropertiesRecord>,
    scores: &'a [MetricReport],
    aggregated: &'a [AggregatedScore],
    rankings: Vec<RankingRecord<'a>>,
    extremes: Option<&'a WerExtremes>,
    failures: &'a [EntryFailure],
}

/// Everything `compare` produces, ready to be written.
#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub aggregated: Vec<AggregatedScore>,
    pub rankings: Vec<(RankMetric, std::result::Result<RankingTable, String>)>,
    pub extremes: std::result::Result<WerExtremes, String>,
    pub failures: Vec<EntryFailure>,
    /// File name and content, in write order.
    pub files: Vec<(&'static str, String)>,
}

impl CompareOutput {
    /// Per-metric disagreement flags for the metrics that could be ranked.
    pub fn disagreement_flags(&self) -> Vec<(RankMetric, bool)> {
        self.rankings
            .iter()
            .filter_map(|(m, t)| t.as_ref().ok().filter(|t| !t.rankings.is_empty()).map(|t| (*m, t.top_system_disagreement)))
            .collect()
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| *n == name).map(|(_, c)| c.as_str())
    }

    pub fn failures_json(&self) -> String {
        json_lines(&self.failures)
    }
}

/// Aggregates, ranks and renders an evaluation.
pub fn build_compare_output(manifest: &RunManifest, evaluation: &Evaluation) -> CompareOutput {
    let properties: Vec<CorpusProperties> =
        evaluation.corpora.iter().map(|p| corpus_properties(&p.corpus, manifest.params.ref_policy)).collect();
    let aggregated = aggregate_runs(&evaluation.reports);
    let rankings: Vec<(RankMetric, std::result::Result<RankingTable, String>)> = [RankMetric::FBeta, RankMetric::Gleu]
        .into_iter()
        .map(|m| (m, rank_systems(&aggregated, m).map_err(|e| e.to_string())))
        .collect();
    let extremes = wer_extremes_report(&aggregated, &properties).map_err(|e| e.to_string());

    let extremes_md = match &extremes {
        Ok(x) => format!("# Scores at the WER extremes\n\n{}", x.to_markdown()),
        Err(e) => format!("# Scores at the WER extremes\n\nNot available: {e}\n"),
    };
    let json = ReportJson {
        params: &manifest.params,
        corpora: properties.iter().map(PropertiesRecord::from).collect(),
        scores: &evaluation.reports,
        aggregated: &aggregated,
        rankings: rankings
            .iter()
            .map(|(m, t)| RankingRecord {
                metric: *m,
                table: t.as_ref().ok(),
                error: t.as_ref().err().map(String::as_str),
            })
            .collect(),
        extremes: extremes.as_ref().ok(),
        failures: &evaluation.failures,
    };
    let mut report_json = serde_json::to_string_pretty(&json).expect("report serializes");
    report_json.push('\n');

    let files = vec![
        ("scores.csv", reports_table(&evaluation.reports, TableFormat::Csv)),
        ("rankings.md", rankings_markdown(&rankings)),
        ("extremes.md", extremes_md),
        ("report.json", report_json),
    ];
    CompareOutput { aggregated, rankings, extremes, failures: evaluation.failures.clone(), files }
}

/// Runs the full pipeline: evaluate, aggregate, rank, extremes.
pub fn run_compare(manifest: &RunManifest) -> Result<CompareOutput> {
    let evaluation = evaluate(manifest)?;
    Ok(build_compare_output(manifest, &evaluation))
}

/// Writes the report files into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, output: &CompareOutput) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, content) in &output.files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Writes `failures.json` into `dir`.
pub fn write_failures(dir: &Path, output: &CompareOutput) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("failures.json");
    fs::write(&path, output.failures_json()).map_err(|e| Error::io(&path, e))
}
