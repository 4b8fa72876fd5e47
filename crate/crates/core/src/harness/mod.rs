//! Multi-system, multi-corpus evaluation: manifests, scoring jobs, aggregation over runs,
//! rankings and reports.

pub mod aggregate;
pub mod evaluate;
pub mod extremes;
pub mod manifest;
pub mod ranking;
pub mod report;

pub use aggregate::{aggregate_runs, AggregatedScore, Summary};
pub use evaluate::{evaluate, score_hypotheses, EntryFailure, Evaluation, MetricReport, PreparedCorpus};
pub use extremes::{wer_extremes_report, ExtremeCorpus, ExtremeRow, Prf, WerExtremes};
pub use manifest::{CorpusEntry, CorpusSource, Metric, MetricParams, RunManifest, SystemEntry};
pub use ranking::{kendall_tau_b, rank_systems, CorpusRanking, RankCorrelation, RankMetric, RankedSystem, RankingTable};
pub use report::{
    build_compare_output, format_score, properties_table, reports_table, run_compare, write_failures, write_outputs,
    CompareOutput, TableFormat,
};
