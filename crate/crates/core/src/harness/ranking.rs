//! Per-corpus system rankings and how much they agree across corpora.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::ScoreError;
use crate::harness::aggregate::{AggregatedScore, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMetric {
    FBeta,
    Gleu,
}

impl RankMetric {
    pub fn label(&self) -> &'static str {
        match self {
            RankMetric::FBeta => "F0.5",
            RankMetric::Gleu => "GLEU",
        }
    }

    fn pick(&self, score: &AggregatedScore) -> Option<Summary> {
        match self {
            RankMetric::FBeta => score.f_beta,
            RankMetric::Gleu => score.gleu,
        }
    }
}

/// Kendall's tau-b:
///
/// `(concordant - discordant) / sqrt((n0 - ties_x) * (n0 - ties_y))`
///
/// with `n0 = n(n-1)/2`. Returns `None` when either side is constant.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "kendall_tau_b needs paired samples");
    let n = x.len();
    let (mut concordant, mut discordant, mut ties_x, mut ties_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).unwrap_or(Ordering::Equal);
            let dy = y[i].partial_cmp(&y[j]).unwrap_or(Ordering::Equal);
            match (dx, dy) {
                (Ordering::Equal, Ordering::Equal) => {
                    ties_x += 1;
                    ties_y += 1;
                }
                (Ordering::Equal, _) => ties_x += 1,
                (_, Ordering::Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    let denom = ((pairs - ties_x) as f64 * (pairs - ties_y) as f64).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some(((concordant - discordant) as f64 / denom).clamp(-1.0, 1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSystem {
    pub rank: usize,
    pub system: String,
    pub score: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRanking {
    pub corpus: String,
    /// Best first; exact ties ordered by system name.
    pub entries: Vec<RankedSystem>,
}

impl CorpusRanking {
    pub fn top(&self) -> Option<&str> {
        self.entries.first().map(|e| e.system.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCorrelation {
    pub first: String,
    pub second: String,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingTable {
    pub metric: RankMetric,
    pub rankings: Vec<CorpusRanking>,
    pub correlations: Vec<RankCorrelation>,
    /// Some two corpora have different best systems.
    pub top_system_disagreement: bool,
}

/// Ranks systems on every corpus that carries `metric`, then correlates the rankings
/// pairwise. A corpus where only some systems have a score is an error.
pub fn rank_systems(aggregated: &[AggregatedScore], metric: RankMetric) -> Result<RankingTable, ScoreError> {
    let mut systems: Vec<&str> = aggregated.iter().map(|a| a.system.as_str()).collect();
    systems.sort_unstable();
    systems.dedup();
    let mut corpora: Vec<&str> = Vec::new();
    for a in aggregated {
        if !corpora.contains(&a.corpus.as_str()) {
            corpora.push(&a.corpus);
        }
    }

    let lookup = |system: &str, corpus: &str| {
        aggregated
            .iter()
            .find(|a| a.system == system && a.corpus == corpus)
            .and_then(|a| metric.pick(a))
    };

    let mut holes = Vec::new();
    let mut rankings = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &corpus in &corpora {
        let cells: Vec<Option<Summary>> = systems.iter().map(|s| lookup(s, corpus)).collect();
        if cells.iter().all(Option::is_none) {
            continue;
        }
        for (system, cell) in systems.iter().zip(&cells) {
            if cell.is_none() {
                holes.push(format!("({system}, {corpus})"));
            }
        }
        if cells.iter().any(Option::is_none) {
            continue;
        }
        let cells: Vec<Summary> = cells.into_iter().flatten().collect();
        let mut entries: Vec<RankedSystem> = systems
            .iter()
            .zip(&cells)
            .map(|(s, c)| RankedSystem { rank: 0, system: s.to_string(), score: c.mean, std: c.std })
            .collect();
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.system.cmp(&b.system)));
        for (i, e) in entries.iter_mut().enumerate() {
            e.rank = i + 1;
        }
        columns.push(cells.iter().map(|c| c.mean).collect());
        rankings.push(CorpusRanking { corpus: corpus.to_owned(), entries });
    }
    if !holes.is_empty() {
        return Err(ScoreError::MissingCells(format!("{} {}", metric.label(), holes.join(", "))));
    }

    let mut correlations = Vec::new();
    for i in 0..rankings.len() {
        for j in i + 1..rankings.len() {
            correlations.push(RankCorrelation {
                first: rankings[i].corpus.clone(),
                second: rankings[j].corpus.clone(),
                tau: kendall_tau_b(&columns[i], &columns[j]),
            });
        }
    }
    let mut tops: Vec<&str> = rankings.iter().filter_map(CorpusRanking::top).collect();
    tops.sort_unstable();
    tops.dedup();
    let top_system_disagreement = tops.len() > 1;
    Ok(RankingTable { metric, rankings, correlations, top_system_disagreement })
}
