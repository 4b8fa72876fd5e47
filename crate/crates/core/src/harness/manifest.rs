//! Run manifests: which corpora, which systems and runs, which metrics, with which parameters.
//!
//! Manifests are TOML. Relative paths resolve against the manifest's directory.
//!
//! ```toml
//! metrics = ["f_beta", "gleu", "wer"]
//!
//! [params]
//! beta = 0.5
//! gleu_iterations = 500
//!
//! [[corpus]]
//! name = "conll14"
//! format = "m2"
//! path = "data/conll14.m2"
//! topics = 2
//! multiple_l1 = false
//!
//! [[corpus]]
//! name = "jfleg"
//! format = "parallel"
//! source = "data/jfleg.src"
//! references = ["data/jfleg.ref0", "data/jfleg.ref1"]
//! topics = "many"
//!
//! [[system]]
//! name = "transformer"
//! run_ids = [0, 1]
//! hypotheses = { conll14 = ["out/t0.conll14", "out/t1.conll14"], jfleg = ["out/t0.jfleg", "out/t1.jfleg"] }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusMetadata};
use crate::error::{Error, Result};
use crate::gleu::{GleuParams, DEFAULT_ITERATIONS, DEFAULT_ORDER, DEFAULT_SEED};
use crate::m2::parse_m2;
use crate::maxmatch::{MatchParams, DEFAULT_BETA, DEFAULT_MAX_UNCHANGED_WORDS};
use crate::token::{tokenize, Sentence};
use crate::wer::RefPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FBeta,
    Gleu,
    Wer,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::FBeta, Metric::Gleu, Metric::Wer];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::FBeta => "f_beta",
            Metric::Gleu => "gleu",
            Metric::Wer => "wer",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?} (expected f_beta, gleu or wer)"))
    }
}

/// Every tunable metric parameter, shared by all systems so that they are evaluated identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    pub beta: f64,
    pub max_unchanged_words: usize,
    pub case_insensitive: bool,
    pub gleu_order: usize,
    pub gleu_iterations: usize,
    pub gleu_seed: u64,
    pub gleu_smoothing: bool,
    pub ref_policy: RefPolicy,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            beta: DEFAULT_BETA,
            max_unchanged_words: DEFAULT_MAX_UNCHANGED_WORDS,
            case_insensitive: false,
            gleu_order: DEFAULT_ORDER,
            gleu_iterations: DEFAULT_ITERATIONS,
            gleu_seed: DEFAULT_SEED,
            gleu_smoothing: false,
            ref_policy: RefPolicy::First,
        }
    }
}

impl MetricParams {
    pub fn matching(&self) -> MatchParams {
        MatchParams { max_unchanged_words: self.max_unchanged_words, case_insensitive: self.case_insensitive }
    }

    pub fn gleu(&self) -> GleuParams {
        GleuParams {
            order: self.gleu_order,
            iterations: self.gleu_iterations,
            seed: self.gleu_seed,
            smoothing: self.gleu_smoothing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum CorpusSource {
    M2 { path: PathBuf },
    Parallel { source: PathBuf, references: Vec<PathBuf> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    #[serde(flatten)]
    pub source: CorpusSource,
    #[serde(flatten)]
    pub metadata: CorpusMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    pub name: String,
    /// Defaults to `0..n` where `n` is the number of files listed per corpus.
    #[serde(default)]
    pub run_ids: Option<Vec<u32>>,
    /// Corpus name to one hypothesis file per run.
    #[serde(default)]
    pub hypotheses: BTreeMap<String, Vec<PathBuf>>,
}

impl SystemEntry {
    pub fn runs(&self) -> Vec<u32> {
        match &self.run_ids {
            Some(ids) => ids.clone(),
            None => {
                let n = self.hypotheses.values().map(Vec::len).max().unwrap_or(0);
                (0..n as u32).collect()
            }
        }
    }
}

fn default_metrics() -> Vec<Metric> {
    Metric::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default)]
    pub params: MetricParams,
    #[serde(default, rename = "corpus")]
    pub corpora: Vec<CorpusEntry>,
    #[serde(default, rename = "system")]
    pub systems: Vec<SystemEntry>,
    /// Directory that relative paths are resolved against; set by [`RunManifest::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunManifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut manifest: RunManifest = toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        manifest.base_dir = base_dir.into();
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RunManifest::parse(&text, base)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn wants(&self, metric: Metric) -> bool {
        self.metrics.contains(&metric)
    }

    /// Structural checks that need no file access.
    pub fn check_structure(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.systems.is_empty() {
            problems.push("no systems configured".to_owned());
        }
        if self.corpora.is_empty() {
            problems.push("no corpora configured".to_owned());
        }
        if self.metrics.is_empty() {
            problems.push("no metrics requested".to_owned());
        }
        if !(self.params.beta.is_finite() && self.params.beta > 0.0) {
            problems.push(format!("beta must be positive, got {}", self.params.beta));
        }
        if self.params.gleu_order == 0 {
            problems.push("gleu_order must be at least 1".to_owned());
        }
        let mut seen = HashSet::new();
        for corpus in &self.corpora {
            if !seen.insert(corpus.name.as_str()) {
                problems.push(format!("duplicate corpus name {:?}", corpus.name));
            }
            if let CorpusSource::Parallel { references, .. } = &corpus.source {
                if references.is_empty() {
                    problems.push(format!("parallel corpus {:?} lists no reference files", corpus.name));
                }
            }
        }
        let mut seen = HashSet::new();
        for system in &self.systems {
            if !seen.insert(system.name.as_str()) {
                problems.push(format!("duplicate system name {:?}", system.name));
            }
            let runs = system.runs();
            let unique: HashSet<_> = runs.iter().collect();
            if unique.len() != runs.len() {
                problems.push(format!("system {:?} repeats a run id", system.name));
            }
            for (corpus, files) in &system.hypotheses {
                if !self.corpora.iter().any(|c| &c.name == corpus) {
                    problems.push(format!("system {:?} lists hypotheses for unknown corpus {corpus:?}", system.name));
                }
                if files.len() != runs.len() {
                    problems.push(format!(
                        "system {:?} has {} run ids but {} hypothesis files for corpus {corpus:?}",
                        system.name,
                        runs.len(),
                        files.len()
                    ));
                }
            }
        }
        problems
    }

    /// Every referenced file that does not exist.
    pub fn missing_files(&self) -> Vec<PathBuf> {
        let mut paths: Vec<&Path> = Vec::new();
        for corpus in &self.corpora {
            match &corpus.source {
                CorpusSource::M2 { path } => paths.push(path),
                CorpusSource::Parallel { source, references } => {
                    paths.push(source);
                    paths.extend(references.iter().map(PathBuf::as_path));
                }
            }
        }
        for system in &self.systems {
            paths.extend(system.hypotheses.values().flatten().map(PathBuf::as_path));
        }
        paths.into_iter().map(|p| self.resolve(p)).filter(|p| !p.is_file()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = self.check_structure();
        problems.extend(self.missing_files().into_iter().map(|p| format!("missing file {}", p.display())));
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Manifest(problems.join("; ")))
        }
    }

    pub fn load_corpus(&self, entry: &CorpusEntry) -> Result<Corpus> {
        let corpus = match &entry.source {
            CorpusSource::M2 { path } => load_m2_corpus(&self.resolve(path), &entry.name)?,
            CorpusSource::Parallel { source, references } => {
                let sources = read_sentences(&self.resolve(source))?;
                let refs = references
                    .iter()
                    .map(|r| read_sentences(&self.resolve(r)))
                    .collect::<Result<Vec<_>>>()?;
                Corpus::from_parallel(entry.name.clone(), &sources, &refs)?
            }
        };
        Ok(corpus.with_metadata(entry.metadata.clone()))
    }
}

pub fn load_m2_corpus(path: &Path, name: &str) -> Result<Corpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc = parse_m2(&text).map_err(|source| Error::Parse { path: path.to_path_buf(), source })?;
    Ok(doc.into_corpus(name))
}

/// One whitespace-tokenized sentence per line.
pub fn read_sentences(path: &Path) -> Result<Vec<Sentence>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(tokenize).collect())
}
