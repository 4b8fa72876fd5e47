use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gec_eval::harness::manifest::{load_m2_corpus, read_sentences};
use gec_eval::harness::{
    properties_table, reports_table, run_compare, score_hypotheses, write_failures, write_outputs, Metric,
    MetricParams, PreparedCorpus, RunManifest, TableFormat,
};
use gec_eval::{
    corpus_properties, parse_m2, to_parallel, AnnotatorPolicy, Corpus, Error, HypothesisSet, ParseError, RefPolicy,
};

/// Environment variable that overrides the default `compare` output directory.
const OUT_DIR_ENV: &str = "GEC_EVAL_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "gec-eval", version, about = "Evaluate grammatical error correction systems across corpora")]
struct Cli {
    /// Worker threads for scoring (default: number of logical processors).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Corpus properties: sentences, references, WER and metadata.
    Stats(StatsArgs),
    /// Score one system's hypothesis file(s) against a corpus.
    Score(ScoreArgs),
    /// Run a manifest of systems and corpora and write the report files.
    Compare(CompareArgs),
    /// Turn an M2 file into a source file and one reference file per annotator.
    Convert(ConvertArgs),
    /// Check M2 files, manifests and hypothesis files, listing every problem found.
    Validate(ValidateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Md,
    Json,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TableFormat::Csv,
            Format::Md => TableFormat::Markdown,
            Format::Json => TableFormat::Json,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Policy {
    First,
    Min,
    Mean,
}

impl From<Policy> for RefPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::First => RefPolicy::First,
            Policy::Min => RefPolicy::Min,
            Policy::Mean => RefPolicy::Mean,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MetricName {
    #[value(name = "f_beta")]
    FBeta,
    Gleu,
    Wer,
}

impl From<MetricName> for Metric {
    fn from(m: MetricName) -> Self {
        match m {
            MetricName::FBeta => Metric::FBeta,
            MetricName::Gleu => Metric::Gleu,
            MetricName::Wer => Metric::Wer,
        }
    }
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// M2 annotation file.
    #[arg(long, conflicts_with_all = ["source", "reference"])]
    m2: Option<PathBuf>,
    /// Source sentences, one per line (parallel format).
    #[arg(long, requires = "reference")]
    source: Option<PathBuf>,
    /// Reference file, one per annotator (parallel format). Repeat for more references.
    #[arg(long = "reference")]
    reference: Vec<PathBuf>,
    /// Corpus name in reports (default: file stem).
    #[arg(long)]
    name: Option<String>,
}

impl CorpusArgs {
    fn load(&self) -> Result<Corpus, Error> {
        if let Some(path) = &self.m2 {
            return load_m2_corpus(path, &self.name.clone().unwrap_or_else(|| stem(path)));
        }
        let Some(source) = &self.source else {
            return Err(Error::Manifest("give --m2, or --source with at least one --reference".to_owned()));
        };
        let sources = read_sentences(source)?;
        let refs = self.reference.iter().map(|r| read_sentences(r)).collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus::from_parallel(self.name.clone().unwrap_or_else(|| stem(source)), &sources, &refs)?)
    }
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// Metrics to compute.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MetricName::FBeta, MetricName::Gleu, MetricName::Wer])]
    metrics: Vec<MetricName>,
    /// F-beta weight.
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Unchanged tokens allowed inside one system edit.
    #[arg(long, default_value_t = 2)]
    max_unchanged_words: usize,
    /// Compare tokens case-insensitively when matching gold edits.
    #[arg(long)]
    case_insensitive: bool,
    /// Largest GLEU n-gram order.
    #[arg(long, default_value_t = 4)]
    gleu_order: usize,
    /// GLEU reference-sampling iterations.
    #[arg(long, default_value_t = 500)]
    gleu_iterations: usize,
    /// GLEU sampling seed.
    #[arg(long, default_value_t = 0)]
    gleu_seed: u64,
    /// Add-one smoothing for GLEU orders 2 and up.
    #[arg(long)]
    gleu_smoothing: bool,
    /// Which reference WER compares against on multi-reference corpora.
    #[arg(long, value_enum, default_value_t = Policy::First)]
    ref_policy: Policy,
}

impl MetricArgs {
    fn params(&self) -> MetricParams {
        MetricParams {
            beta: self.beta,
            max_unchanged_words: self.max_unchanged_words,
            case_insensitive: self.case_insensitive,
            gleu_order: self.gleu_order,
            gleu_iterations: self.gleu_iterations,
            gleu_seed: self.gleu_seed,
            gleu_smoothing: self.gleu_smoothing,
            ref_policy: self.ref_policy.into(),
        }
    }
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// M2 file; repeat for several corpora.
    #[arg(long = "m2")]
    m2: Vec<PathBuf>,
    /// Run manifest whose corpora (with their metadata) are described.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Policy::First)]
    ref_policy: Policy,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    format: Format,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Hypothesis file, one sentence per line. Repeat for several runs.
    #[arg(long = "hyp", required = true)]
    hyp: Vec<PathBuf>,
    /// System name in reports.
    #[arg(long, default_value = "system")]
    system: String,
    #[command(flatten)]
    metrics: MetricArgs,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    format: Format,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Run manifest (TOML).
    manifest: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "gec-eval-out")]
    out: PathBuf,
    /// Score what can be scored when some entries fail, instead of aborting.
    #[arg(long)]
    keep_going: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConvertPolicy {
    All,
    First,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    /// M2 file to convert.
    m2: PathBuf,
    /// Directory for the output files.
    #[arg(long)]
    out_dir: PathBuf,
    /// Which annotators become reference files.
    #[arg(long, value_enum, default_value_t = ConvertPolicy::All)]
    policy: ConvertPolicy,
    /// Output file prefix (default: input file stem).
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// M2 files to check.
    #[arg(long = "m2")]
    m2: Vec<PathBuf>,
    /// Run manifests to check, including every file they reference.
    #[arg(long = "manifest")]
    manifest: Vec<PathBuf>,
    /// Hypothesis files to check against the corpus given by --against.
    #[arg(long = "hyp", requires = "against")]
    hyp: Vec<PathBuf>,
    /// M2 corpus that --hyp files must line up with.
    #[arg(long)]
    against: Option<PathBuf>,
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "corpus".to_owned())
}

/// A failed command: exit code and a one-line message.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::Validation(_) | Error::Manifest(_) => 1,
            Error::Score(_) | Error::Failures { .. } => 2,
            Error::Io { .. } => 3,
        };
        Failure { code, kind: e.kind(), message: e.to_string() }
    }
}

impl From<gec_eval::ScoreError> for Failure {
    fn from(e: gec_eval::ScoreError) -> Self {
        Error::from(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn print_stdout(text: &str) -> CmdResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Error::io("<stdout>", e).into())
}

fn cmd_stats(args: &StatsArgs) -> CmdResult {
    let policy = args.ref_policy.into();
    let mut corpora = Vec::new();
    if let Some(path) = &args.manifest {
        let manifest = RunManifest::load(path)?;
        for entry in &manifest.corpora {
            corpora.push(manifest.load_corpus(entry)?);
        }
    }
    for path in &args.m2 {
        corpora.push(load_m2_corpus(path, &stem(path))?);
    }
    if corpora.is_empty() {
        return Err(Error::Manifest("give at least one --m2 file or a --manifest".to_owned()).into());
    }
    let properties: Vec<_> = corpora.iter().map(|c| corpus_properties(c, policy)).collect();
    print_stdout(&properties_table(&properties, args.format.into()))
}

fn cmd_score(args: &ScoreArgs) -> CmdResult {
    let params = args.metrics.params();
    let metrics: Vec<Metric> = args.metrics.metrics.iter().map(|&m| m.into()).collect();
    let corpus = args.corpus.load()?;
    let prepared = PreparedCorpus::new(corpus, &params);
    let mut reports = Vec::new();
    for (run_id, path) in args.hyp.iter().enumerate() {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let hyp = HypothesisSet::from_text(args.system.clone(), run_id as u32, &text);
        reports.push(score_hypotheses(&prepared, &hyp, &metrics, &params)?);
    }
    print_stdout(&reports_table(&reports, args.format.into()))
}

fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let manifest = RunManifest::load(&args.manifest)?;
    preflight(&manifest)?;
    let output = run_compare(&manifest)?;
    if !output.failures.is_empty() {
        write_failures(&args.out, &output)?;
        if args.keep_going {
            write_outputs(&args.out, &output)?;
        }
        for f in &output.failures {
            let run = f.run_id.map_or_else(|| "-".to_owned(), |r| r.to_string());
            eprintln!("failed system={} corpus={} run={}: {}", f.system, f.corpus, run, f.message);
        }
        return Err(Error::Failures { count: output.failures.len() }.into());
    }
    write_outputs(&args.out, &output)?;
    let mut summary = String::new();
    for (metric, flag) in output.disagreement_flags() {
        summary.push_str(&format!(
            "top_system_disagreement {}={}\n",
            metric.label(),
            if flag { "yes" } else { "no" }
        ));
    }
    summary.push_str(&format!("wrote {} files to {}\n", output.files.len(), args.out.display()));
    print_stdout(&summary)
}

/// Manifest problems and unreadable corpora stop `compare` before any scoring starts;
/// problems with hypothesis files become per-entry failures instead.
fn preflight(manifest: &RunManifest) -> Result<(), Error> {
    let problems = manifest.check_structure();
    if !problems.is_empty() {
        return Err(Error::Manifest(problems.join("; ")));
    }
    for entry in &manifest.corpora {
        manifest.load_corpus(entry)?;
    }
    Ok(())
}

fn cmd_convert(args: &ConvertArgs) -> CmdResult {
    let text = fs::read_to_string(&args.m2).map_err(|e| Error::io(&args.m2, e))?;
    let doc = parse_m2(&text).map_err(|source| Error::Parse { path: args.m2.clone(), source })?;
    let policy = match args.policy {
        ConvertPolicy::All => AnnotatorPolicy::All,
        ConvertPolicy::First => AnnotatorPolicy::First,
    };
    let parallel = to_parallel(&doc, policy);
    let prefix = args.prefix.clone().unwrap_or_else(|| stem(&args.m2));
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let write = |name: String, lines: &[String]| -> Result<PathBuf, Error> {
        let path = args.out_dir.join(name);
        let mut body = lines.join("\n");
        if !lines.is_empty() {
            body.push('\n');
        }
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    };
    let mut written = vec![write(format!("{prefix}.src"), &parallel.sources)?];
    for reference in &parallel.references {
        written.push(write(format!("{prefix}.ref{}", reference.annotator), &reference.lines)?);
    }
    let listing: String = written.iter().map(|p| format!("{}\n", p.display())).collect();
    print_stdout(&listing)
}

/// Parses each blank-line separated block on its own so that one bad block does not hide
/// problems further down. Returns every error with its absolute line number.
fn m2_problems(text: &str) -> Vec<ParseError> {
    let mut problems = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut start = 0;
    while start < lines.len() {
        if lines[start].trim().is_empty() {
            start += 1;
            continue;
        }
        let end = (start..lines.len()).find(|&i| lines[i].trim().is_empty()).unwrap_or(lines.len());
        let block = lines[start..end].join("\n");
        if let Err(e) = parse_m2(&block) {
            problems.push(match e {
                ParseError::Syntax { line, message } => ParseError::Syntax { line: line + start, message },
                ParseError::Invalid { line, source } => ParseError::Invalid { line: line + start, source },
            });
        }
        start = end;
    }
    problems
}

fn cmd_validate(args: &ValidateArgs) -> CmdResult {
    if args.m2.is_empty() && args.manifest.is_empty() && args.hyp.is_empty() {
        return Err(Error::Manifest("nothing to validate: give --m2, --manifest or --hyp".to_owned()).into());
    }
    let mut problems: Vec<String> = Vec::new();
    let mut io_error = None;
    for path in &args.m2 {
        match fs::read_to_string(path) {
            Ok(text) => problems.extend(m2_problems(&text).into_iter().map(|e| format!("{}: {e}", path.display()))),
            Err(e) => io_error = Some(Error::io(path, e)),
        }
    }
    for path in &args.manifest {
        let manifest = match RunManifest::load(path) {
            Ok(m) => m,
            Err(e) => {
                problems.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        let here = path.display();
        problems.extend(manifest.check_structure().into_iter().map(|p| format!("{here}: {p}")));
        let missing = manifest.missing_files();
        problems.extend(missing.iter().map(|p| format!("{here}: missing file {}", p.display())));
        for entry in &manifest.corpora {
            let corpus = match manifest.load_corpus(entry) {
                Ok(c) => c,
                Err(e) => {
                    if !matches!(e, Error::Io { .. }) {
                        problems.push(format!("{here}: corpus {:?}: {e}", entry.name));
                    }
                    continue;
                }
            };
            for system in &manifest.systems {
                for file in system.hypotheses.get(&entry.name).into_iter().flatten() {
                    let resolved = manifest.resolve(file);
                    if let Ok(text) = fs::read_to_string(&resolved) {
                        let hyp = HypothesisSet::from_text(system.name.clone(), 0, &text);
                        if let Err(e) = hyp.check_against(&corpus) {
                            problems.push(format!("{}: {e}", resolved.display()));
                        }
                    }
                }
            }
        }
    }
    if let Some(against) = &args.against {
        let corpus = load_m2_corpus(against, &stem(against))?;
        for path in &args.hyp {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            if let Err(e) = HypothesisSet::from_text(stem(path), 0, &text).check_against(&corpus) {
                problems.push(format!("{}: {e}", path.display()));
            }
        }
    }
    if let Some(e) = io_error {
        return Err(e.into());
    }
    if problems.is_empty() {
        return print_stdout("ok\n");
    }
    for p in &problems {
        eprintln!("{p}");
    }
    Err(Failure { code: 1, kind: "validation", message: format!("{} problem(s) found", problems.len()) })
}

fn run(cli: &Cli) -> CmdResult {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure { code: 1, kind: "usage", message: format!("--jobs: {e}") })?;
    }
    match &cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Score(a) => cmd_score(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let message = f.message.replace(['\n', '\r'], " ");
            eprintln!("error kind={} code={}: {message}", f.kind, f.code);
            ExitCode::from(f.code)
        }
    }
}
