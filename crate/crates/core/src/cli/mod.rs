//! The `persuasion-corpus` command line.
//!
//! Commands write their artifact to stdout (or to the file named by an
//! output flag) and diagnostics to stderr. Any error exits with status 1;
//! usage errors exit with status 2.

mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::baseline::{evaluate, train_with_validation, BaselineModel, Hyperparams};
use crate::dataset::{compute_stats, export_corpus, import_corpus, render_stats};
use crate::metrics::{render_reports, MetricsReport};
use crate::pipeline::{build_corpus, detect_label, GameTables, Label, Patterns, PipelineConfig, SentenceRecord, Split};
use crate::tlk::{parse_tlk, parse_tlk_xml, CodepageConfig, TalkTable};

pub use config::{GameConfig, RunConfig, DEFAULT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "persuasion-corpus", version, about = "Build and evaluate multilingual persuasion corpora from game talk tables")]
pub struct Cli {
    /// More log output on stderr (repeat for more)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump a talk table as StrRef, detected label and raw text per line
    Extract(ExtractArgs),
    /// Build a corpus directory from a run config
    Build(BuildArgs),
    /// Print per-language sentence counts of a corpus
    Stats(StatsArgs),
    /// Train the logistic-regression baseline and report on the test split
    TrainBaseline(TrainArgs),
    /// Score a saved model on a corpus split, or pretty-print report files
    Evaluate(EvaluateArgs),
    /// Print the default run config with comments
    DumpConfig,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Binary .tlk or XML talk table (detected by a leading '<')
    pub input: PathBuf,
    /// Language code stored in the dump header
    #[arg(short, long, default_value = "en")]
    pub language: String,
    /// Encoding for all entries, overriding the per-language defaults
    #[arg(long)]
    pub codepage: Option<String>,
    /// Write the dump here instead of stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Run config (TOML); see `dump-config`
    #[arg(short, long)]
    pub config: PathBuf,
    /// Write the corpus here instead of the config's output_dir
    #[arg(short, long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus directory
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    /// Gradient descent step size [default: 0.1]
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Full-batch epochs [default: 200]
    #[arg(long)]
    pub epochs: Option<u32>,
    /// L2 penalty on weights [default: 0.0001]
    #[arg(long)]
    pub l2: Option<f64>,
    /// Seed recorded with the model [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Take defaults from the [baseline] table of this run config
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Corpus directory
    pub corpus: PathBuf,
    /// Language to train and evaluate on
    #[arg(short, long)]
    pub language: String,
    /// Where to save the trained model
    #[arg(short, long)]
    pub model_out: PathBuf,
    /// Also save the test-split report as JSON
    #[arg(short, long)]
    pub report_out: Option<PathBuf>,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["model", "report"]))]
pub struct EvaluateArgs {
    /// Saved baseline model
    #[arg(short, long, requires_all = ["corpus", "language"])]
    pub model: Option<PathBuf>,
    /// Corpus directory to score
    #[arg(short, long)]
    pub corpus: Option<PathBuf>,
    /// Language to score
    #[arg(short, long)]
    pub language: Option<String>,
    /// Split to score
    #[arg(short, long, default_value = "test")]
    pub split: Split,
    /// Also save the report as JSON
    #[arg(short = 'o', long, requires = "model")]
    pub report_out: Option<PathBuf>,
    /// Metrics report JSON files to print side by side
    #[arg(long, num_args = 1.., conflicts_with_all = ["model", "corpus", "language"])]
    pub report: Vec<PathBuf>,
}

/// Parses arguments, runs the command, reports errors on stderr.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract(a) => cmd_extract(&a),
        Command::Build(a) => {
            let manifest = cmd_build(&a.config, a.output_dir.as_deref())?;
            emit(None, manifest.as_bytes())
        }
        Command::Stats(a) => emit(None, cmd_stats(&a.corpus)?.as_bytes()),
        Command::TrainBaseline(a) => cmd_train(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::DumpConfig => emit(None, DEFAULT_CONFIG.as_bytes()),
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Reads a binary or XML talk table. XML is recognised by its first
/// non-blank character being `<`.
pub fn load_talk_table(path: &Path, codepages: &CodepageConfig) -> Result<TalkTable> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let body = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(&bytes);
    let is_xml = body.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'<');
    if is_xml {
        let text = std::str::from_utf8(body).with_context(|| format!("{}: XML talk table is not UTF-8", path.display()))?;
        let (table, warnings) = parse_tlk_xml(text).with_context(|| format!("parsing {}", path.display()))?;
        for w in warnings {
            warn!("{}: {w}", path.display());
        }
        Ok(table)
    } else {
        parse_tlk(&bytes, codepages).with_context(|| format!("parsing {}", path.display()))
    }
}

fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Tab-separated dump: a `# language=<code> entries=<n>` header, then
/// `str_ref<TAB>label<TAB>text` for each entry that carries text. Tabs,
/// newlines and backslashes in text are escaped.
pub fn render_dump(table: &TalkTable, language: &str) -> Result<String> {
    let patterns = Patterns::from_config(&PipelineConfig::default())?;
    let mut out = format!("# language={language} entries={}\n", table.len());
    for (str_ref, entry) in table.iter().filter(|(_, e)| e.has_text()) {
        let (label, _) = detect_label(&entry.text, &patterns.tags);
        let _ = writeln!(out, "{str_ref}\t{label}\t{}", escape_field(&entry.text));
    }
    Ok(out)
}

fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let codepages = match &a.codepage {
        Some(label) => CodepageConfig::uniform(label)?,
        None => CodepageConfig::default(),
    };
    let table = load_talk_table(&a.input, &codepages)?;
    let dump = render_dump(&table, &a.language)?;
    emit(a.output.as_deref(), dump.as_bytes())
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Builds the corpus described by `config_path` and returns the manifest
/// JSON that was written.
pub fn cmd_build(config_path: &Path, output_override: Option<&Path>) -> Result<String> {
    let config = RunConfig::load(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new(""));
    let mut games = Vec::new();
    for g in &config.games {
        let mut tables = BTreeMap::new();
        let mut sources = BTreeMap::new();
        for language in &config.pipeline.languages {
            let rel = &g.tables[language];
            let path = resolve(base, rel);
            let table = load_talk_table(&path, &config.codepages)
                .with_context(|| format!("game {:?}, language {language:?}", g.id))?;
            info!("{}: {} entries", path.display(), table.len());
            tables.insert(language.clone(), table);
            sources.insert(language.clone(), rel.to_string_lossy().replace('\\', "/"));
        }
        games.push(GameTables {
            game_id: g.id.clone(),
            tables,
            sources,
        });
    }
    let (records, manifest) = build_corpus(&games, &config.pipeline)?;
    for w in &manifest.warnings {
        warn!("{w}");
    }
    let out_dir = match output_override {
        Some(p) => p.to_path_buf(),
        None => resolve(base, &config.output_dir),
    };
    export_corpus(&records, &manifest, &out_dir)?;
    info!("wrote {} sentence records to {}", records.len(), out_dir.display());
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    Ok(json)
}

pub fn cmd_stats(corpus: &Path) -> Result<String> {
    let (records, manifest) = import_corpus(corpus)?;
    Ok(render_stats(&compute_stats(&records), &manifest.config.languages))
}

fn hyperparams(a: &HyperArgs) -> Result<Hyperparams> {
    let mut h = match &a.config {
        Some(path) => RunConfig::load(path)?.baseline,
        None => Hyperparams::default(),
    };
    if let Some(v) = a.learning_rate {
        h.learning_rate = v;
    }
    if let Some(v) = a.epochs {
        h.epochs = v;
    }
    if let Some(v) = a.l2 {
        h.l2 = v;
    }
    if let Some(v) = a.seed {
        h.seed = v;
    }
    Ok(h)
}

fn split_of<'a>(records: &'a [SentenceRecord], language: &str, split: Split) -> Vec<&'a SentenceRecord> {
    records.iter().filter(|r| r.language == language && r.split == split).collect()
}

fn language_records(corpus: &Path, language: &str) -> Result<Vec<SentenceRecord>> {
    let (records, manifest) = import_corpus(corpus)?;
    if !manifest.sentence_counts.contains_key(language) {
        bail!(
            "language {language:?} is not in corpus {} (available: {})",
            corpus.display(),
            manifest.sentence_counts.keys().cloned().collect::<Vec<_>>().join(", ")
        );
    }
    Ok(records.into_iter().filter(|r| r.language == language).collect())
}

fn stamp(report: &mut MetricsReport, language: &str, split: Split) {
    report.language = language.to_string();
    report.split = split.as_str().to_string();
}

/// Trains on the train split and returns the model bytes plus the test
/// report.
pub fn train_and_evaluate(corpus: &Path, language: &str, hyper: Hyperparams) -> Result<(Vec<u8>, MetricsReport)> {
    let records = language_records(corpus, language)?;
    let pairs = |split| -> Vec<(&str, Label)> {
        split_of(&records, language, split)
            .into_iter()
            .map(|r| (r.text.as_str(), r.label))
            .collect()
    };
    let train = pairs(Split::Train);
    let validation = pairs(Split::Validation);
    let test: Vec<SentenceRecord> = split_of(&records, language, Split::Test).into_iter().cloned().collect();
    if test.is_empty() {
        bail!("language {language:?} has no test sentences");
    }
    let trained = train_with_validation(&train, &validation, hyper)?;
    if let (Some(first), Some(last)) = (trained.losses.first(), trained.losses.last()) {
        info!("training loss {first:.6} -> {last:.6}");
    }
    let mut report = evaluate(&trained.model, &test)?;
    stamp(&mut report, language, Split::Test);
    Ok((trained.model.to_bytes(), report))
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let hyper = hyperparams(&a.hyper)?;
    let (model, report) = train_and_evaluate(&a.corpus, &a.language, hyper)?;
    fs::write(&a.model_out, model).with_context(|| format!("writing {}", a.model_out.display()))?;
    if let Some(p) = &a.report_out {
        emit(Some(p), report.to_json().as_bytes())?;
    }
    emit(None, render_reports(&[(&a.language, &report)]).as_bytes())
}

fn load_report(path: &Path) -> Result<MetricsReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MetricsReport::from_json(&text).with_context(|| format!("invalid metrics report {}", path.display()))
}

fn report_header(r: &MetricsReport, path: &Path) -> String {
    match (r.model.is_empty(), r.language.is_empty()) {
        (false, false) => format!("{} {}", r.model, r.language),
        (true, false) => r.language.clone(),
        (false, true) => r.model.clone(),
        (true, true) => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    }
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    if !a.report.is_empty() {
        let reports = a.report.iter().map(|p| load_report(p)).collect::<Result<Vec<_>>>()?;
        let headers: Vec<String> = reports.iter().zip(&a.report).map(|(r, p)| report_header(r, p)).collect();
        let columns: Vec<(&str, &MetricsReport)> = headers.iter().map(String::as_str).zip(&reports).collect();
        return emit(None, render_reports(&columns).as_bytes());
    }
    let (Some(model_path), Some(corpus), Some(language)) = (&a.model, &a.corpus, &a.language) else {
        bail!("--model needs --corpus and --language");
    };
    let bytes = fs::read(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let model = BaselineModel::from_bytes(&bytes).with_context(|| format!("loading {}", model_path.display()))?;
    let records = language_records(corpus, language)?;
    let selected: Vec<SentenceRecord> = split_of(&records, language, a.split).into_iter().cloned().collect();
    if selected.is_empty() {
        bail!("language {language:?} has no {} sentences", a.split);
    }
    let mut report = evaluate(&model, &selected)?;
    stamp(&mut report, language, a.split);
    if let Some(p) = &a.report_out {
        emit(Some(p), report.to_json().as_bytes())?;
    }
    emit(None, render_reports(&[(language, &report)]).as_bytes())
}
