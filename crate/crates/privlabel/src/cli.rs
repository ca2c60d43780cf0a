//! The `privlabel` command line.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use privlabel_core::annotate::{annotate, extract_practices, AnnotatorBackend, KeywordBackend, NullBackend, PracticeSet};
use privlabel_core::consistency::{check_apple_label_vs_policy, check_cross, check_google_label_vs_policy, ConsistencyReport, CrossReport};
use privlabel_core::diff::diff_snapshots;
use privlabel_core::domain::normalize_url;
use privlabel_core::matcher::{match_apps, MatchResult};
use privlabel_core::model::{LabeledApp, Platform, PolicyDocument};
use privlabel_core::policy::{clean_and_filter, PipelineConfig, PolicyLexicon, RejectReason, Rejection};
use privlabel_core::stats::{aggregate, apply_download_filter};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, ConfigError};
use crate::external::{load_external_annotations, load_scores, ExternalError};
use crate::extract::{extract_text_with, DEFAULT_LINK_DENSITY};
use crate::fetch::{write_raw, FetchConfig, FetchLogEntry, FetchStatus, Fetcher, LOG_FILE};
use crate::ingest::{read_apps, read_snapshot, IngestError};
use crate::jsonl::{self, JsonlError};
use crate::report::{emit_report, strata_csv, ReportError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "privlabel", version, about = "Privacy label and privacy policy consistency analysis")]
pub struct Cli {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// error, warn, info, debug, or trace.
    #[arg(long, global = true)]
    pub log_level: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate app records and write them back in canonical form.
    Ingest(IngestArgs),
    /// Download policy pages.
    FetchPolicies(FetchArgs),
    /// Extract, gate, and segment fetched pages.
    Clean(CleanArgs),
    /// Tag every segment.
    Annotate(AnnotateArgs),
    /// Turn tagged documents into practice sets.
    ExtractPractices(ExtractArgs),
    /// Link apps listed on both stores.
    Match(MatchArgs),
    /// Compare labels with their policies.
    CheckPolicy(CheckPolicyArgs),
    /// Compare the two labels of each linked app.
    CheckCross(CheckCrossArgs),
    /// Label changes across snapshots.
    Diff(DiffArgs),
    /// Corpus statistics.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write each distinct policy URL, one per line.
    #[arg(long)]
    pub urls: Option<PathBuf>,
    /// Log and drop bad lines instead of failing.
    #[arg(long)]
    pub skip_invalid: bool,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// One URL per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Most requests per URL, first try included.
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long)]
    pub min_interval_ms: Option<u64>,
    #[arg(long)]
    pub backoff_ms: Option<u64>,
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    #[arg(long)]
    pub user_agent: Option<String>,
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    /// Directory written by fetch-policies.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub rejections: Option<PathBuf>,
    /// JSONL of `{url, score}` replacing the lexicon score.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub min_words: Option<usize>,
    #[arg(long)]
    pub merge_floor: Option<usize>,
    #[arg(long)]
    pub link_density: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// keyword, null, or file:<path>
    #[arg(long)]
    pub backend: Option<String>,
    /// Tags scored below this are not stored.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub google: PathBuf,
    #[arg(long)]
    pub apple: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub ambiguous: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckPolicyArgs {
    /// Apps with labels.
    #[arg(long)]
    pub labels: PathBuf,
    /// Output of extract-practices.
    #[arg(long)]
    pub practices: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckCrossArgs {
    #[arg(long)]
    pub matches: PathBuf,
    #[arg(long)]
    pub google: PathBuf,
    #[arg(long)]
    pub apple: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// Snapshot files in capture order, each beside its `.manifest.json`.
    #[arg(long, num_args = 2.., required = true)]
    pub snapshots: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub apps: PathBuf,
    /// Output of check-policy.
    #[arg(long)]
    pub policy_reports: Option<PathBuf>,
    /// Output of check-cross.
    #[arg(long)]
    pub cross: Option<PathBuf>,
    /// json or csv. csv writes the heatmap to --out and strata beside it.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep Google apps under the download threshold.
    #[arg(long)]
    pub no_download_filter: bool,
}

/// A policy's practices, keyed by the URL it was fetched from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PracticeRow {
    pub source_url: String,
    pub practices: PracticeSet,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl From<JsonlError> for Failure {
    fn from(e: JsonlError) -> Self {
        match e {
            JsonlError::Io { .. } => Failure::Io(e.to_string()),
            JsonlError::Parse { .. } => Failure::Data(e.to_string()),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        if e.is_data() {
            Failure::Data(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

impl From<ExternalError> for Failure {
    fn from(e: ExternalError) -> Self {
        match e {
            ExternalError::Io(e) => e.into(),
            e => Failure::Data(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Io(e.to_string()),
            ConfigError::Parse { .. } => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::UnsupportedFormat(_) => Failure::Usage(e.to_string()),
            ReportError::Csv(_) => Failure::Io(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            log::error!("{f}");
            eprintln!("error: {f}");
            f.code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let level = cli.log_level.clone().or(config.log_level.clone()).unwrap_or_else(|| "warn".into());
    let _ = env_logger::Builder::new().parse_filters(&level).try_init();
    if let Some(n) = cli.jobs.or(config.jobs) {
        if n == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::FetchPolicies(a) => fetch(a, &config),
        Command::Clean(a) => clean(a, &config),
        Command::Annotate(a) => annotate_cmd(a, &config),
        Command::ExtractPractices(a) => extract(a, &config),
        Command::Match(a) => match_cmd(a),
        Command::CheckPolicy(a) => check_policy(a),
        Command::CheckCross(a) => check_cross_cmd(a),
        Command::Diff(a) => diff(a),
        Command::Report(a) => report(a, &config),
    }
}

fn ingest(a: IngestArgs) -> Result<(), Failure> {
    let apps = read_apps(&a.input, a.skip_invalid)?;
    jsonl::write(&a.out, &apps)?;
    if let Some(path) = a.urls {
        let mut urls: Vec<&str> = apps.iter().filter_map(|x| x.record.policy_url.as_deref()).collect();
        urls.sort_unstable();
        urls.dedup();
        let mut text = urls.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write_file(&path, text.as_bytes())?;
    }
    log::info!("{} apps written", apps.len());
    Ok(())
}

fn fetch(a: FetchArgs, config: &Config) -> Result<(), Failure> {
    let c = &config.fetch;
    let d = FetchConfig::default();
    let ms = Duration::from_millis;
    let fc = FetchConfig {
        max_attempts: a.max_retries.or(c.max_retries).unwrap_or(d.max_attempts),
        min_interval: a.min_interval_ms.or(c.min_interval_ms).map_or(d.min_interval, ms),
        backoff_base: a.backoff_ms.or(c.backoff_ms).map_or(d.backoff_base, ms),
        timeout: a.timeout_ms.or(c.timeout_ms).map_or(d.timeout, ms),
        user_agent: a.user_agent.or(c.user_agent.clone()).unwrap_or(d.user_agent),
        ..d
    };
    if fc.max_attempts == 0 {
        return Err(Failure::Usage("--max-retries must be at least 1".into()));
    }
    let text = fs::read_to_string(&a.input).map_err(|e| io_err(&a.input, e))?;
    let urls: Vec<String> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect();
    let results = Fetcher::new(fc).fetch_all(&urls);
    let log = write_raw(&a.out, &results)?;
    let ok = log.iter().filter(|e| e.status == FetchStatus::Ok).count();
    log::info!("{ok}/{} fetched", log.len());
    Ok(())
}

/// Pages to clean: from the fetch log when there is one, else every file.
fn raw_inputs(dir: &Path) -> Result<Vec<FetchLogEntry>, Failure> {
    let log = dir.join(LOG_FILE);
    if log.exists() {
        return Ok(jsonl::read(&log)?);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files
        .into_iter()
        .map(|p| FetchLogEntry {
            url: p.display().to_string(),
            status: FetchStatus::Ok,
            attempts: 1,
            content_type: None,
            file: p.file_name().map(|f| f.to_string_lossy().into_owned()),
        })
        .collect())
}

fn unsupported(url: &str) -> Rejection {
    Rejection {
        source_url: url.into(),
        reason: RejectReason::UnsupportedFormat,
        word_count: 0,
        language: privlabel_core::lang::UNDETERMINED.into(),
        language_confidence: 0.0,
    }
}

fn clean(a: CleanArgs, config: &Config) -> Result<(), Failure> {
    let c = &config.clean;
    let pipeline = PipelineConfig {
        min_words: a.min_words.or(c.min_words).unwrap_or(privlabel_core::policy::DEFAULT_MIN_WORDS),
        merge_floor: a.merge_floor.or(c.merge_floor).unwrap_or(privlabel_core::policy::DEFAULT_MERGE_FLOOR),
    };
    let density = a.link_density.or(c.link_density).unwrap_or(DEFAULT_LINK_DENSITY);
    let scores = match &a.scores {
        Some(p) => load_scores(p)?,
        None => HashMap::new(),
    };
    let lexicon = PolicyLexicon::bundled();
    let detector = privlabel_core::lang::bundled();
    let inputs = raw_inputs(&a.input)?;

    let outcomes: Vec<Result<Option<Result<PolicyDocument, Rejection>>, Failure>> = inputs
        .par_iter()
        .map(|entry| {
            let file = match (&entry.status, &entry.file) {
                (FetchStatus::Ok, Some(f)) => a.input.join(f),
                (FetchStatus::NonHtml, _) => return Ok(Some(Err(unsupported(&entry.url)))),
                _ => return Ok(None),
            };
            let bytes = fs::read(&file).map_err(|e| io_err(&file, e))?;
            if bytes.starts_with(b"%PDF") {
                return Ok(Some(Err(unsupported(&entry.url))));
            }
            let text = match extract_text_with(&bytes, entry.content_type.as_deref(), density) {
                Ok(t) => t,
                Err(e) => {
                    log::warn!("{}: {e}", entry.url);
                    return Ok(Some(Err(unsupported(&entry.url))));
                }
            };
            let mut result = clean_and_filter(&entry.url, &text, &pipeline, detector, &lexicon);
            if let (Ok(doc), Some(&s)) = (&mut result, scores.get(&entry.url)) {
                doc.policy_score = s;
                doc.is_policy = s >= lexicon.threshold;
            }
            Ok(Some(result))
        })
        .collect();

    let (mut docs, mut rejected) = (Vec::new(), Vec::new());
    for o in outcomes {
        match o? {
            Some(Ok(d)) => docs.push(d),
            Some(Err(r)) => rejected.push(r),
            None => {}
        }
    }
    jsonl::write(&a.out, &docs)?;
    if let Some(p) = &a.rejections {
        jsonl::write(p, &rejected)?;
    }
    log::info!("{} documents kept, {} rejected", docs.len(), rejected.len());
    Ok(())
}

fn backend(choice: &str) -> Result<Box<dyn AnnotatorBackend>, Failure> {
    match choice {
        "keyword" => Ok(Box::new(KeywordBackend::bundled())),
        "null" => Ok(Box::new(NullBackend)),
        s => match s.strip_prefix("file:") {
            Some(p) => Ok(Box::new(load_external_annotations(Path::new(p))?)),
            None => Err(Failure::Usage(format!("unknown backend `{s}` (keyword, null, or file:<path>)"))),
        },
    }
}

fn threshold(v: Option<f64>) -> Result<f64, Failure> {
    let t = v.unwrap_or(privlabel_core::annotate::DEFAULT_THRESHOLD);
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(Failure::Usage(format!("threshold {t} outside [0, 1]")))
    }
}

fn annotate_cmd(a: AnnotateArgs, config: &Config) -> Result<(), Failure> {
    let c = &config.annotate;
    let choice = a.backend.or(c.backend.clone()).unwrap_or_else(|| "keyword".into());
    let t = threshold(a.threshold.or(c.threshold))?;
    let b = backend(&choice)?;
    let docs: Vec<PolicyDocument> = jsonl::read(&a.input)?;
    let tagged: Result<Vec<PolicyDocument>, _> = docs
        .par_iter()
        .map(|d| {
            let mut out = annotate(d, b.as_ref())?;
            for s in &mut out.segments {
                s.annotations = s.annotations.iter().filter(|tag| tag.score.get() >= t).collect();
            }
            Ok(out)
        })
        .collect();
    let tagged = tagged.map_err(|e: privlabel_core::annotate::AnnotateError| Failure::Data(e.to_string()))?;
    jsonl::write(&a.out, &tagged)?;
    Ok(())
}

fn extract(a: ExtractArgs, config: &Config) -> Result<(), Failure> {
    let t = threshold(a.threshold.or(config.annotate.threshold))?;
    let docs: Vec<PolicyDocument> = jsonl::read(&a.input)?;
    let rows: Vec<PracticeRow> = docs
        .par_iter()
        .map(|d| PracticeRow { source_url: d.source_url.clone(), practices: extract_practices(d, t) })
        .collect();
    jsonl::write(&a.out, &rows)?;
    Ok(())
}

fn of_platform(apps: Vec<LabeledApp>, p: Platform) -> Vec<LabeledApp> {
    apps.into_iter().filter(|x| x.record.platform == p).collect()
}

fn match_cmd(a: MatchArgs) -> Result<(), Failure> {
    let google = of_platform(read_apps(&a.google, false)?, Platform::Google);
    let apple = of_platform(read_apps(&a.apple, false)?, Platform::Apple);
    let g: Vec<_> = google.into_iter().map(|x| x.record).collect();
    let ap: Vec<_> = apple.into_iter().map(|x| x.record).collect();
    let out = match_apps(&g, &ap);
    jsonl::write(&a.out, &out.matches)?;
    if let Some(p) = &a.ambiguous {
        jsonl::write(p, &out.ambiguous)?;
    }
    log::info!("{} matches, {} ambiguity reports", out.matches.len(), out.ambiguous.len());
    Ok(())
}

fn check_policy(a: CheckPolicyArgs) -> Result<(), Failure> {
    let apps = read_apps(&a.labels, false)?;
    let rows: Vec<PracticeRow> = jsonl::read(&a.practices)?;
    let by_url: HashMap<String, &PracticeSet> = rows
        .iter()
        .map(|r| (normalize_url(&r.source_url).unwrap_or_else(|_| r.source_url.clone()), &r.practices))
        .collect();
    let mut reports: Vec<ConsistencyReport> = apps
        .par_iter()
        .filter_map(|app| {
            let url = normalize_url(app.record.policy_url.as_deref()?).ok()?;
            let practices = by_url.get(&url)?;
            let r = match (&app.google_label, &app.apple_label) {
                (Some(g), _) => check_google_label_vs_policy(g, practices),
                (_, Some(l)) => check_apple_label_vs_policy(l, practices),
                _ => return None,
            };
            Some(r.with_app_id(app.record.app_id.clone()))
        })
        .collect();
    reports.sort_by(|x, y| (x.platform, &x.app_id).cmp(&(y.platform, &y.app_id)));
    log::info!("{} of {} apps checked", reports.len(), apps.len());
    jsonl::write(&a.out, &reports)?;
    Ok(())
}

fn check_cross_cmd(a: CheckCrossArgs) -> Result<(), Failure> {
    let matches: Vec<MatchResult> = jsonl::read(&a.matches)?;
    let google: BTreeMap<String, LabeledApp> =
        read_apps(&a.google, false)?.into_iter().map(|x| (x.record.app_id.clone(), x)).collect();
    let apple: BTreeMap<String, LabeledApp> =
        read_apps(&a.apple, false)?.into_iter().map(|x| (x.record.app_id.clone(), x)).collect();
    let reports: Vec<CrossReport> = matches
        .par_iter()
        .filter_map(|m| {
            let g = google.get(&m.google_app_id)?.google_label.as_ref()?;
            let l = apple.get(&m.apple_app_id)?.apple_label.as_ref()?;
            Some(check_cross(m, g, l))
        })
        .collect();
    log::info!("{} of {} pairs have both labels", reports.len(), matches.len());
    jsonl::write(&a.out, &reports)?;
    Ok(())
}

fn diff(a: DiffArgs) -> Result<(), Failure> {
    let series = a.snapshots.iter().map(|p| read_snapshot(p)).collect::<Result<Vec<_>, _>>()?;
    let report = diff_snapshots(&series).map_err(|e| Failure::Data(e.to_string()))?;
    jsonl::write(&a.out, &report.events)?;
    Ok(())
}

fn report(a: ReportArgs, config: &Config) -> Result<(), Failure> {
    let format = a.format.or(config.report.format.clone()).unwrap_or_else(|| "json".into());
    let mut apps = read_apps(&a.apps, false)?;
    if !a.no_download_filter {
        apps = apply_download_filter(apps);
    }
    let policy: Vec<ConsistencyReport> = match &a.policy_reports {
        Some(p) => jsonl::read(p)?,
        None => Vec::new(),
    };
    let cross: Vec<CrossReport> = match &a.cross {
        Some(p) => jsonl::read(p)?,
        None => Vec::new(),
    };
    let stats = aggregate(&apps, &policy, &cross);
    let bytes = emit_report(&stats, &format)?;
    write_file(&a.out, &bytes)?;
    if format == "csv" {
        let stem = a.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        write_file(&a.out.with_file_name(format!("{stem}.strata.csv")), &strata_csv(&stats)?)?;
    }
    Ok(())
}
