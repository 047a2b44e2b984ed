use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsbench_core::aggregate::{propagate_total_se, DEFAULT_B, DEFAULT_EPSILON};
use hsbench_core::bundle::{
    load_bundle, load_transcript, synthesize_transcript, AgentTranscript, BundleError, SchemaViolation, StudyBundle, SynthSpec,
};
use hsbench_core::driver::{bootstrap_study, evaluate, format_with_se, leaderboard, sensitivity, EvalOptions, EvaluationReport};
use hsbench_core::evidence::PriorSpec;
use hsbench_core::parser::{parse_p_value, parse_statistic};
use serde::Serialize;
use serde_json::json;

const DEFAULT_GRID: &str = "0.5,0.6,0.7071,0.8,0.9,1.0";

#[derive(Parser)]
#[command(name = "hsbench", version, about = "Score agent transcripts against human study results")]
struct Cli {
    /// key=value file with defaults (r_t, r_anova, B, seed, jobs, epsilon, normalize)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a bundle directory and list every schema violation
    Validate { bundle: PathBuf },
    /// Score one transcript against one bundle
    Score {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        transcript: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a leaderboard from a directory of report.json files
    Leaderboard {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Participant bootstrap SEs for one or more bundle/transcript pairs
    Bootstrap {
        #[arg(long = "bundle", required = true)]
        bundles: Vec<PathBuf>,
        #[arg(long = "transcript", required = true)]
        transcripts: Vec<PathBuf>,
        #[arg(long = "B")]
        b: Option<usize>,
        #[arg(long, env = "HSBENCH_SEED")]
        seed: Option<u64>,
        #[arg(long, env = "HSBENCH_JOBS")]
        jobs: Option<usize>,
        #[command(flatten)]
        eval: EvalArgs,
        /// Also write each report, with its SE, into this directory
        #[arg(long)]
        reports_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-score agents across a grid of t-prior scales
    Sensitivity {
        #[arg(long = "bundle", required = true)]
        bundles: Vec<PathBuf>,
        /// A transcript file (single bundle) or a directory of <study_id>.json
        #[arg(long = "agent", required = true)]
        agents: Vec<PathBuf>,
        #[arg(long, default_value = DEFAULT_GRID, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(long, env = "HSBENCH_JOBS")]
        jobs: Option<usize>,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a statistic or p-value string and echo the typed result
    Parse {
        #[arg(long, conflicts_with = "p", required_unless_present = "p")]
        stat: Option<String>,
        #[arg(long)]
        p: Option<String>,
    },
    /// Generate a synthetic transcript from a response-distribution spec
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, env = "HSBENCH_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct EvalArgs {
    /// Prior scales, e.g. r_t=0.7071,r_anova=0.5
    #[arg(long)]
    priors: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Add the self-agreement normalized PAS to reports
    #[arg(long)]
    normalize: bool,
}

enum CliError {
    Usage(String),
    Schema(Vec<SchemaViolation>),
    Io(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
            CliError::Usage(_) => 64,
        }
    }

    fn report(&self) {
        let mut err = std::io::stderr().lock();
        let line = |kind: &str, message: &str| json!({ "error": kind, "message": message }).to_string();
        let out = match self {
            CliError::Schema(v) => v
                .iter()
                .map(|x| json!({ "error": "schema", "path": x.path, "message": x.message }).to_string())
                .collect::<Vec<_>>()
                .join("\n"),
            CliError::Io(m) => line("io", m),
            CliError::Internal(m) => line("internal", m),
            CliError::Usage(m) => line("usage", m),
        };
        let _ = writeln!(err, "{out}");
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        match e {
            BundleError::Io { .. } => CliError::Io(e.to_string()),
            BundleError::Schema(v) => CliError::Schema(v),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Settings from the key=value config file; flags and environment win.
#[derive(Default)]
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            let key = k.trim().to_string();
            if !["r_t", "r_anova", "B", "seed", "jobs", "epsilon", "normalize"].contains(&key.as_str()) {
                return Err(CliError::Usage(format!("{}:{}: unknown key {key:?}", path.display(), i + 1)));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| CliError::Usage(format!("config {key}={v} is not valid"))),
        }
    }
}

fn priors(args: &EvalArgs, cfg: &Config) -> Result<PriorSpec> {
    let mut p = PriorSpec::default();
    if let Some(v) = cfg.get("r_t")? {
        p.r_t = v;
    }
    if let Some(v) = cfg.get("r_anova")? {
        p.r_anova = v;
    }
    if let Some(text) = &args.priors {
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| CliError::Usage(format!("--priors entry {part:?} is not key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("--priors value {v:?} is not a number")))?;
            match k.trim() {
                "r_t" => p.r_t = v,
                "r_anova" => p.r_anova = v,
                other => return Err(CliError::Usage(format!("unknown prior {other:?}"))),
            }
        }
    }
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn options(args: &EvalArgs, cfg: &Config) -> Result<EvalOptions> {
    let epsilon = match args.epsilon {
        Some(e) => e,
        None => cfg.get("epsilon")?.unwrap_or(DEFAULT_EPSILON),
    };
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CliError::Usage(format!("epsilon {epsilon} outside (0, 0.5)")));
    }
    let normalize = args.normalize || cfg.get("normalize")?.unwrap_or(false);
    Ok(EvalOptions { epsilon, normalize })
}

fn jobs(flag: Option<usize>, cfg: &Config) -> Result<usize> {
    let j = match flag {
        Some(j) => j,
        None => cfg.get("jobs")?.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    if j == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(j)
}

fn seed(flag: Option<u64>, cfg: &Config) -> Result<u64> {
    match flag {
        Some(s) => Ok(s),
        None => cfg.get("seed")?.ok_or_else(|| CliError::Usage("--seed is required (or HSBENCH_SEED, or seed= in --config)".into())),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| CliError::Internal(e.to_string()))
}

fn check_report(r: &EvaluationReport, bundle: &StudyBundle) -> Result<()> {
    if r.test_count() != bundle.test_count() {
        return Err(CliError::Internal(format!(
            "{}: {} tests in bundle but {} scored or excluded",
            r.study_id,
            bundle.test_count(),
            r.test_count()
        )));
    }
    Ok(())
}

fn score_one(bundle: &StudyBundle, t: &AgentTranscript, p: &PriorSpec, o: &EvalOptions) -> Result<EvaluationReport> {
    let r = evaluate(bundle, t, p, o).map_err(|e| CliError::Internal(e.to_string()))?;
    check_report(&r, bundle)?;
    Ok(r)
}

fn read_report(path: &Path) -> Result<EvaluationReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(vec![SchemaViolation { path: path.display().to_string(), message: e.to_string() }]))
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn leaderboard_csv(reports: &[EvaluationReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["rank", "model", "method", "studies", "pas", "ecs", "cognition", "strategic", "social"];
    w.write_record(header).map_err(|e| CliError::Internal(e.to_string()))?;
    for (i, row) in leaderboard(reports).iter().enumerate() {
        let domain = |d: &str| format_with_se(row.domains.get(d).copied().flatten(), None);
        let record = [
            (i + 1).to_string(),
            row.model.clone(),
            row.method.clone(),
            row.studies.to_string(),
            format_with_se(row.pas, row.pas_se),
            format_with_se(row.ecs, None),
            domain("cognition"),
            domain("strategic"),
            domain("social"),
        ];
        w.write_record(&record).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn report_file_name(r: &EvaluationReport) -> String {
    let clean = |s: &str| s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect::<String>();
    format!("{}__{}__{}.json", clean(&r.model), clean(&r.method), clean(&r.study_id))
}

/// Transcripts for one agent, in bundle order.
fn agent_runs(agent: &Path, bundles: &[StudyBundle]) -> Result<Vec<AgentTranscript>> {
    if agent.is_dir() {
        bundles.iter().map(|b| Ok(load_transcript(&agent.join(format!("{}.json", b.study_id)))?)).collect()
    } else if bundles.len() == 1 {
        Ok(vec![load_transcript(agent)?])
    } else {
        Err(CliError::Usage(format!("{}: with several bundles an agent must be a directory of <study_id>.json", agent.display())))
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Validate { bundle } => {
            let b = load_bundle(&bundle)?;
            let summary = json!({
                "study_id": b.study_id,
                "domain": b.domain,
                "findings": b.findings.len(),
                "tests": b.test_count(),
                "warnings": b.warnings,
            });
            emit(None, &to_json(&summary)?)
        }
        Command::Score { bundle, transcript, eval, out } => {
            let p = priors(&eval, &cfg)?;
            let o = options(&eval, &cfg)?;
            let b = load_bundle(&bundle)?;
            let t = load_transcript(&transcript)?;
            emit(out.as_deref(), &to_json(&score_one(&b, &t, &p, &o)?)?)
        }
        Command::Leaderboard { reports, out } => {
            let files = json_files(&reports)?;
            if files.is_empty() {
                return Err(CliError::Usage(format!("no .json reports in {}", reports.display())));
            }
            let reports = files.iter().map(|f| read_report(f)).collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &leaderboard_csv(&reports)?)
        }
        Command::Bootstrap { bundles, transcripts, b, seed: seed_flag, jobs: jobs_flag, eval, reports_dir, out } => {
            if bundles.len() != transcripts.len() {
                return Err(CliError::Usage(format!(
                    "{} --bundle but {} --transcript; give them in pairs",
                    bundles.len(),
                    transcripts.len()
                )));
            }
            let seed = seed(seed_flag, &cfg)?;
            let jobs = jobs(jobs_flag, &cfg)?;
            let b_count = match b {
                Some(b) => b,
                None => cfg.get("B")?.unwrap_or(DEFAULT_B),
            };
            if b_count < 2 {
                return Err(CliError::Usage("--B must be at least 2".into()));
            }
            let p = priors(&eval, &cfg)?;
            let o = options(&eval, &cfg)?;
            let mut rows = Vec::new();
            let mut ses = Vec::new();
            for (i, (bp, tp)) in bundles.iter().zip(&transcripts).enumerate() {
                let bundle = load_bundle(bp)?;
                let t = load_transcript(tp)?;
                let mut report = score_one(&bundle, &t, &p, &o)?;
                let stream = u32::try_from(i).map_err(|_| CliError::Usage("too many studies".into()))?;
                let boot = bootstrap_study(&bundle, &t, &p, &o, b_count, seed, stream, jobs)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                report.bootstrap_se = boot.se;
                if let Some(se) = boot.se {
                    ses.push(se);
                }
                let defined = boot.replicates.iter().filter(|r| r.is_some()).count();
                rows.push(json!({
                    "study_id": report.study_id,
                    "model": report.model,
                    "method": report.method,
                    "pas": report.pas,
                    "se": boot.se,
                    "defined_replicates": defined,
                    "formatted": format_with_se(report.pas, boot.se),
                }));
                if let Some(dir) = &reports_dir {
                    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
                    emit(Some(&dir.join(report_file_name(&report))), &to_json(&report)?)?;
                }
            }
            let summary = json!({
                "B": b_count,
                "seed": seed,
                "studies": rows,
                "total_se": propagate_total_se(&ses),
            });
            emit(out.as_deref(), &to_json(&summary)?)
        }
        Command::Sensitivity { bundles, agents, grid, jobs: jobs_flag, eval, out } => {
            let jobs = jobs(jobs_flag, &cfg)?;
            let p = priors(&eval, &cfg)?;
            let o = options(&eval, &cfg)?;
            let loaded = bundles.iter().map(|b| Ok(load_bundle(b)?)).collect::<Result<Vec<_>>>()?;
            let transcripts = agents.iter().map(|a| agent_runs(a, &loaded)).collect::<Result<Vec<_>>>()?;
            let runs: Vec<Vec<(&StudyBundle, &AgentTranscript)>> =
                transcripts.iter().map(|ts| loaded.iter().zip(ts).collect()).collect();
            let report = sensitivity(&runs, p, &grid, &o, jobs).map_err(|e| CliError::Usage(e.to_string()))?;
            let labels: Vec<String> = agents.iter().map(|a| a.display().to_string()).collect();
            emit(out.as_deref(), &to_json(&json!({ "agents": labels, "report": report }))?)
        }
        Command::Parse { stat, p } => {
            let value = match (stat, p) {
                (Some(s), _) => serde_json::to_value(parse_statistic(&s).map_err(|e| CliError::Schema(vec![SchemaViolation {
                    path: "--stat".into(),
                    message: e.to_string(),
                }]))?),
                (None, Some(s)) => serde_json::to_value(parse_p_value(&s).map_err(|e| CliError::Schema(vec![SchemaViolation {
                    path: "--p".into(),
                    message: e.to_string(),
                }]))?),
                (None, None) => return Err(CliError::Usage("give --stat or --p".into())),
            }
            .map_err(|e| CliError::Internal(e.to_string()))?;
            emit(None, &to_json(&value)?)
        }
        Command::Synth { spec, seed: seed_flag, out } => {
            let seed = seed(seed_flag, &cfg)?;
            let text = fs::read_to_string(&spec).map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec.display())))?;
            let spec: SynthSpec = serde_json::from_str(&text).map_err(|e| {
                CliError::Schema(vec![SchemaViolation { path: spec.display().to_string(), message: e.to_string() }])
            })?;
            let t = synthesize_transcript(&spec, seed).map_err(|e| CliError::Schema(vec![SchemaViolation { path: "spec".into(), message: e }]))?;
            emit(out.as_deref(), &to_json(&t)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            err.report();
            return ExitCode::from(err.code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.code())
        }
    }
}
