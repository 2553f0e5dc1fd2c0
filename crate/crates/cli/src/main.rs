//! `cpgnorm` command-line tool.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cpgnorm::attack::{attack, AttackSpec};
use cpgnorm::compare::corpus::{compare_corpus, load_corpus, normalize_ast, prepare, CorpusError, Submission};
use cpgnorm::compare::{to_json, write_csv};
use cpgnorm::evalx::corpus::generate;
use cpgnorm::evalx::experiment::{run_experiment, ExperimentConfig};
use cpgnorm::frontend::printer::print_program;
use cpgnorm::frontend::SourceUnit;
use cpgnorm::linearize::dump;
use serde_json::json;

use config::{FileConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "cpgnorm", version, about = "Normalizing plagiarism detector for MiniJ submissions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare every pair of submissions and write CSV/JSON results.
    Detect(Common),
    /// Write the normalized, pretty-printed sources of each submission.
    Normalize(Common),
    /// Write the token sequence of each submission.
    Tokenize(Common),
    /// Attack every submission and write the attacked corpus with edit logs.
    Obfuscate(Common),
    /// Attack, detect with both approaches and write the experiment report.
    Evaluate(Common),
    /// Write a synthetic corpus of generated programs.
    Generate(Common),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Input corpus directory (for `generate`, the output directory).
    pub input: Option<PathBuf>,
    /// Output directory; `--out` does the same.
    pub output: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Key-value TOML file; command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub min_match: Option<usize>,
    /// `baseline` or `normalized`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Transformations to switch off, e.g. `T5,T12`.
    #[arg(long, value_delimiter = ',')]
    pub disable: Vec<String>,
    #[arg(long)]
    pub no_reorder: bool,
    #[arg(long)]
    pub no_dead_code: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub intensity: Option<usize>,
    /// `insertion` or `refactoring`.
    #[arg(long, alias = "attack")]
    pub kind: Option<String>,
    /// Programs that receive a plagiarized copy (`evaluate`).
    #[arg(long)]
    pub attacked: Option<usize>,
    /// Programs to generate (`generate`, or `evaluate` without input).
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Pipeline(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Pipeline(_) => 2,
        }
    }

    fn record(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Pipeline(m) => ("pipeline", m),
        };
        json!({ "error": { "kind": kind, "message": message, "exitCode": self.code() } })
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Pipeline(m) => f.write_str(m),
        }
    }
}

fn pipeline(e: impl std::fmt::Display) -> Failure {
    Failure::Pipeline(e.to_string())
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| pipeline(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| pipeline(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(pipeline)?;
    text.push('\n');
    write(path, &text)
}

fn corpus(cfg: &RunConfig) -> Result<Vec<Submission>, Failure> {
    let dir = cfg.input.as_ref().ok_or_else(|| Failure::Usage("missing input directory".into()))?;
    if !dir.is_dir() {
        return Err(Failure::Usage(format!("{}: not a directory", dir.display())));
    }
    load_corpus(dir).map_err(|e| match e {
        CorpusError::Empty(_) => Failure::Usage(e.to_string()),
        CorpusError::Io { .. } => Failure::Pipeline(e.to_string()),
    })
}

struct Outcome {
    artifacts: Vec<String>,
    failures: Vec<String>,
}

fn detect(cfg: &RunConfig, subs: &[Submission]) -> Result<Outcome, Failure> {
    let run = compare_corpus(subs, cfg.min_match, cfg.mode, &cfg.normalization);
    let failures: Vec<String> = run.failures.iter().map(|f| f.to_string()).collect();
    if failures.len() == subs.len() {
        return Err(Failure::Pipeline(format!("no submission could be processed; first: {}", failures[0])));
    }
    let mut csv = Vec::new();
    write_csv(&mut csv, &run.results).map_err(pipeline)?;
    write(&cfg.out.join("results.csv"), &String::from_utf8_lossy(&csv))?;
    let mut doc = to_json(&run.results);
    doc["failures"] = json!(failures);
    write_json(&cfg.out.join("results.json"), &doc)?;
    Ok(Outcome { artifacts: vec!["results.csv".into(), "results.json".into()], failures })
}

fn per_submission<F>(subs: &[Submission], mut f: F) -> Result<Outcome, Failure>
where
    F: FnMut(&Submission) -> Result<Vec<String>, String>,
{
    let mut out = Outcome { artifacts: Vec::new(), failures: Vec::new() };
    for s in subs {
        match f(s) {
            Ok(a) => out.artifacts.extend(a),
            Err(e) => out.failures.push(e),
        }
    }
    if out.failures.len() == subs.len() {
        return Err(Failure::Pipeline(format!("no submission could be processed; first: {}", out.failures[0])));
    }
    Ok(out)
}

fn write_units(dir: &Path, id: &str, units: &[(String, String)]) -> Result<Vec<String>, String> {
    let mut arts = Vec::new();
    for (path, text) in units {
        let rel = format!("{id}/{path}");
        write(&dir.join(&rel), text).map_err(|e| e.to_string())?;
        arts.push(rel);
    }
    Ok(arts)
}

fn normalize_cmd(cfg: &RunConfig, subs: &[Submission]) -> Result<Outcome, Failure> {
    per_submission(subs, |s| {
        let ast = s.load().map_err(|e| format!("{}: {e}", s.id))?;
        let ast = normalize_ast(ast, &cfg.normalization).map_err(|e| format!("{}: {e}", s.id))?;
        write_units(&cfg.out, &s.id, &print_program(&ast))
    })
}

fn tokenize_cmd(cfg: &RunConfig, subs: &[Submission]) -> Result<Outcome, Failure> {
    per_submission(subs, |s| {
        let seq = prepare(s, cfg.mode, &cfg.normalization).map_err(|e| e.to_string())?;
        let rel = format!("{}.tokens", s.id);
        write(&cfg.out.join(&rel), &dump(&seq)).map_err(|e| e.to_string())?;
        Ok(vec![rel])
    })
}

fn obfuscate_cmd(cfg: &RunConfig, subs: &[Submission]) -> Result<Outcome, Failure> {
    let spec = cfg.attack_spec();
    per_submission(subs, |s| attack_one(&cfg.out, s, &spec))
}

fn attack_one(out: &Path, s: &Submission, spec: &AttackSpec) -> Result<Vec<String>, String> {
    let ast = s.load().map_err(|e| format!("{}: {e}", s.id))?;
    let inputs = if s.inputs.is_empty() { vec![Vec::new()] } else { s.inputs.clone() };
    let a = attack(&ast, spec, &inputs).map_err(|e| format!("{}: {e}", s.id))?;
    let units: Vec<SourceUnit> = print_program(&a.ast).into_iter().map(|(p, t)| SourceUnit::new(p, t)).collect();
    let attacked = Submission { id: s.id.clone(), units, inputs: s.inputs.clone() };
    attacked.write_to(out).map_err(|e| format!("{}: {e}", s.id))?;
    let log = format!("{}.edits.json", s.id);
    let mut doc = a.log_json();
    doc["submission"] = json!(s.id);
    write_json(&out.join(&log), &doc).map_err(|e| e.to_string())?;
    Ok(vec![s.id.clone(), log])
}

fn evaluate_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let subs = match cfg.input {
        Some(_) => corpus(cfg)?,
        None => generate(cfg.count, cfg.seed),
    };
    let ecfg = ExperimentConfig {
        attack: cfg.attack_spec(),
        attacked: cfg.attacked,
        min_match: cfg.min_match,
        normalization: cfg.normalization.clone(),
    };
    let e = run_experiment(&subs, &ecfg).map_err(pipeline)?;
    write_json(&cfg.out.join("report.json"), &serde_json::to_value(&e.report).map_err(pipeline)?)?;
    let mut csv = Vec::new();
    e.report.write_csv(&mut csv).map_err(pipeline)?;
    write(&cfg.out.join("report.csv"), &String::from_utf8_lossy(&csv))?;
    let mut artifacts = vec!["report.json".to_string(), "report.csv".to_string()];
    for p in &e.plagiarisms {
        p.submission.write_to(&cfg.out.join("plagiarisms")).map_err(pipeline)?;
        let log = format!("plagiarisms/{}.edits.json", p.submission.id);
        write_json(&cfg.out.join(&log), &json!({ "submission": p.submission.id, "original": p.original, "edits": p.edits }))?;
        artifacts.push(log);
    }
    Ok(Outcome { artifacts, failures: e.report.pipeline_failures.clone() })
}

fn generate_cmd(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut artifacts = Vec::new();
    for s in generate(cfg.count, cfg.seed) {
        s.write_to(&cfg.out).map_err(pipeline)?;
        artifacts.push(s.id);
    }
    Ok(Outcome { artifacts, failures: Vec::new() })
}

fn execute(command: &Command) -> Result<(), Failure> {
    let (name, common) = match command {
        Command::Detect(c) => ("detect", c),
        Command::Normalize(c) => ("normalize", c),
        Command::Tokenize(c) => ("tokenize", c),
        Command::Obfuscate(c) => ("obfuscate", c),
        Command::Evaluate(c) => ("evaluate", c),
        Command::Generate(c) => ("generate", c),
    };
    let mut common = common.clone();
    if name == "generate" && common.out.is_none() && common.output.is_none() {
        common.output = common.input.take();
    }
    let file = match &common.config {
        Some(p) => FileConfig::read(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(name, &common, &file).map_err(Failure::Usage)?;
    if let Some(n) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(pipeline)?;
    }
    let outcome = match command {
        Command::Detect(_) => detect(&cfg, &corpus(&cfg)?)?,
        Command::Normalize(_) => normalize_cmd(&cfg, &corpus(&cfg)?)?,
        Command::Tokenize(_) => tokenize_cmd(&cfg, &corpus(&cfg)?)?,
        Command::Obfuscate(_) => obfuscate_cmd(&cfg, &corpus(&cfg)?)?,
        Command::Evaluate(_) => evaluate_cmd(&cfg)?,
        Command::Generate(_) => generate_cmd(&cfg)?,
    };
    for f in &outcome.failures {
        eprintln!("warning: {f}");
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "seed": cfg.seed,
        "config": cfg,
        "artifacts": outcome.artifacts,
        "failures": outcome.failures,
    });
    write_json(&cfg.out.join("manifest.json"), &manifest)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
