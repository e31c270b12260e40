//! Command implementations behind the `sprintcard` binary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sprintcard::compliance::{self, ComplianceError};
use sprintcard::domain::ProjectConfig;
use sprintcard::ingest::{self, CsvBundle, Format, LoadError};
use sprintcard::render::{self, CardLayout};
use sprintcard::synth::{self, Scenario, ScenarioSpec};

/// Process exit status. Higher codes win when a batch mixes failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Success = 0,
    Invalid = 1,
    Usage = 2,
    Io = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Parser)]
#[command(name = "sprintcard", version, about = "Scrum-compliance assessment of team project records")]
pub struct Cli {
    /// Input and output format; a directory argument implies csv-bundle.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Only print errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    CsvBundle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check team datasets and print their validation reports.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Assess team datasets and write their reports and optional cards.
    Assess(AssessArgs),
    /// Write a synthetic team dataset.
    Generate {
        /// One of: compliant, bulk_backfill, slacker, subteam_split, ramp_up, unestimated_heavy, overcommit.
        scenario: String,
        #[arg(long, default_value_t = 5)]
        team_size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Write <team>.card.svg.
    #[arg(long)]
    pub card: bool,
    /// Write <team>.report.json (always written; accepted for explicitness).
    #[arg(long)]
    pub report: bool,
    /// Write <team>.summary.txt.
    #[arg(long)]
    pub summary: bool,
    /// JSON object of configuration overrides.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single override such as gini_bad=0.05 or rubric.score_good=0.85.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Where command output goes.
pub struct Console<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub quiet: bool,
}

impl Console<'_> {
    fn info(&mut self, line: impl std::fmt::Display) {
        if !self.quiet {
            let _ = writeln!(self.out, "{line}");
        }
    }

    fn error(&mut self, line: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{line}");
    }
}

pub fn run(cli: &Cli, console: &mut Console<'_>) -> Status {
    match &cli.command {
        Command::Validate { paths } => cmd_validate(paths, cli.format, console),
        Command::Assess(args) => cmd_assess(args, cli.format, console),
        Command::Generate { scenario, team_size, seed, out } => {
            cmd_generate(scenario, *team_size, *seed, out, cli.format, console)
        }
    }
}

fn input_format(path: &Path, format: Option<FormatArg>) -> Format {
    match format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::CsvBundle) => Format::CsvBundle,
        None if path.is_dir() => Format::CsvBundle,
        None => Format::Json,
    }
}

fn load(path: &Path, format: Option<FormatArg>, console: &mut Console<'_>) -> Result<ingest::Parsed, Status> {
    ingest::load_dataset(path, input_format(path, format)).map_err(|e| {
        console.error(format!("FAILED {e}"));
        match e {
            LoadError::Io { .. } => Status::Io,
            LoadError::Parse { .. } => Status::Invalid,
        }
    })
}

pub fn cmd_validate(paths: &[PathBuf], format: Option<FormatArg>, console: &mut Console<'_>) -> Status {
    let mut status = Status::Success;
    for path in paths {
        let parsed = match load(path, format, console) {
            Ok(p) => p,
            Err(s) => {
                status = status.max(s);
                continue;
            }
        };
        let report = ingest::validate(&parsed.dataset);
        let shown = path.display();
        for d in parsed.warnings.iter().chain(&report.entries) {
            if d.severity == ingest::Severity::Error {
                console.error(format!("{shown}: {d}"));
            } else {
                console.info(format!("{shown}: {d}"));
            }
        }
        if report.is_accepted() {
            console.info(format!("OK {shown}"));
        } else {
            console.error(format!("INVALID {shown}: {} error(s)", report.errors().count()));
            status = status.max(Status::Invalid);
        }
    }
    status
}

/// Builds the JSON override object from `--config` and `--set`, the latter
/// taking precedence.
pub fn collect_overrides(config: Option<&Path>, set: &[String]) -> Result<serde_json::Value, (Status, String)> {
    let mut merged = serde_json::Map::new();
    if let Some(path) = config {
        let bytes = fs::read(path).map_err(|e| (Status::Io, format!("{}: {e}", path.display())))?;
        match serde_json::from_slice(&bytes) {
            Ok(serde_json::Value::Object(map)) => merged = map,
            Ok(_) => return Err((Status::Usage, format!("{}: expected a JSON object", path.display()))),
            Err(e) => return Err((Status::Usage, format!("{}: {e}", path.display()))),
        }
    }
    for item in set {
        let Some((key, raw)) = item.split_once('=') else {
            return Err((Status::Usage, format!("--set {item}: expected KEY=VALUE")));
        };
        let value = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_owned()));
        let mut slot = &mut merged;
        let parts: Vec<&str> = key.split('.').collect();
        for part in &parts[..parts.len() - 1] {
            let entry = slot.entry(part.to_string()).or_insert_with(|| serde_json::Value::Object(Default::default()));
            if !entry.is_object() {
                *entry = serde_json::Value::Object(Default::default());
            }
            slot = entry.as_object_mut().expect("object");
        }
        slot.insert(parts[parts.len() - 1].to_owned(), value);
    }
    Ok(serde_json::Value::Object(merged))
}

/// Keeps file names portable whatever the team id contains.
fn file_stem(team_id: &str) -> String {
    let stem: String = team_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    if stem.is_empty() || stem.starts_with('.') {
        format!("team{stem}")
    } else {
        stem
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn cmd_assess(args: &AssessArgs, format: Option<FormatArg>, console: &mut Console<'_>) -> Status {
    let overrides = match collect_overrides(args.config.as_deref(), &args.set) {
        Ok(v) => v,
        Err((status, msg)) => {
            console.error(msg);
            return status;
        }
    };
    // Reject malformed overrides once instead of once per team.
    match ingest::apply_config_overrides(&ProjectConfig::default(), &overrides, "config overrides") {
        Ok((_, warnings)) => warnings.iter().for_each(|w| console.error(w)),
        Err(e) => {
            console.error(e);
            return Status::Usage;
        }
    }

    let mut status = Status::Success;
    for path in &args.paths {
        let result = assess_one(path, args, format, &overrides, console);
        if let Err(s) = result {
            status = status.max(s);
        }
    }
    status
}

fn assess_one(
    path: &Path,
    args: &AssessArgs,
    format: Option<FormatArg>,
    overrides: &serde_json::Value,
    console: &mut Console<'_>,
) -> Result<(), Status> {
    let shown = path.display();
    let mut dataset = load(path, format, console)?.dataset;
    let (config, _) = ingest::apply_config_overrides(&dataset.config, overrides, "config overrides").map_err(|e| {
        console.error(format!("FAILED {shown}: {e}"));
        Status::Usage
    })?;
    dataset.config = config;

    let report = ingest::validate(&dataset);
    if !report.is_accepted() {
        for d in report.errors() {
            console.error(format!("{shown}: {d}"));
        }
        console.error(format!("SKIPPED {shown}: dataset is invalid"));
        return Err(Status::Invalid);
    }
    let assessment = compliance::assess(&dataset).map_err(|e: ComplianceError| {
        console.error(format!("SKIPPED {shown}: {e}"));
        Status::Invalid
    })?;

    let stem = file_stem(&assessment.team_id);
    let mut outputs = vec![(format!("{stem}.report.json"), ingest::export_report(&assessment))];
    if args.card {
        outputs.push((format!("{stem}.card.svg"), render::render_card(&assessment, &dataset, CardLayout::default())));
    }
    if args.summary {
        outputs.push((format!("{stem}.summary.txt"), render::render_summary(&assessment).into_bytes()));
    }
    for (name, bytes) in &outputs {
        let target = args.out_dir.join(name);
        write_atomic(&target, bytes).map_err(|e| {
            console.error(format!("FAILED {shown}: writing {}: {e}", target.display()));
            Status::Io
        })?;
    }
    console.info(format!(
        "OK {shown}: team {} final grade {:.4} -> {}",
        assessment.team_id,
        assessment.final_grade,
        outputs.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", ")
    ));
    Ok(())
}

pub fn cmd_generate(
    scenario: &str,
    team_size: usize,
    seed: u64,
    out: &Path,
    format: Option<FormatArg>,
    console: &mut Console<'_>,
) -> Status {
    let scenario: Scenario = match scenario.parse() {
        Ok(s) => s,
        Err(e) => {
            console.error(e);
            return Status::Usage;
        }
    };
    let spec = ScenarioSpec { team_size, ..ScenarioSpec::new(scenario, seed) };
    let dataset = match synth::generate(&spec) {
        Ok(d) => d,
        Err(e) => {
            console.error(e);
            return Status::Usage;
        }
    };
    let written = match format {
        Some(FormatArg::CsvBundle) => CsvBundle::from_dataset(&dataset)
            .files
            .iter()
            .try_for_each(|(name, text)| write_atomic(&out.join(name), text.as_bytes())),
        _ => write_atomic(out, &ingest::serialize_dataset(&dataset)),
    };
    if let Err(e) = written {
        console.error(format!("{}: {e}", out.display()));
        return Status::Io;
    }
    console.info(format!("wrote {} ({scenario}, seed {seed}, {team_size} members)", out.display()));
    console.info(format!("target: {}", scenario.target_property()));
    Status::Success
}
