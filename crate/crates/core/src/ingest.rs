//! Reading and validating team datasets, and serializing assessments.
//!
//! The canonical interchange format is a single JSON document. A CSV bundle
//! (one file per table plus an optional `team.json`) is accepted for
//! spreadsheet workflows.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::compliance::TeamAssessment;
use crate::domain::{
    resolve_references, CohortDataset, DonenessEvidence, EffortEntry, ManualScores, Meeting, MeetingKind, Member,
    MemberId, ProjectConfig, Task, TaskId,
};
use crate::metrics;

/// Meetings longer than this are suspicious.
const LONG_MEETING_MINUTES: f64 = 8.0 * 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, location: location.into(), message: message.into() }
    }

    pub fn warning(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, location: location.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        self.entries.iter().all(|d| d.severity != Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.entries.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.entries.iter().filter(|d| d.severity == Severity::Warning)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Malformed input, located by field path and, where known, line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{location}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ParseError {
    pub location: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn new(location: impl Into<String>, line: Option<usize>, message: impl fmt::Display) -> Self {
        Self { location: location.into(), line, message: message.to_string() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    CsvBundle,
}

/// A parsed dataset plus the non-fatal findings of parsing (ignored fields).
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub dataset: CohortDataset,
    pub warnings: Vec<Diagnostic>,
}

pub enum Source<'a> {
    Json(&'a [u8]),
    CsvBundle(&'a CsvBundle),
}

pub fn parse_dataset(source: Source<'_>) -> Result<Parsed, ParseError> {
    match source {
        Source::Json(bytes) => parse_json(bytes),
        Source::CsvBundle(bundle) => parse_csv_bundle(bundle),
    }
}

fn utf8<'a>(bytes: &'a [u8], location: &str) -> Result<&'a str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| ParseError::new(location, None, format!("not UTF-8: {e}")))
}

/// Deserializes JSON, recording unknown fields as warnings and locating
/// failures by field path and line.
fn from_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<(T, Vec<Diagnostic>), ParseError> {
    let mut ignored = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let value = {
        let mut record = |path: serde_ignored::Path<'_>| ignored.push(path.to_string());
        let tracked = serde_ignored::Deserializer::new(&mut de, &mut record);
        serde_path_to_error::deserialize(tracked).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let location = if path == "." { origin.to_owned() } else { format!("{origin}:{path}") };
            ParseError::new(location, Some(inner.line()), inner)
        })?
    };
    de.end().map_err(|e| ParseError::new(origin, Some(e.line()), e))?;
    let warnings = ignored
        .into_iter()
        .map(|path| Diagnostic::warning(format!("{origin}:{path}"), "unknown field ignored"))
        .collect();
    Ok((value, warnings))
}

pub fn parse_json(bytes: &[u8]) -> Result<Parsed, ParseError> {
    let text = utf8(bytes, "dataset")?;
    let (dataset, warnings) = from_json(text, "dataset")?;
    Ok(Parsed { dataset, warnings })
}

pub fn serialize_dataset(dataset: &CohortDataset) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(dataset).expect("dataset serializes");
    out.push(b'\n');
    out
}

/// In-memory CSV bundle: file name → content.
///
/// Recognized files: `team.json` (team_id, config, manual), `members.csv`,
/// `tasks.csv`, `effort.csv`, `meetings.csv`, `doneness.csv`. Only
/// `members.csv` is required. Column names equal the JSON field names;
/// meeting participants are `|`-separated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CsvBundle {
    /// Fallback team id when `team.json` does not name one.
    pub name: String,
    pub files: BTreeMap<String, String>,
}

const BUNDLE_FILES: [&str; 6] = ["team.json", "members.csv", "tasks.csv", "effort.csv", "meetings.csv", "doneness.csv"];

impl CsvBundle {
    pub fn read_dir(dir: &Path) -> io::Result<Self> {
        let mut files = BTreeMap::new();
        for name in BUNDLE_FILES {
            match fs::read(dir.join(name)) {
                Ok(bytes) => {
                    let text = String::from_utf8(bytes)
                        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{name}: {e}")))?;
                    files.insert(name.to_owned(), text);
                }
                Err(e) if e.kind() == io::ErrorKind::NotFound => {}
                Err(e) => return Err(e),
            }
        }
        if files.is_empty() {
            return Err(io::Error::new(io::ErrorKind::NotFound, "no bundle files found"));
        }
        let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Self { name, files })
    }

    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, content) in &self.files {
            fs::write(dir.join(name), content)?;
        }
        Ok(())
    }

    pub fn from_dataset(dataset: &CohortDataset) -> Self {
        let header = TeamHeader {
            team_id: Some(dataset.team_id.clone()),
            config: Some(dataset.config.clone()),
            manual: dataset.manual.clone(),
        };
        let mut files = BTreeMap::new();
        let mut team = serde_json::to_string_pretty(&header).expect("header serializes");
        team.push('\n');
        files.insert("team.json".to_owned(), team);
        files.insert("members.csv".to_owned(), to_csv(&dataset.members));
        files.insert("tasks.csv".to_owned(), to_csv(&dataset.tasks.iter().map(TaskRow::from).collect::<Vec<_>>()));
        files.insert("effort.csv".to_owned(), to_csv(&dataset.effort));
        files.insert(
            "meetings.csv".to_owned(),
            to_csv(&dataset.meetings.iter().map(MeetingRow::from).collect::<Vec<_>>()),
        );
        files.insert("doneness.csv".to_owned(), to_csv(&dataset.doneness));
        Self { name: dataset.team_id.clone(), files }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TeamHeader {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    team_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<ProjectConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    manual: Option<ManualScores>,
}

/// Flat form of [`Task`]; empty cells stand for absent optional values.
#[derive(Debug, Serialize, Deserialize)]
struct TaskRow {
    id: String,
    title: String,
    kind: crate::domain::TaskKind,
    sprint: u32,
    #[serde(default)]
    estimate_hours: Option<f64>,
    #[serde(default)]
    planned_assignees: Option<u32>,
}

impl From<&Task> for TaskRow {
    fn from(t: &Task) -> Self {
        Self {
            id: t.id.0.clone(),
            title: t.title.clone(),
            kind: t.kind,
            sprint: t.sprint,
            estimate_hours: t.estimate_hours,
            planned_assignees: t.planned_assignees,
        }
    }
}

#[derive(Debug, Deserialize)]
struct EffortRow {
    task: String,
    member: String,
    day: u32,
    hours: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeetingRow {
    id: String,
    kind: MeetingKind,
    sprint: u32,
    day: u32,
    duration_minutes: f64,
    participants: String,
}

impl From<&Meeting> for MeetingRow {
    fn from(m: &Meeting) -> Self {
        Self {
            id: m.id.clone(),
            kind: m.kind,
            sprint: m.sprint,
            day: m.day,
            duration_minutes: m.duration_minutes,
            participants: m.participants.iter().map(MemberId::as_str).collect::<Vec<_>>().join("|"),
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("row serializes");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("csv is UTF-8")
}

/// Reads typed rows from one bundle file, warning about unknown columns.
fn read_rows<T: DeserializeOwned>(
    file: &str,
    text: &str,
    known: &[&str],
    warnings: &mut Vec<Diagnostic>,
) -> Result<Vec<T>, ParseError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| ParseError::new(file, Some(1), e))?.clone();
    for h in headers.iter().filter(|h| !known.contains(h)) {
        warnings.push(Diagnostic::warning(format!("{file}:{h}"), "unknown column ignored"));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| ParseError::new(file, e.position().map(|p| p.line() as usize), e))?;
        let line = record.position().map(|p| p.line() as usize);
        let row = record.deserialize(Some(&headers)).map_err(|e| match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => {
                let field = err.field().and_then(|i| headers.get(i as usize)).unwrap_or("row");
                ParseError::new(format!("{file}:{field}"), line, err.kind())
            }
            _ => ParseError::new(file, line, &e),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn parse_csv_bundle(bundle: &CsvBundle) -> Result<Parsed, ParseError> {
    let mut warnings = Vec::new();
    for name in bundle.files.keys().filter(|n| !BUNDLE_FILES.contains(&n.as_str())) {
        warnings.push(Diagnostic::warning(name.clone(), "unknown bundle file ignored"));
    }
    let header: TeamHeader = match bundle.files.get("team.json") {
        Some(text) => {
            let (header, header_warnings) = from_json(text, "team.json")?;
            warnings.extend(header_warnings);
            header
        }
        None => TeamHeader { team_id: None, config: None, manual: None },
    };
    let members_text =
        bundle.files.get("members.csv").ok_or_else(|| ParseError::new("members.csv", None, "required file missing"))?;
    let file = |name: &str| bundle.files.get(name).map(String::as_str).unwrap_or("");

    let members: Vec<Member> = read_rows("members.csv", members_text, &["id", "name"], &mut warnings)?;
    let task_rows: Vec<TaskRow> = read_rows(
        "tasks.csv",
        file("tasks.csv"),
        &["id", "title", "kind", "sprint", "estimate_hours", "planned_assignees"],
        &mut warnings,
    )?;
    let effort_rows: Vec<EffortRow> =
        read_rows("effort.csv", file("effort.csv"), &["task", "member", "day", "hours"], &mut warnings)?;
    let meeting_rows: Vec<MeetingRow> = read_rows(
        "meetings.csv",
        file("meetings.csv"),
        &["id", "kind", "sprint", "day", "duration_minutes", "participants"],
        &mut warnings,
    )?;
    let doneness: Vec<DonenessEvidence> = read_rows(
        "doneness.csv",
        file("doneness.csv"),
        &[
            "sprint",
            "unit_test_evidence",
            "e2e_test_evidence",
            "demo_failures",
            "td_tasks_consistent",
            "docker_image_available",
        ],
        &mut warnings,
    )?;

    let mut tasks = Vec::with_capacity(task_rows.len());
    for (i, row) in task_rows.into_iter().enumerate() {
        if let Some(e) = row.estimate_hours.filter(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(ParseError::new(
                "tasks.csv:estimate_hours",
                Some(i + 2),
                format!("expected a non-negative number, got {e}"),
            ));
        }
        if row.planned_assignees == Some(0) {
            return Err(ParseError::new(
                "tasks.csv:planned_assignees",
                Some(i + 2),
                "expected a positive count, got 0",
            ));
        }
        tasks.push(Task {
            id: TaskId(row.id),
            title: row.title,
            kind: row.kind,
            sprint: row.sprint,
            estimate_hours: row.estimate_hours,
            planned_assignees: row.planned_assignees,
        });
    }
    let mut effort = Vec::with_capacity(effort_rows.len());
    for (i, row) in effort_rows.into_iter().enumerate() {
        if !(row.hours.is_finite() && row.hours > 0.0) {
            return Err(ParseError::new(
                "effort.csv:hours",
                Some(i + 2),
                format!("expected a positive number, got {}", row.hours),
            ));
        }
        effort.push(EffortEntry {
            task: TaskId(row.task),
            member: MemberId(row.member),
            day: row.day,
            hours: row.hours,
        });
    }
    let mut meetings = Vec::with_capacity(meeting_rows.len());
    for (i, row) in meeting_rows.into_iter().enumerate() {
        if !(row.duration_minutes.is_finite() && row.duration_minutes > 0.0) {
            return Err(ParseError::new(
                "meetings.csv:duration_minutes",
                Some(i + 2),
                format!("expected a positive number, got {}", row.duration_minutes),
            ));
        }
        meetings.push(Meeting {
            id: row.id,
            kind: row.kind,
            sprint: row.sprint,
            day: row.day,
            duration_minutes: row.duration_minutes,
            participants: row
                .participants
                .split('|')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(MemberId::from)
                .collect(),
        });
    }

    let dataset = CohortDataset {
        team_id: header.team_id.unwrap_or_else(|| bundle.name.clone()),
        config: header.config.unwrap_or_default(),
        members,
        tasks,
        effort,
        meetings,
        doneness,
        manual: header.manual,
    };
    Ok(Parsed { dataset, warnings })
}

/// Reads a dataset from a JSON file or a CSV bundle directory.
pub fn load_dataset(path: &Path, format: Format) -> Result<Parsed, LoadError> {
    let io_err = |source| LoadError::Io { path: path.display().to_string(), source };
    let parse_err = |source| LoadError::Parse { path: path.display().to_string(), source };
    match format {
        Format::Json => {
            let bytes = fs::read(path).map_err(io_err)?;
            parse_json(&bytes).map_err(parse_err)
        }
        Format::CsvBundle => {
            let bundle = CsvBundle::read_dir(path).map_err(io_err)?;
            parse_csv_bundle(&bundle).map_err(parse_err)
        }
    }
}

/// Consistency checks beyond parsing: references, config invariants,
/// evidence completeness, and anomaly warnings.
pub fn validate(dataset: &CohortDataset) -> ValidationReport {
    let cfg = &dataset.config;
    let mut entries: Vec<Diagnostic> = Vec::new();

    for problem in cfg.check() {
        entries.push(Diagnostic::error("config", problem));
    }
    if dataset.members.is_empty() {
        entries.push(Diagnostic::error("members", "at least one member is required"));
    }
    for e in resolve_references(dataset) {
        let location = e.location().to_owned();
        let message = e.to_string();
        let message = message.strip_prefix(&format!("{location}: ")).unwrap_or(&message).to_owned();
        entries.push(Diagnostic::error(location, message));
    }

    let missing: Vec<String> =
        cfg.sprints().filter(|s| !dataset.doneness.iter().any(|d| d.sprint == *s)).map(|s| s.to_string()).collect();
    if !missing.is_empty() {
        entries.push(Diagnostic::error("doneness", format!("missing evidence for sprint(s) {}", missing.join(", "))));
    }

    if let Some(manual) = &dataset.manual {
        for (field, values) in
            [("review_quality", &manual.review_quality), ("retrospective_quality", &manual.retrospective_quality)]
        {
            for (i, v) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(v) {
                    entries
                        .push(Diagnostic::error(format!("manual.{field}[{i}]"), format!("score {v} outside [0, 1]")));
                }
            }
            if !values.is_empty() && values.len() != cfg.sprint_count as usize {
                entries.push(Diagnostic::warning(
                    format!("manual.{field}"),
                    format!("{} scores for {} sprints", values.len(), cfg.sprint_count),
                ));
            }
        }
    }

    if cfg.check().is_empty() {
        let effort = metrics::team_sprint_effort(dataset);
        for (sprint, hours) in effort.defined() {
            if hours == 0.0 {
                entries.push(Diagnostic::warning(format!("sprint {sprint}"), "no effort logged"));
            }
        }
    }
    for (i, m) in dataset.meetings.iter().enumerate() {
        if m.duration_minutes > LONG_MEETING_MINUTES {
            entries.push(Diagnostic::warning(
                format!("meetings[{i}].duration_minutes"),
                format!("meeting lasts {:.0} minutes, longer than 8 hours", m.duration_minutes),
            ));
        }
    }
    ValidationReport { entries }
}

/// Deterministic JSON rendering of an assessment.
pub fn export_report(assessment: &TeamAssessment) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(assessment).expect("assessment serializes");
    out.push(b'\n');
    out
}

pub fn parse_report(bytes: &[u8]) -> Result<TeamAssessment, ParseError> {
    let text = utf8(bytes, "report")?;
    from_json(text, "report").map(|(report, _)| report)
}

/// Overlays configuration overrides (a JSON object) onto `base`.
///
/// Keys present in `overrides` win; nested objects such as `rubric` merge
/// key by key. Unknown keys come back as warnings.
pub fn apply_config_overrides(
    base: &ProjectConfig,
    overrides: &serde_json::Value,
    origin: &str,
) -> Result<(ProjectConfig, Vec<Diagnostic>), ParseError> {
    let serde_json::Value::Object(_) = overrides else {
        return Err(ParseError::new(origin, None, "configuration must be a JSON object"));
    };
    let mut merged = serde_json::to_value(base).expect("config serializes");
    merge_json(&mut merged, overrides);
    from_json(&merged.to_string(), origin)
}

fn merge_json(target: &mut serde_json::Value, overlay: &serde_json::Value) {
    match (target, overlay) {
        (serde_json::Value::Object(t), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match t.get_mut(k) {
                    Some(existing) if existing.is_object() && v.is_object() => merge_json(existing, v),
                    _ => {
                        t.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (t, o) => *t = o.clone(),
    }
}
