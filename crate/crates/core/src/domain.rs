//! Data model shared by every stage of the assessment pipeline.
//!
//! Days and sprints are 1-based and sprint-relative. Every value here is
//! plain data: construct it, validate it with [`resolve_references`] (or the
//! fuller `ingest::validate`), then hand it to the metric functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

macro_rules! token {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

token!(
    /// Identifier of a team member.
    MemberId
);
token!(
    /// Identifier of a tracked task.
    TaskId
);

/// Numeric rubric used to turn ratings and flags into scores.
///
/// None of these constants come from observed course data; they are chosen
/// so that the grade is monotone in every rating and easy to audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Rubric {
    pub score_excellent: f64,
    pub score_good: f64,
    pub score_acceptable: f64,
    pub score_warning: f64,
    pub score_critical: f64,
    /// Added to the coordination sub-score for every improving panel.
    pub improving_bonus: f64,
    pub deduct_daily_outlier: f64,
    /// Deducted once per sprint whose individual total is out of range.
    pub deduct_budget_violation: f64,
    pub deduct_budget_violation_cap: f64,
    pub deduct_never_presented: f64,
    pub deduct_low_participation: f64,
}

impl Default for Rubric {
    fn default() -> Self {
        Self {
            score_excellent: 1.0,
            score_good: 0.9,
            score_acceptable: 0.7,
            score_warning: 0.5,
            score_critical: 0.2,
            improving_bonus: 0.05,
            deduct_daily_outlier: 0.2,
            deduct_budget_violation: 0.2,
            deduct_budget_violation_cap: 0.4,
            deduct_never_presented: 0.3,
            deduct_low_participation: 0.1,
        }
    }
}

/// Project parameters and assessment thresholds.
///
/// Every field is optional in serialized form; missing fields take the
/// defaults of a four-sprint, two-week, 16 hours per person course.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProjectConfig {
    pub sprint_count: u32,
    pub sprint_length_days: u32,
    pub budget_hours_per_person_per_sprint: f64,
    pub budget_tolerance_hours: f64,
    pub task_size_cap_hours_per_participant: f64,
    pub gini_good: f64,
    pub gini_bad: f64,
    pub trend_suspect: f64,
    pub trend_critical: f64,
    pub mraee_excellent: f64,
    pub mraee_critical: f64,
    pub unestimated_critical: f64,
    pub daily_outlier_hours: f64,
    pub individual_budget_tolerance_fraction: f64,
    pub release_sprints: Vec<u32>,
    pub demo_failure_tolerance: u32,
    /// First sprint in which explicit technical-debt work is expected.
    pub technical_debt_from_sprint: u32,
    pub team_weight: f64,
    pub individual_weight: f64,
    pub rubric: Rubric,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            sprint_count: 4,
            sprint_length_days: 14,
            budget_hours_per_person_per_sprint: 16.0,
            budget_tolerance_hours: 1.0,
            task_size_cap_hours_per_participant: 2.0,
            gini_good: 0.03,
            gini_bad: 0.09,
            trend_suspect: 0.3,
            trend_critical: 0.5,
            mraee_excellent: 0.20,
            mraee_critical: 0.50,
            unestimated_critical: 0.05,
            daily_outlier_hours: 10.0,
            individual_budget_tolerance_fraction: 0.25,
            release_sprints: vec![2, 4],
            demo_failure_tolerance: 1,
            technical_debt_from_sprint: 3,
            team_weight: 0.8,
            individual_weight: 0.2,
            rubric: Rubric::default(),
        }
    }
}

impl ProjectConfig {
    /// Checks the ordering and range invariants; returns one message per violation.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut require = |ok: bool, msg: &str| {
            if !ok {
                problems.push(msg.to_owned());
            }
        };
        require(self.sprint_count >= 1, "sprint_count must be positive");
        require(self.sprint_length_days >= 1, "sprint_length_days must be positive");
        require(self.budget_hours_per_person_per_sprint > 0.0, "budget_hours_per_person_per_sprint must be positive");
        require(self.budget_tolerance_hours >= 0.0, "budget_tolerance_hours must be non-negative");
        require(self.task_size_cap_hours_per_participant > 0.0, "task_size_cap_hours_per_participant must be positive");
        require(self.daily_outlier_hours > 0.0, "daily_outlier_hours must be positive");
        require(self.gini_good < self.gini_bad, "gini_good must be below gini_bad");
        require(self.trend_suspect < self.trend_critical, "trend_suspect must be below trend_critical");
        require(
            (-1.0..=1.0).contains(&self.trend_suspect) && (-1.0..=1.0).contains(&self.trend_critical),
            "trend thresholds must lie in [-1, 1]",
        );
        require(self.mraee_excellent < self.mraee_critical, "mraee_excellent must be below mraee_critical");
        for (name, v) in [
            ("gini_good", self.gini_good),
            ("gini_bad", self.gini_bad),
            ("mraee_excellent", self.mraee_excellent),
            ("mraee_critical", self.mraee_critical),
            ("unestimated_critical", self.unestimated_critical),
            ("individual_budget_tolerance_fraction", self.individual_budget_tolerance_fraction),
            ("team_weight", self.team_weight),
            ("individual_weight", self.individual_weight),
        ] {
            if !(0.0..=1.0).contains(&v) {
                problems.push(format!("{name} must be a fraction in [0, 1], got {v}"));
            }
        }
        if (self.team_weight + self.individual_weight - 1.0).abs() > 1e-9 {
            problems.push(format!(
                "team_weight + individual_weight must equal 1, got {}",
                self.team_weight + self.individual_weight
            ));
        }
        for &s in &self.release_sprints {
            if s == 0 || s > self.sprint_count {
                problems.push(format!("release sprint {s} outside 1..={}", self.sprint_count));
            }
        }
        problems
    }

    pub fn sprints(&self) -> impl Iterator<Item = u32> {
        1..=self.sprint_count
    }

    /// Team budget for one sprint.
    pub fn team_budget(&self, team_size: usize) -> f64 {
        team_size as f64 * self.budget_hours_per_person_per_sprint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub id: MemberId,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Story,
    Task,
    TechnicalDebt,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Story => "story",
            TaskKind::Task => "task",
            TaskKind::TechnicalDebt => "technical_debt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub title: String,
    pub kind: TaskKind,
    pub sprint: u32,
    /// `None` means the task was never estimated, which is distinct from a
    /// zero estimate.
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "opt_non_negative")]
    pub estimate_hours: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "opt_positive_count")]
    pub planned_assignees: Option<u32>,
}

/// One logged slice of work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortEntry {
    pub task: TaskId,
    pub member: MemberId,
    /// Day within the sprint of the referenced task.
    pub day: u32,
    #[serde(deserialize_with = "positive")]
    pub hours: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeetingKind {
    Scrum,
    Planning,
}

impl MeetingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeetingKind::Scrum => "scrum",
            MeetingKind::Planning => "planning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meeting {
    pub id: String,
    pub kind: MeetingKind,
    pub sprint: u32,
    pub day: u32,
    #[serde(deserialize_with = "positive")]
    pub duration_minutes: f64,
    pub participants: BTreeSet<MemberId>,
}

/// Instructor-declared Definition-of-Done evidence for one sprint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DonenessEvidence {
    pub sprint: u32,
    pub unit_test_evidence: bool,
    pub e2e_test_evidence: bool,
    pub demo_failures: u32,
    pub td_tasks_consistent: bool,
    pub docker_image_available: bool,
}

/// Qualitative judgments entered by the instructors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ManualScores {
    #[serde(default)]
    pub review_quality: Vec<f64>,
    #[serde(default)]
    pub retrospective_quality: Vec<f64>,
    /// Number of meetings in which each member presented or spoke.
    #[serde(default)]
    pub participation: BTreeMap<MemberId, u32>,
}

/// A team's complete project record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortDataset {
    pub team_id: String,
    #[serde(default)]
    pub config: ProjectConfig,
    pub members: Vec<Member>,
    #[serde(default)]
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub effort: Vec<EffortEntry>,
    #[serde(default)]
    pub meetings: Vec<Meeting>,
    #[serde(default)]
    pub doneness: Vec<DonenessEvidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manual: Option<ManualScores>,
}

impl CohortDataset {
    /// Dataset with no activity, useful as a starting point for builders and tests.
    pub fn empty(team_id: impl Into<String>, config: ProjectConfig, members: Vec<Member>) -> Self {
        Self {
            team_id: team_id.into(),
            config,
            members,
            tasks: Vec::new(),
            effort: Vec::new(),
            meetings: Vec::new(),
            doneness: Vec::new(),
            manual: None,
        }
    }

    pub fn team_size(&self) -> usize {
        self.members.len()
    }

    pub fn task(&self, id: &TaskId) -> Option<&Task> {
        self.tasks.iter().find(|t| &t.id == id)
    }

    pub fn member_index(&self, id: &MemberId) -> Option<usize> {
        self.members.iter().position(|m| &m.id == id)
    }

    /// Sprint of every task, keyed by id.
    pub fn task_sprints(&self) -> BTreeMap<&TaskId, u32> {
        self.tasks.iter().map(|t| (&t.id, t.sprint)).collect()
    }
}

/// A broken cross-reference or out-of-range index inside a dataset.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReferenceError {
    #[error("{location}: unknown task \"{task}\"")]
    UnknownTask { location: String, task: TaskId },
    #[error("{location}: unknown member \"{member}\"")]
    UnknownMember { location: String, member: MemberId },
    #[error("{location}: day {day} outside 1..={max}")]
    DayOutOfRange { location: String, day: u32, max: u32 },
    #[error("{location}: sprint {sprint} outside 1..={max}")]
    SprintOutOfRange { location: String, sprint: u32, max: u32 },
    #[error("{location}: duplicate id \"{id}\"")]
    DuplicateId { location: String, id: String },
    #[error("{location}: meeting has no participants")]
    EmptyMeeting { location: String },
}

impl ReferenceError {
    pub fn location(&self) -> &str {
        match self {
            ReferenceError::UnknownTask { location, .. }
            | ReferenceError::UnknownMember { location, .. }
            | ReferenceError::DayOutOfRange { location, .. }
            | ReferenceError::SprintOutOfRange { location, .. }
            | ReferenceError::DuplicateId { location, .. }
            | ReferenceError::EmptyMeeting { location } => location,
        }
    }
}

/// Lists every dangling reference and out-of-range day or sprint.
///
/// The result is empty iff the dataset is internally consistent.
pub fn resolve_references(dataset: &CohortDataset) -> Vec<ReferenceError> {
    let cfg = &dataset.config;
    let mut errors = Vec::new();

    let mut member_ids = BTreeSet::new();
    for (i, m) in dataset.members.iter().enumerate() {
        if !member_ids.insert(&m.id) {
            errors.push(ReferenceError::DuplicateId { location: format!("members[{i}]"), id: m.id.to_string() });
        }
    }

    let sprint_check = |errors: &mut Vec<ReferenceError>, location: String, sprint: u32| {
        if sprint == 0 || sprint > cfg.sprint_count {
            errors.push(ReferenceError::SprintOutOfRange { location, sprint, max: cfg.sprint_count });
        }
    };
    let day_check = |errors: &mut Vec<ReferenceError>, location: String, day: u32| {
        if day == 0 || day > cfg.sprint_length_days {
            errors.push(ReferenceError::DayOutOfRange { location, day, max: cfg.sprint_length_days });
        }
    };

    let mut task_ids = BTreeSet::new();
    for (i, t) in dataset.tasks.iter().enumerate() {
        if !task_ids.insert(&t.id) {
            errors.push(ReferenceError::DuplicateId { location: format!("tasks[{i}]"), id: t.id.to_string() });
        }
        sprint_check(&mut errors, format!("tasks[{i}].sprint"), t.sprint);
    }

    for (i, e) in dataset.effort.iter().enumerate() {
        if !task_ids.contains(&e.task) {
            errors.push(ReferenceError::UnknownTask { location: format!("effort[{i}].task"), task: e.task.clone() });
        }
        if !member_ids.contains(&e.member) {
            errors.push(ReferenceError::UnknownMember {
                location: format!("effort[{i}].member"),
                member: e.member.clone(),
            });
        }
        day_check(&mut errors, format!("effort[{i}].day"), e.day);
    }

    let mut meeting_ids = BTreeSet::new();
    for (i, m) in dataset.meetings.iter().enumerate() {
        if !meeting_ids.insert(m.id.as_str()) {
            errors.push(ReferenceError::DuplicateId { location: format!("meetings[{i}]"), id: m.id.clone() });
        }
        sprint_check(&mut errors, format!("meetings[{i}].sprint"), m.sprint);
        day_check(&mut errors, format!("meetings[{i}].day"), m.day);
        if m.participants.is_empty() {
            errors.push(ReferenceError::EmptyMeeting { location: format!("meetings[{i}].participants") });
        }
        for p in &m.participants {
            if !member_ids.contains(p) {
                errors.push(ReferenceError::UnknownMember {
                    location: format!("meetings[{i}].participants"),
                    member: p.clone(),
                });
            }
        }
    }

    let mut evidence_sprints = BTreeSet::new();
    for (i, d) in dataset.doneness.iter().enumerate() {
        sprint_check(&mut errors, format!("doneness[{i}].sprint"), d.sprint);
        if !evidence_sprints.insert(d.sprint) {
            errors.push(ReferenceError::DuplicateId {
                location: format!("doneness[{i}]"),
                id: format!("sprint {}", d.sprint),
            });
        }
    }

    if let Some(manual) = &dataset.manual {
        for member in manual.participation.keys() {
            if !member_ids.contains(member) {
                errors.push(ReferenceError::UnknownMember {
                    location: "manual.participation".to_owned(),
                    member: member.clone(),
                });
            }
        }
    }

    errors
}

fn positive<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let v = f64::deserialize(d)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(serde::de::Error::custom(format!("expected a positive number, got {v}")))
    }
}

fn opt_non_negative<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match Option::<f64>::deserialize(d)? {
        Some(v) if !(v.is_finite() && v >= 0.0) => {
            Err(serde::de::Error::custom(format!("expected a non-negative number, got {v}")))
        }
        other => Ok(other),
    }
}

fn opt_positive_count<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u32>, D::Error> {
    match Option::<u32>::deserialize(d)? {
        Some(0) => Err(serde::de::Error::custom("expected a positive count, got 0")),
        other => Ok(other),
    }
}
