//! Threshold classification, improvement trends, Definition-of-Done checks,
//! individual checks and grade aggregation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{CohortDataset, ManualScores, MeetingKind, MemberId, ProjectConfig, TaskKind};
use crate::metrics::{self, DailyEffortSeries, EffortMatrix, MeetingStats, MetricsError, SizeBasis, SprintSeries};
use crate::stats::{self, BoxplotStats};

/// Slack applied when comparing summed hours against the budget band, so
/// that float accumulation cannot push an on-band total out of it.
const HOURS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingLevel {
    Critical,
    Warning,
    Acceptable,
    Good,
    Excellent,
}

impl RatingLevel {
    pub const ALL: [RatingLevel; 5] = [
        RatingLevel::Critical,
        RatingLevel::Warning,
        RatingLevel::Acceptable,
        RatingLevel::Good,
        RatingLevel::Excellent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RatingLevel::Critical => "critical",
            RatingLevel::Warning => "warning",
            RatingLevel::Acceptable => "acceptable",
            RatingLevel::Good => "good",
            RatingLevel::Excellent => "excellent",
        }
    }

    pub fn score(self, config: &ProjectConfig) -> f64 {
        let r = &config.rubric;
        match self {
            RatingLevel::Critical => r.score_critical,
            RatingLevel::Warning => r.score_warning,
            RatingLevel::Acceptable => r.score_acceptable,
            RatingLevel::Good => r.score_good,
            RatingLevel::Excellent => r.score_excellent,
        }
    }
}

impl fmt::Display for RatingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub level: RatingLevel,
    pub rationale: String,
}

impl Rating {
    fn new(level: RatingLevel, rationale: impl Into<String>) -> Self {
        Self { level, rationale: rationale.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Budget,
    Balance,
    DailyTrend,
    TaskSize,
    Mraee,
    Unestimated,
    Meetings,
}

impl MetricId {
    pub const ALL: [MetricId; 7] = [
        MetricId::Budget,
        MetricId::Balance,
        MetricId::DailyTrend,
        MetricId::TaskSize,
        MetricId::Mraee,
        MetricId::Unestimated,
        MetricId::Meetings,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::Budget => "budget",
            MetricId::Balance => "balance",
            MetricId::DailyTrend => "daily_trend",
            MetricId::TaskSize => "task_size",
            MetricId::Mraee => "mraee",
            MetricId::Unestimated => "unestimated",
            MetricId::Meetings => "meetings",
        }
    }

    /// Card title of the panel that carries this metric.
    pub fn title(self) -> &'static str {
        match self {
            MetricId::Budget => "Team sprint effort",
            MetricId::Balance => "Individual sprint effort",
            MetricId::DailyTrend => "Team daily effort",
            MetricId::TaskSize => "Estimated normalized task size",
            MetricId::Mraee => "Mean absolute relative estimation error",
            MetricId::Unestimated => "Active tasks without estimation",
            MetricId::Meetings => "Tracked meetings",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = ComplianceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| ComplianceError::UnknownMetric(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplianceError {
    #[error("unknown metric id \"{0}\"")]
    UnknownMetric(String),
    #[error("missing doneness evidence for sprint(s) {0:?}")]
    IncompleteEvidence(Vec<u32>),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Computed data behind one rated panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelSeries {
    Budget {
        effort: SprintSeries,
        team_size: usize,
        band_low: f64,
        band_high: f64,
    },
    Balance {
        gini: f64,
        matrix: EffortMatrix,
    },
    DailyTrend {
        sprints: Vec<DailyEffortSeries>,
    },
    TaskSize {
        cap: f64,
        estimated: Vec<BoxplotStats>,
        actual: Vec<BoxplotStats>,
        estimated_overall: BoxplotStats,
        actual_overall: BoxplotStats,
    },
    Mraee {
        series: SprintSeries,
    },
    Unestimated {
        series: SprintSeries,
        active: Vec<u32>,
        unestimated: Vec<u32>,
    },
    Meetings {
        scrum: MeetingStats,
        planning: MeetingStats,
    },
}

impl PanelSeries {
    pub fn metric_id(&self) -> MetricId {
        match self {
            PanelSeries::Budget { .. } => MetricId::Budget,
            PanelSeries::Balance { .. } => MetricId::Balance,
            PanelSeries::DailyTrend { .. } => MetricId::DailyTrend,
            PanelSeries::TaskSize { .. } => MetricId::TaskSize,
            PanelSeries::Mraee { .. } => MetricId::Mraee,
            PanelSeries::Unestimated { .. } => MetricId::Unestimated,
            PanelSeries::Meetings { .. } => MetricId::Meetings,
        }
    }

    /// Per-sprint values whose slope decides improvement. Lower is better for
    /// every one of them.
    pub fn trend_values(&self, config: &ProjectConfig) -> Vec<Option<f64>> {
        match self {
            PanelSeries::Budget { effort, team_size, .. } => {
                let target = config.team_budget(*team_size);
                effort.per_sprint.iter().map(|v| v.map(|h| (h - target).abs())).collect()
            }
            PanelSeries::Balance { matrix, .. } => (0..config.sprint_count as usize)
                .map(|s| {
                    let column: Vec<f64> = matrix.hours.iter().filter_map(|row| row.get(s).copied()).collect();
                    (column.iter().sum::<f64>() > 0.0).then(|| stats::gini(&column))
                })
                .collect(),
            PanelSeries::DailyTrend { sprints } => sprints.iter().map(|d| Some(d.trend_r)).collect(),
            PanelSeries::TaskSize { estimated, .. } => {
                estimated.iter().map(|b| (!b.is_empty()).then_some(b.q3)).collect()
            }
            PanelSeries::Mraee { series } | PanelSeries::Unestimated { series, .. } => series.per_sprint.clone(),
            PanelSeries::Meetings { scrum, planning } => scrum
                .per_sprint
                .iter()
                .zip(&planning.per_sprint)
                .map(|(s, p)| Some(f64::from(s.total_absences + p.total_absences)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Improvement {
    #[serde(rename = "improving")]
    Improving,
    #[serde(rename = "stable")]
    Stable,
    #[serde(rename = "worsening")]
    Worsening,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Improvement {
    pub fn as_str(self) -> &'static str {
        match self {
            Improvement::Improving => "improving",
            Improvement::Stable => "stable",
            Improvement::Worsening => "worsening",
            Improvement::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPanel {
    pub metric_id: MetricId,
    pub series: PanelSeries,
    pub rating: Rating,
    pub improvement: Improvement,
    pub trend_values: Vec<Option<f64>>,
}

fn pct(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}

/// Last `k` sprints (1-based) of a `count`-sprint project.
fn latest(count: usize, k: usize) -> std::ops::Range<usize> {
    count.saturating_sub(k)..count
}

/// Rates one panel against the configured thresholds.
///
/// Every comparison is strict, so a value sitting exactly on a threshold gets
/// the more favorable rating.
pub fn classify(series: &PanelSeries, config: &ProjectConfig) -> Rating {
    use RatingLevel::*;
    match series {
        PanelSeries::Budget { effort, team_size, .. } => {
            let target = config.team_budget(*team_size);
            let band = *team_size as f64 * config.budget_tolerance_hours;
            let window = latest(effort.per_sprint.len(), 3);
            let deviations: Vec<(usize, f64)> =
                window.map(|i| (i + 1, (effort.per_sprint[i].unwrap_or(0.0) - target).abs())).collect();
            if let Some((s, d)) = deviations.iter().find(|(_, d)| *d > 0.25 * target + HOURS_SLACK) {
                Rating::new(Critical, format!("sprint {s} is {d:.1} h off the {target:.1} h budget (> 25%)"))
            } else if deviations.iter().all(|(_, d)| *d <= band + HOURS_SLACK) {
                Rating::new(Good, format!("latest sprints within {target:.1} ± {band:.1} h"))
            } else {
                Rating::new(Warning, format!("a latest sprint is outside {target:.1} ± {band:.1} h"))
            }
        }
        PanelSeries::Balance { gini, .. } => {
            let g = *gini;
            if g > config.gini_bad {
                Rating::new(Critical, format!("Gini {} above {}", pct(g), pct(config.gini_bad)))
            } else if g > config.gini_good {
                Rating::new(
                    Acceptable,
                    format!("Gini {} between {} and {}", pct(g), pct(config.gini_good), pct(config.gini_bad)),
                )
            } else {
                Rating::new(Good, format!("Gini {} within {}", pct(g), pct(config.gini_good)))
            }
        }
        PanelSeries::DailyTrend { sprints } => {
            let window = latest(sprints.len(), 3);
            let worst = sprints[window].iter().max_by(|a, b| a.trend_r.total_cmp(&b.trend_r));
            match worst {
                None => Rating::new(Good, "no sprints"),
                Some(d) if d.trend_r > config.trend_critical => Rating::new(
                    Critical,
                    format!("sprint {} r = {:.2} above {}", d.sprint, d.trend_r, config.trend_critical),
                ),
                Some(d) if d.trend_r > config.trend_suspect => Rating::new(
                    Warning,
                    format!("sprint {} r = {:.2} above {}", d.sprint, d.trend_r, config.trend_suspect),
                ),
                Some(d) => Rating::new(Good, format!("max r = {:.2} within {}", d.trend_r, config.trend_suspect)),
            }
        }
        PanelSeries::TaskSize { estimated_overall, .. } => {
            let cap = config.task_size_cap_hours_per_participant;
            if estimated_overall.is_empty() {
                return Rating::new(Warning, "no estimated tasks");
            }
            let q3 = estimated_overall.q3;
            if q3 <= cap {
                Rating::new(Good, format!("estimated q3 {q3:.2} h within the {cap:.1} h cap"))
            } else if q3 <= 1.5 * cap {
                Rating::new(Warning, format!("estimated q3 {q3:.2} h above the {cap:.1} h cap"))
            } else {
                Rating::new(Critical, format!("estimated q3 {q3:.2} h above 1.5 × {cap:.1} h"))
            }
        }
        PanelSeries::Mraee { series } => {
            let Some(overall) = series.overall else {
                return Rating::new(Warning, "no estimated task with logged effort");
            };
            let late = latest(series.per_sprint.len(), 2)
                .filter_map(|i| series.per_sprint[i].map(|v| (i + 1, v)))
                .find(|(_, v)| *v > config.mraee_critical);
            if overall > config.mraee_critical {
                Rating::new(Critical, format!("overall {} above {}", pct(overall), pct(config.mraee_critical)))
            } else if let Some((s, v)) = late {
                Rating::new(Critical, format!("sprint {s} at {} above {}", pct(v), pct(config.mraee_critical)))
            } else if overall > config.mraee_excellent {
                Rating::new(Acceptable, format!("overall {}", pct(overall)))
            } else {
                Rating::new(Excellent, format!("overall {} within {}", pct(overall), pct(config.mraee_excellent)))
            }
        }
        PanelSeries::Unestimated { series, .. } => match series.overall {
            None => Rating::new(Warning, "no active tasks"),
            Some(f) if f > config.unestimated_critical => {
                Rating::new(Critical, format!("{} unestimated, above {}", pct(f), pct(config.unestimated_critical)))
            }
            Some(f) if f > 0.0 => Rating::new(Acceptable, format!("{} unestimated", pct(f))),
            Some(_) => Rating::new(Good, "every active task estimated"),
        },
        PanelSeries::Meetings { scrum, planning } => {
            if let Some(i) = scrum.per_sprint.iter().position(|s| s.count == 0) {
                return Rating::new(Critical, format!("no tracked scrum meeting in sprint {}", i + 1));
            }
            let planned_every_sprint = planning.per_sprint.iter().all(|s| s.count >= 1);
            let (scrum_abs, plan_abs) = (scrum.total_absences(), planning.total_absences());
            if planned_every_sprint && scrum_abs == 0 && plan_abs == 0 {
                Rating::new(Good, "meetings tracked every sprint with full attendance")
            } else if planned_every_sprint && scrum_abs <= 1 && plan_abs <= 1 {
                Rating::new(Acceptable, format!("absences: {scrum_abs} in scrums, {plan_abs} in planning"))
            } else if !planned_every_sprint {
                Rating::new(Warning, "a sprint has no tracked planning meeting")
            } else {
                Rating::new(Warning, format!("absences: {scrum_abs} in scrums, {plan_abs} in planning"))
            }
        }
    }
}

/// Classifies a metric named by its string id.
pub fn classify_named(
    metric_id: &str,
    series: &PanelSeries,
    config: &ProjectConfig,
) -> Result<Rating, ComplianceError> {
    let id: MetricId = metric_id.parse()?;
    if id != series.metric_id() {
        return Err(ComplianceError::UnknownMetric(format!("{metric_id} (series is {})", series.metric_id())));
    }
    Ok(classify(series, config))
}

/// Direction of a lower-is-better per-sprint series, by least-squares slope.
///
/// The dead band is 5% of the mean magnitude of the defined values.
pub fn improvement(series: &[Option<f64>]) -> Improvement {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        series.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i as f64 + 1.0, v))).unzip();
    let Some(slope) = stats::least_squares_slope(&xs, &ys) else {
        return Improvement::NotApplicable;
    };
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let eps = if mean == 0.0 { 1e-9 } else { 0.05 * mean.abs() };
    if slope < -eps {
        Improvement::Improving
    } else if slope > eps {
        Improvement::Worsening
    } else {
        Improvement::Stable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DonenessSprint {
    pub sprint: u32,
    pub testing_ok: bool,
    /// Cumulative demo failures up to this sprint stay within the tolerance.
    pub demo_ok: bool,
    pub td_ok: bool,
    /// Only present for release sprints.
    pub release_ok: Option<bool>,
}

impl DonenessSprint {
    fn flags(&self) -> impl Iterator<Item = bool> {
        [Some(self.testing_ok), Some(self.demo_ok), Some(self.td_ok), self.release_ok].into_iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DonenessReport {
    pub per_sprint: Vec<DonenessSprint>,
    pub overall_ok: bool,
}

impl DonenessReport {
    /// (flags satisfied, flags applicable)
    pub fn flag_counts(&self) -> (usize, usize) {
        self.per_sprint.iter().flat_map(DonenessSprint::flags).fold((0, 0), |(t, n), f| (t + f as usize, n + 1))
    }
}

/// Checks Definition-of-Done evidence sprint by sprint.
pub fn check_doneness(dataset: &CohortDataset) -> Result<DonenessReport, ComplianceError> {
    let cfg = &dataset.config;
    let missing: Vec<u32> = cfg.sprints().filter(|s| !dataset.doneness.iter().any(|d| d.sprint == *s)).collect();
    if !missing.is_empty() {
        return Err(ComplianceError::IncompleteEvidence(missing));
    }
    let td_sprints: BTreeSet<u32> = dataset
        .tasks
        .iter()
        .filter(|t| t.kind == TaskKind::TechnicalDebt)
        .filter(|t| dataset.effort.iter().any(|e| e.task == t.id))
        .map(|t| t.sprint)
        .collect();

    let mut failures = 0;
    let per_sprint: Vec<DonenessSprint> = cfg
        .sprints()
        .map(|s| {
            let ev = dataset.doneness.iter().find(|d| d.sprint == s).expect("checked above");
            failures += ev.demo_failures;
            let td_required = s >= cfg.technical_debt_from_sprint;
            DonenessSprint {
                sprint: s,
                testing_ok: ev.unit_test_evidence && ev.e2e_test_evidence,
                demo_ok: failures <= cfg.demo_failure_tolerance,
                td_ok: ev.td_tasks_consistent && (!td_required || td_sprints.contains(&s)),
                release_ok: cfg.release_sprints.contains(&s).then_some(ev.docker_image_available),
            }
        })
        .collect();
    let overall_ok = per_sprint.iter().flat_map(DonenessSprint::flags).all(|f| f);
    Ok(DonenessReport { per_sprint, overall_ok })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberFlag {
    DailyOutlier,
    SprintBudgetViolation,
    LowParticipation,
    NeverPresented,
}

impl MemberFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            MemberFlag::DailyOutlier => "daily_outlier",
            MemberFlag::SprintBudgetViolation => "sprint_budget_violation",
            MemberFlag::LowParticipation => "low_participation",
            MemberFlag::NeverPresented => "never_presented",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberAssessment {
    pub member_id: MemberId,
    pub flags: BTreeSet<MemberFlag>,
    pub sprint_hours: Vec<f64>,
    pub violated_sprints: Vec<u32>,
    pub max_daily_hours: f64,
    /// `None` when no participation was recorded.
    pub participation: Option<u32>,
    pub score: f64,
}

/// Individual checks for one member.
///
/// Participation flags need manual scores; without them neither flag is
/// raised. A member missing from a recorded participation map counts as 0.
pub fn assess_member(
    dataset: &CohortDataset,
    member: &MemberId,
    manual: Option<&ManualScores>,
) -> Result<MemberAssessment, ComplianceError> {
    let cfg = &dataset.config;
    let daily = metrics::member_daily_effort(dataset, member)?;
    let max_daily_hours = daily.iter().flat_map(|s| s.hours_by_day.iter().copied()).fold(0.0, f64::max);
    let sprint_hours: Vec<f64> = daily.iter().map(DailyEffortSeries::total).collect();
    let budget = cfg.budget_hours_per_person_per_sprint;
    let tol = cfg.individual_budget_tolerance_fraction;
    let (low, high) = (budget * (1.0 - tol), budget * (1.0 + tol));
    let violated_sprints: Vec<u32> = daily
        .iter()
        .filter(|s| {
            let h = s.total();
            h < low - HOURS_SLACK || h > high + HOURS_SLACK
        })
        .map(|s| s.sprint)
        .collect();
    let participation = manual.map(|m| m.participation.get(member).copied().unwrap_or(0));

    let mut flags = BTreeSet::new();
    if max_daily_hours > cfg.daily_outlier_hours {
        flags.insert(MemberFlag::DailyOutlier);
    }
    if !violated_sprints.is_empty() {
        flags.insert(MemberFlag::SprintBudgetViolation);
    }
    if let Some(count) = participation {
        if count == 0 {
            flags.insert(MemberFlag::NeverPresented);
        }
        if count < cfg.sprint_count {
            flags.insert(MemberFlag::LowParticipation);
        }
    }

    let r = &cfg.rubric;
    let mut deduction = 0.0;
    for flag in &flags {
        deduction += match flag {
            MemberFlag::DailyOutlier => r.deduct_daily_outlier,
            MemberFlag::SprintBudgetViolation => {
                (r.deduct_budget_violation * violated_sprints.len() as f64).min(r.deduct_budget_violation_cap)
            }
            MemberFlag::NeverPresented => r.deduct_never_presented,
            MemberFlag::LowParticipation => r.deduct_low_participation,
        };
    }
    Ok(MemberAssessment {
        member_id: member.clone(),
        flags,
        sprint_hours,
        violated_sprints,
        max_daily_hours,
        participation,
        score: (1.0 - deduction).max(0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubScores {
    pub coordination: f64,
    /// Absent when no manual review or retrospective scores were recorded.
    pub quality: Option<f64>,
    pub doneness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamAssessment {
    pub team_id: String,
    pub panels: Vec<MetricPanel>,
    pub doneness: DonenessReport,
    pub members: Vec<MemberAssessment>,
    pub sub_scores: SubScores,
    pub team_score: f64,
    pub final_grade: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl TeamAssessment {
    pub fn panel(&self, id: MetricId) -> Option<&MetricPanel> {
        self.panels.iter().find(|p| p.metric_id == id)
    }

    pub fn rating(&self, id: MetricId) -> Option<RatingLevel> {
        self.panel(id).map(|p| p.rating.level)
    }
}

/// Computes and rates all seven coordination panels.
pub fn build_panels(dataset: &CohortDataset) -> Vec<MetricPanel> {
    let cfg = &dataset.config;
    let team_size = dataset.team_size();
    let band = team_size as f64 * cfg.budget_tolerance_hours;
    let target = cfg.team_budget(team_size);
    let matrix = metrics::member_sprint_effort(dataset);
    let counts = metrics::active_task_counts(dataset);
    let boxes = |basis| cfg.sprints().map(|s| metrics::normalized_task_sizes(dataset, s, basis)).collect();
    let overall = |basis| BoxplotStats::from_values(&metrics::normalized_sizes(dataset, None, basis));

    let series = [
        PanelSeries::Budget {
            effort: metrics::team_sprint_effort(dataset),
            team_size,
            band_low: target - band,
            band_high: target + band,
        },
        PanelSeries::Balance { gini: metrics::gini_imbalance(&matrix.row_totals()), matrix },
        PanelSeries::DailyTrend { sprints: cfg.sprints().map(|s| metrics::daily_effort(dataset, s)).collect() },
        PanelSeries::TaskSize {
            cap: cfg.task_size_cap_hours_per_participant,
            estimated: boxes(SizeBasis::Estimated),
            actual: boxes(SizeBasis::Actual),
            estimated_overall: overall(SizeBasis::Estimated),
            actual_overall: overall(SizeBasis::Actual),
        },
        PanelSeries::Mraee { series: metrics::mraee(dataset) },
        PanelSeries::Unestimated {
            series: metrics::unestimated_active_fraction(dataset),
            active: counts.iter().map(|c| c.0).collect(),
            unestimated: counts.iter().map(|c| c.1).collect(),
        },
        PanelSeries::Meetings {
            scrum: metrics::meeting_stats(dataset, MeetingKind::Scrum),
            planning: metrics::meeting_stats(dataset, MeetingKind::Planning),
        },
    ];
    series
        .into_iter()
        .map(|series| {
            let trend_values = series.trend_values(cfg);
            MetricPanel {
                metric_id: series.metric_id(),
                rating: classify(&series, cfg),
                improvement: improvement(&trend_values),
                trend_values,
                series,
            }
        })
        .collect()
}

/// Combines panel ratings with doneness and member checks into the team grade.
pub fn aggregate(
    team_id: &str,
    panels: Vec<MetricPanel>,
    doneness: DonenessReport,
    members: Vec<MemberAssessment>,
    manual: Option<&ManualScores>,
    config: &ProjectConfig,
) -> TeamAssessment {
    let rating_scores: Vec<f64> = panels.iter().map(|p| p.rating.level.score(config)).collect();
    let improving = panels.iter().filter(|p| p.improvement == Improvement::Improving).count();
    let coordination =
        (stats::mean(&rating_scores).unwrap_or(0.0) + config.rubric.improving_bonus * improving as f64).min(1.0);

    let quality = manual.and_then(|m| {
        let all: Vec<f64> = m.review_quality.iter().chain(&m.retrospective_quality).copied().collect();
        stats::mean(&all)
    });

    let (satisfied, applicable) = doneness.flag_counts();
    let doneness_score = if applicable == 0 { 1.0 } else { satisfied as f64 / applicable as f64 };

    let subs: Vec<f64> = [Some(coordination), quality, Some(doneness_score)].into_iter().flatten().collect();
    let team_score = subs.iter().sum::<f64>() / subs.len() as f64;
    let member_scores: Vec<f64> = members.iter().map(|m| m.score).collect();
    let individual = stats::mean(&member_scores).unwrap_or(0.0);
    let final_grade = config.team_weight * team_score + config.individual_weight * individual;

    TeamAssessment {
        team_id: team_id.to_owned(),
        panels,
        doneness,
        members,
        sub_scores: SubScores { coordination, quality, doneness: doneness_score },
        team_score,
        final_grade,
        warnings: Vec::new(),
    }
}

/// Runs the whole assessment of one validated dataset.
pub fn assess(dataset: &CohortDataset) -> Result<TeamAssessment, ComplianceError> {
    let panels = build_panels(dataset);
    let doneness = check_doneness(dataset)?;
    let manual = dataset.manual.as_ref();
    let members =
        dataset.members.iter().map(|m| assess_member(dataset, &m.id, manual)).collect::<Result<Vec<_>, _>>()?;
    let mut assessment = aggregate(&dataset.team_id, panels, doneness, members, manual, &dataset.config);
    if metrics::member_sprint_effort(dataset).row_totals().iter().all(|t| *t == 0.0) {
        assessment.warnings.push("no effort logged by any member; Gini index reported as 0".to_owned());
    }
    Ok(assessment)
}
