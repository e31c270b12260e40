//! Quantitative coordination metrics computed from a validated dataset.
//!
//! All functions are total over datasets that pass
//! [`resolve_references`](crate::domain::resolve_references); entries whose
//! references do not resolve are skipped rather than panicking.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{CohortDataset, MeetingKind, MemberId, TaskId};
use crate::stats::{self, BoxplotStats};

/// One value per sprint plus an aggregate. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprintSeries {
    pub per_sprint: Vec<Option<f64>>,
    pub overall: Option<f64>,
}

impl SprintSeries {
    /// Series where every sprint is defined and `overall` is the mean.
    pub fn from_defined(values: Vec<f64>) -> Self {
        let overall = stats::mean(&values);
        Self { per_sprint: values.into_iter().map(Some).collect(), overall }
    }

    /// Defined values with their 1-based sprint index.
    pub fn defined(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.per_sprint.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i as u32 + 1, v)))
    }

    pub fn sprint(&self, sprint: u32) -> Option<f64> {
        self.per_sprint.get(sprint as usize - 1).copied().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyEffortSeries {
    pub sprint: u32,
    pub hours_by_day: Vec<f64>,
    /// Correlation between day index and daily hours.
    pub trend_r: f64,
    /// The hours did not vary across days; `trend_r` is 0 by convention.
    pub flat: bool,
}

impl DailyEffortSeries {
    fn from_hours(sprint: u32, hours_by_day: Vec<f64>) -> Self {
        let days: Vec<f64> = (1..=hours_by_day.len()).map(|d| d as f64).collect();
        let r = stats::pearson(&days, &hours_by_day);
        Self { sprint, hours_by_day, trend_r: r.unwrap_or(0.0), flat: r.is_none() }
    }

    pub fn total(&self) -> f64 {
        self.hours_by_day.iter().sum()
    }
}

/// Hours logged per member (rows, in dataset order) and sprint (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortMatrix {
    pub members: Vec<MemberId>,
    pub hours: Vec<Vec<f64>>,
}

impl EffortMatrix {
    pub fn row_totals(&self) -> Vec<f64> {
        self.hours.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn column_totals(&self) -> Vec<f64> {
        let cols = self.hours.first().map_or(0, Vec::len);
        (0..cols).map(|c| self.hours.iter().map(|row| row[c]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeBasis {
    Estimated,
    Actual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingSprintStats {
    pub count: u32,
    pub mean_duration_minutes: Option<f64>,
    pub mean_participants: Option<f64>,
    /// Every meeting of the sprint had the whole team (vacuously true with no meetings).
    pub full_attendance: bool,
    pub total_absences: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingStats {
    pub kind: MeetingKind,
    pub per_sprint: Vec<MeetingSprintStats>,
}

impl MeetingStats {
    pub fn total_count(&self) -> u32 {
        self.per_sprint.iter().map(|s| s.count).sum()
    }

    pub fn total_absences(&self) -> u32 {
        self.per_sprint.iter().map(|s| s.total_absences).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown member \"{0}\"")]
    UnknownMember(MemberId),
}

/// Effort entries annotated with the sprint of their task.
fn sprint_entries(dataset: &CohortDataset) -> impl Iterator<Item = (u32, &crate::domain::EffortEntry)> {
    let sprints = dataset.task_sprints();
    dataset.effort.iter().filter_map(move |e| sprints.get(&e.task).map(|&s| (s, e)))
}

fn sprint_slot(dataset: &CohortDataset, sprint: u32) -> Option<usize> {
    (sprint >= 1 && sprint <= dataset.config.sprint_count).then(|| sprint as usize - 1)
}

/// Total team hours per sprint; overall is the mean across sprints.
pub fn team_sprint_effort(dataset: &CohortDataset) -> SprintSeries {
    let mut per_sprint = vec![0.0; dataset.config.sprint_count as usize];
    for (sprint, e) in sprint_entries(dataset) {
        if let Some(slot) = sprint_slot(dataset, sprint) {
            per_sprint[slot] += e.hours;
        }
    }
    SprintSeries::from_defined(per_sprint)
}

pub fn member_sprint_effort(dataset: &CohortDataset) -> EffortMatrix {
    let sprints = dataset.config.sprint_count as usize;
    let mut hours = vec![vec![0.0; sprints]; dataset.members.len()];
    for (sprint, e) in sprint_entries(dataset) {
        if let (Some(row), Some(col)) = (dataset.member_index(&e.member), sprint_slot(dataset, sprint)) {
            hours[row][col] += e.hours;
        }
    }
    EffortMatrix { members: dataset.members.iter().map(|m| m.id.clone()).collect(), hours }
}

/// Gini index over per-member totals. All-zero totals give 0; flagging that
/// as a data-quality problem is up to the caller.
pub fn gini_imbalance(totals: &[f64]) -> f64 {
    stats::gini(totals)
}

fn daily_hours(dataset: &CohortDataset, sprint: u32, member: Option<&MemberId>) -> Vec<f64> {
    let days = dataset.config.sprint_length_days as usize;
    let mut hours = vec![0.0; days];
    for (s, e) in sprint_entries(dataset) {
        if s != sprint || member.is_some_and(|m| m != &e.member) {
            continue;
        }
        if e.day >= 1 && e.day as usize <= days {
            hours[e.day as usize - 1] += e.hours;
        }
    }
    hours
}

/// Team hours per day of one sprint and their trend against the day index.
pub fn daily_effort(dataset: &CohortDataset, sprint: u32) -> DailyEffortSeries {
    DailyEffortSeries::from_hours(sprint, daily_hours(dataset, sprint, None))
}

/// Per-sprint daily series restricted to one member's entries.
pub fn member_daily_effort(dataset: &CohortDataset, member: &MemberId) -> Result<Vec<DailyEffortSeries>, MetricsError> {
    if dataset.member_index(member).is_none() {
        return Err(MetricsError::UnknownMember(member.clone()));
    }
    Ok(dataset
        .config
        .sprints()
        .map(|s| DailyEffortSeries::from_hours(s, daily_hours(dataset, s, Some(member))))
        .collect())
}

/// Logged hours and distinct contributors per task.
fn task_actuals(dataset: &CohortDataset) -> BTreeMap<&TaskId, (f64, BTreeSet<&MemberId>)> {
    let mut out: BTreeMap<&TaskId, (f64, BTreeSet<&MemberId>)> = BTreeMap::new();
    for e in &dataset.effort {
        let slot = out.entry(&e.task).or_default();
        slot.0 += e.hours;
        slot.1.insert(&e.member);
    }
    out
}

/// Per-participant task sizes of the given sprints (all sprints when `None`).
///
/// The divisor is the planned assignee count, falling back to the number of
/// distinct contributors, then to 1.
pub fn normalized_sizes(dataset: &CohortDataset, sprint: Option<u32>, basis: SizeBasis) -> Vec<f64> {
    let actuals = task_actuals(dataset);
    dataset
        .tasks
        .iter()
        .filter(|t| sprint.is_none_or(|s| t.sprint == s))
        .filter_map(|t| {
            let logged = actuals.get(&t.id);
            let contributors = logged.map_or(0, |(_, who)| who.len());
            let divisor = match t.planned_assignees {
                Some(p) => p as f64,
                None if contributors > 0 => contributors as f64,
                None => 1.0,
            };
            let size = match basis {
                SizeBasis::Estimated => t.estimate_hours?,
                SizeBasis::Actual => logged.map(|(h, _)| *h).filter(|h| *h > 0.0)?,
            };
            Some(size / divisor)
        })
        .collect()
}

pub fn normalized_task_sizes(dataset: &CohortDataset, sprint: u32, basis: SizeBasis) -> BoxplotStats {
    BoxplotStats::from_values(&normalized_sizes(dataset, Some(sprint), basis))
}

/// Mean absolute relative estimation error per sprint.
///
/// Eligible tasks have a positive estimate and positive logged effort. The
/// overall value is the mean of the defined sprint values.
pub fn mraee(dataset: &CohortDataset) -> SprintSeries {
    let actuals = task_actuals(dataset);
    let mut errors: Vec<Vec<f64>> = vec![Vec::new(); dataset.config.sprint_count as usize];
    for t in &dataset.tasks {
        let (Some(estimate), Some(slot)) = (t.estimate_hours, sprint_slot(dataset, t.sprint)) else {
            continue;
        };
        let actual = actuals.get(&t.id).map_or(0.0, |(h, _)| *h);
        if estimate > 0.0 && actual > 0.0 {
            errors[slot].push((actual - estimate).abs() / estimate);
        }
    }
    let per_sprint: Vec<Option<f64>> = errors.iter().map(|e| stats::mean(e)).collect();
    let defined: Vec<f64> = per_sprint.iter().flatten().copied().collect();
    SprintSeries { overall: stats::mean(&defined), per_sprint }
}

/// Active (effort-bearing) and unestimated active task counts per sprint.
pub fn active_task_counts(dataset: &CohortDataset) -> Vec<(u32, u32)> {
    let actuals = task_actuals(dataset);
    let mut counts = vec![(0u32, 0u32); dataset.config.sprint_count as usize];
    for t in &dataset.tasks {
        let Some(slot) = sprint_slot(dataset, t.sprint) else { continue };
        if actuals.get(&t.id).is_some_and(|(h, _)| *h > 0.0) {
            counts[slot].0 += 1;
            if t.estimate_hours.is_none() {
                counts[slot].1 += 1;
            }
        }
    }
    counts
}

/// Share of active tasks lacking an estimate; overall is pooled over all sprints.
pub fn unestimated_active_fraction(dataset: &CohortDataset) -> SprintSeries {
    let counts = active_task_counts(dataset);
    let ratio = |active: u32, missing: u32| (active > 0).then(|| missing as f64 / active as f64);
    let (active, missing) = counts.iter().fold((0, 0), |(a, m), (ca, cm)| (a + ca, m + cm));
    SprintSeries { per_sprint: counts.iter().map(|&(a, m)| ratio(a, m)).collect(), overall: ratio(active, missing) }
}

pub fn meeting_stats(dataset: &CohortDataset, kind: MeetingKind) -> MeetingStats {
    let team: BTreeSet<&MemberId> = dataset.members.iter().map(|m| &m.id).collect();
    let per_sprint = dataset
        .config
        .sprints()
        .map(|sprint| {
            let meetings: Vec<_> = dataset.meetings.iter().filter(|m| m.kind == kind && m.sprint == sprint).collect();
            let present = |m: &crate::domain::Meeting| m.participants.iter().filter(|p| team.contains(p)).count();
            let durations: Vec<f64> = meetings.iter().map(|m| m.duration_minutes).collect();
            let heads: Vec<f64> = meetings.iter().map(|m| present(m) as f64).collect();
            let total_absences = meetings.iter().map(|m| team.len().saturating_sub(present(m)) as u32).sum::<u32>();
            MeetingSprintStats {
                count: meetings.len() as u32,
                mean_duration_minutes: stats::mean(&durations),
                mean_participants: stats::mean(&heads),
                full_attendance: total_absences == 0,
                total_absences,
            }
        })
        .collect();
    MeetingStats { kind, per_sprint }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::*;

    fn team(n: usize) -> CohortDataset {
        let members = (1..=n).map(|i| Member { id: MemberId(format!("m{i}")), name: format!("Member {i}") }).collect();
        CohortDataset::empty("team", ProjectConfig::default(), members)
    }

    fn task(id: &str, sprint: u32, estimate: Option<f64>, planned: Option<u32>) -> Task {
        Task {
            id: id.into(),
            title: id.into(),
            kind: TaskKind::Task,
            sprint,
            estimate_hours: estimate,
            planned_assignees: planned,
        }
    }

    fn log(ds: &mut CohortDataset, task: &str, member: &str, day: u32, hours: f64) {
        ds.effort.push(EffortEntry { task: task.into(), member: member.into(), day, hours });
    }

    #[test]
    fn exact_budget_gives_flat_sprint_totals() {
        let mut ds = team(4);
        for s in 1..=4 {
            for m in 1..=4 {
                let id = format!("T{s}-{m}");
                ds.tasks.push(task(&id, s, Some(16.0), None));
                log(&mut ds, &id, &format!("m{m}"), 3, 16.0);
            }
        }
        let series = team_sprint_effort(&ds);
        assert_eq!(series.per_sprint, vec![Some(64.0); 4]);
        assert_eq!(series.overall, Some(64.0));
    }

    #[test]
    fn no_effort_is_all_zero() {
        let ds = team(2);
        assert_eq!(team_sprint_effort(&ds).per_sprint, vec![Some(0.0); 4]);
        assert_eq!(member_sprint_effort(&ds).hours, vec![vec![0.0; 4]; 2]);
    }

    #[test]
    fn single_entry_lands_in_its_cell() {
        let mut ds = team(1);
        ds.tasks.push(task("T1", 2, None, None));
        log(&mut ds, "T1", "m1", 5, 3.0);
        let matrix = member_sprint_effort(&ds);
        assert_eq!(matrix.hours, vec![vec![0.0, 3.0, 0.0, 0.0]]);
        assert_eq!(
            matrix.column_totals().into_iter().map(Some).collect::<Vec<_>>(),
            team_sprint_effort(&ds).per_sprint
        );
    }

    #[test]
    fn daily_trend_conventions() {
        let mut ds = team(1);
        ds.tasks.push(task("T1", 1, None, None));
        for day in 1..=14 {
            log(&mut ds, "T1", "m1", day, 4.0);
        }
        let flat = daily_effort(&ds, 1);
        assert_eq!(flat.trend_r, 0.0);
        assert!(flat.flat);
        assert_eq!(flat.total(), 56.0);

        ds.effort.clear();
        for day in 1..=14 {
            log(&mut ds, "T1", "m1", day, day as f64);
        }
        let rising = daily_effort(&ds, 1);
        assert!((rising.trend_r - 1.0).abs() < 1e-12);
        assert!(!rising.flat);
    }

    #[test]
    fn member_daily_series() {
        let mut ds = team(2);
        ds.tasks.push(task("T1", 1, None, None));
        log(&mut ds, "T1", "m1", 6, 14.0);
        log(&mut ds, "T1", "m2", 6, 2.0);
        let m1 = member_daily_effort(&ds, &"m1".into()).unwrap();
        assert_eq!(m1[0].hours_by_day[5], 14.0);
        let m2 = member_daily_effort(&ds, &"m2".into()).unwrap();
        assert!(m2[1..].iter().all(|s| s.total() == 0.0));
        let team_days = daily_effort(&ds, 1).hours_by_day;
        let summed: Vec<f64> = (0..14).map(|d| m1[0].hours_by_day[d] + m2[0].hours_by_day[d]).collect();
        assert_eq!(summed, team_days);
        assert_eq!(member_daily_effort(&ds, &"nobody".into()), Err(MetricsError::UnknownMember("nobody".into())));
    }

    #[test]
    fn task_size_normalization() {
        let mut ds = team(3);
        ds.tasks.push(task("T1", 1, Some(4.0), Some(2)));
        let est = normalized_task_sizes(&ds, 1, SizeBasis::Estimated);
        assert_eq!((est.min, est.q1, est.median, est.q3, est.max), (2.0, 2.0, 2.0, 2.0, 2.0));
        // no effort yet: nothing to report for actual sizes
        assert!(normalized_task_sizes(&ds, 1, SizeBasis::Actual).is_empty());

        // fallback to distinct contributors
        ds.tasks.push(task("T2", 1, Some(3.0), None));
        log(&mut ds, "T2", "m1", 1, 2.0);
        log(&mut ds, "T2", "m2", 1, 1.0);
        log(&mut ds, "T2", "m2", 2, 1.0);
        assert_eq!(normalized_sizes(&ds, Some(1), SizeBasis::Estimated), vec![2.0, 1.5]);
        assert_eq!(normalized_sizes(&ds, Some(1), SizeBasis::Actual), vec![2.0]);
        // unstarted, unassigned task falls back to a divisor of 1
        ds.tasks.push(task("T3", 1, Some(1.5), None));
        assert_eq!(normalized_sizes(&ds, Some(1), SizeBasis::Estimated), vec![2.0, 1.5, 1.5]);
    }

    #[test]
    fn mraee_examples() {
        let mut ds = team(1);
        ds.tasks.push(task("A", 1, Some(4.0), None));
        log(&mut ds, "A", "m1", 1, 4.0);
        assert_eq!(mraee(&ds).per_sprint, vec![Some(0.0), None, None, None]);

        ds.tasks.push(task("B", 2, Some(4.0), None));
        ds.tasks.push(task("C", 2, Some(2.0), None));
        log(&mut ds, "B", "m1", 1, 6.0);
        log(&mut ds, "C", "m1", 1, 1.0);
        // unestimated and zero-effort tasks are ignored
        ds.tasks.push(task("D", 2, None, None));
        log(&mut ds, "D", "m1", 1, 1.0);
        ds.tasks.push(task("E", 2, Some(3.0), None));
        let series = mraee(&ds);
        assert_eq!(series.per_sprint[1], Some(0.5));
        assert_eq!(series.overall, Some(0.25));
    }

    #[test]
    fn unestimated_fraction_boundaries() {
        let mut ds = team(1);
        assert_eq!(unestimated_active_fraction(&ds).overall, None);
        for i in 0..20 {
            let id = format!("T{i}");
            ds.tasks.push(task(&id, 1 + i % 4, if i == 0 { None } else { Some(1.0) }, None));
            log(&mut ds, &id, "m1", 1, 1.0);
        }
        // inactive tasks do not count
        ds.tasks.push(task("idle", 1, None, None));
        let series = unestimated_active_fraction(&ds);
        assert_eq!(series.overall, Some(0.05));
        assert_eq!(series.per_sprint[0], Some(0.2));
        assert_eq!(series.per_sprint[1], Some(0.0));
    }

    #[test]
    fn meeting_counts_and_absences() {
        let mut ds = team(5);
        assert!(meeting_stats(&ds, MeetingKind::Scrum).per_sprint.iter().all(|s| s.count == 0));
        let everyone: BTreeSet<MemberId> = ds.members.iter().map(|m| m.id.clone()).collect();
        for (i, minutes) in [10.0, 20.0].into_iter().enumerate() {
            ds.meetings.push(Meeting {
                id: format!("S{i}"),
                kind: MeetingKind::Scrum,
                sprint: 1,
                day: 2 + i as u32,
                duration_minutes: minutes,
                participants: everyone.clone(),
            });
        }
        let mut four = everyone.clone();
        four.remove(&MemberId::from("m3"));
        ds.meetings.push(Meeting {
            id: "P1".into(),
            kind: MeetingKind::Planning,
            sprint: 1,
            day: 1,
            duration_minutes: 60.0,
            participants: four,
        });
        let scrum = meeting_stats(&ds, MeetingKind::Scrum);
        assert_eq!(scrum.per_sprint[0].count, 2);
        assert_eq!(scrum.per_sprint[0].mean_duration_minutes, Some(15.0));
        assert!(scrum.per_sprint[0].full_attendance);
        assert_eq!(scrum.per_sprint[1].mean_duration_minutes, None);
        let planning = meeting_stats(&ds, MeetingKind::Planning);
        assert_eq!(planning.total_absences(), 1);
        assert!(!planning.per_sprint[0].full_attendance);
        assert_eq!(planning.per_sprint[0].mean_participants, Some(4.0));
    }
}
