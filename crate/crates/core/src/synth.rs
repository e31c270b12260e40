//! Seeded generator of synthetic team datasets.
//!
//! Every scenario starts from a compliant team and perturbs exactly one
//! behavior, so the targeted property holds for every seed. Effort is handled
//! in integer quarter-hours, which keeps all sums exact.
//!
//! Coupling between scenarios and criteria:
//! - `bulk_backfill` and `ramp_up` reshape daily totals only. Their daily
//!   shape is redrawn from the seeded stream until the team trend lands in
//!   the targeted band.
//! - `slacker` lets the other members absorb the missing hours up to 19.5 h
//!   each, so the team budget stays on target for teams of four or more;
//!   smaller teams also miss the budget.
//! - `subteam_split` holds separate scrums per sub-team, so the meetings
//!   panel records the absences of the other half.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compliance::MetricId;
use crate::domain::{
    CohortDataset, DonenessEvidence, EffortEntry, ManualScores, Meeting, MeetingKind, Member, MemberId, ProjectConfig,
    Task, TaskId, TaskKind,
};
use crate::stats;

/// Quarter hours per hour.
const UNITS_PER_HOUR: u32 = 4;
const MAX_CHUNK_UNITS: u32 = 7;
const MIN_CHUNK_UNITS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Compliant,
    BulkBackfill,
    Slacker,
    SubteamSplit,
    RampUp,
    UnestimatedHeavy,
    Overcommit,
}

/// What a scenario is built to trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Nothing,
    Metric(MetricId),
    Doneness,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Compliant,
        Scenario::BulkBackfill,
        Scenario::Slacker,
        Scenario::SubteamSplit,
        Scenario::RampUp,
        Scenario::UnestimatedHeavy,
        Scenario::Overcommit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Compliant => "compliant",
            Scenario::BulkBackfill => "bulk_backfill",
            Scenario::Slacker => "slacker",
            Scenario::SubteamSplit => "subteam_split",
            Scenario::RampUp => "ramp_up",
            Scenario::UnestimatedHeavy => "unestimated_heavy",
            Scenario::Overcommit => "overcommit",
        }
    }

    pub fn target(self) -> Target {
        match self {
            Scenario::Compliant => Target::Nothing,
            Scenario::BulkBackfill | Scenario::RampUp => Target::Metric(MetricId::DailyTrend),
            Scenario::Slacker => Target::Metric(MetricId::Balance),
            Scenario::SubteamSplit => Target::Metric(MetricId::Meetings),
            Scenario::UnestimatedHeavy => Target::Metric(MetricId::Unestimated),
            Scenario::Overcommit => Target::Doneness,
        }
    }

    /// Human-readable statement of the property the scenario guarantees.
    pub fn target_property(self) -> &'static str {
        match self {
            Scenario::Compliant => {
                "every member 16 ± 0.5 h per sprint, estimated task sizes ≤ 2 h per participant, \
                 MRAEE < 20%, all tasks estimated, ≥ 3 scrums and 1 planning per sprint with full attendance"
            }
            Scenario::BulkBackfill => "≥ 60% of each sprint's hours logged in the last 3 days (daily trend r > 0.5)",
            Scenario::Slacker => "one member logs < 40% of the others' mean (Gini > 9% for teams of up to 5)",
            Scenario::SubteamSplit => "two disjoint sub-teams that never share a task and hold separate scrums",
            Scenario::RampUp => "effort ramps up within each sprint (daily trend r in (0.3, 0.5])",
            Scenario::UnestimatedHeavy => "20% of each sprint's active tasks carry no estimate",
            Scenario::Overcommit => "no unit/E2E test evidence in sprints 1 and 2, compliant effort",
        }
    }

    /// Whether the scenario may also move `metric` away from compliance.
    pub fn couples(self, metric: MetricId, team_size: usize) -> bool {
        matches!((self, metric), (Scenario::Slacker, MetricId::Budget) if team_size < 4)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL.into_iter().find(|sc| sc.as_str() == s).ok_or_else(|| SpecError::UnknownScenario(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("team_size must be at least 2, got {0}")]
    TeamTooSmall(usize),
    #[error("sprints must last at least 7 days, got {0}")]
    SprintTooShort(u32),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown scenario \"{0}\"; valid: compliant, bulk_backfill, slacker, subteam_split, ramp_up, unestimated_heavy, overcommit")]
    UnknownScenario(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub team_size: usize,
    pub seed: u64,
    pub config: ProjectConfig,
}

impl ScenarioSpec {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self { scenario, team_size: 5, seed, config: ProjectConfig::default() }
    }
}

const TASK_TOPICS: [&str; 12] = [
    "login form",
    "search endpoint",
    "profile page",
    "database schema",
    "notification service",
    "admin dashboard",
    "booking flow",
    "API client",
    "filter panel",
    "map view",
    "export to CSV",
    "password reset",
];
const TASK_VERBS: [&str; 5] = ["Implement", "Test", "Design", "Review", "Refine"];

/// Per-member work item: a task share measured in quarter hours.
struct WorkItem {
    task: usize,
    units: u32,
}

struct Builder<'a> {
    spec: &'a ScenarioSpec,
    rng: ChaCha8Rng,
    members: Vec<MemberId>,
    tasks: Vec<Task>,
    effort: Vec<EffortEntry>,
}

pub fn generate(spec: &ScenarioSpec) -> Result<CohortDataset, SpecError> {
    if spec.team_size < 2 {
        return Err(SpecError::TeamTooSmall(spec.team_size));
    }
    if let Some(problem) = spec.config.check().into_iter().next() {
        return Err(SpecError::Config(problem));
    }
    if spec.config.sprint_length_days < 7 {
        return Err(SpecError::SprintTooShort(spec.config.sprint_length_days));
    }

    let members: Vec<Member> =
        (1..=spec.team_size).map(|i| Member { id: MemberId(format!("m{i}")), name: format!("Member {i}") }).collect();
    let mut b = Builder {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        members: members.iter().map(|m| m.id.clone()).collect(),
        tasks: Vec::new(),
        effort: Vec::new(),
    };

    let slacker = (spec.scenario == Scenario::Slacker).then(|| b.rng.gen_range(0..spec.team_size));
    for sprint in spec.config.sprints() {
        b.sprint(sprint, slacker);
    }
    let meetings = b.meetings();
    let manual = b.manual();
    let doneness = spec
        .config
        .sprints()
        .map(|s| DonenessEvidence {
            sprint: s,
            unit_test_evidence: !(spec.scenario == Scenario::Overcommit && s <= 2),
            e2e_test_evidence: true,
            demo_failures: 0,
            td_tasks_consistent: true,
            docker_image_available: true,
        })
        .collect();

    Ok(CohortDataset {
        team_id: format!("{}-{}", spec.scenario, spec.seed),
        config: spec.config.clone(),
        members,
        tasks: b.tasks,
        effort: b.effort,
        meetings,
        doneness,
        manual: Some(manual),
    })
}

impl Builder<'_> {
    fn cfg(&self) -> &ProjectConfig {
        &self.spec.config
    }

    fn team_size(&self) -> usize {
        self.members.len()
    }

    fn budget_units(&self) -> u32 {
        (self.cfg().budget_hours_per_person_per_sprint * UNITS_PER_HOUR as f64).round() as u32
    }

    /// Sprint totals per member, in quarter hours.
    fn member_units(&mut self, slacker: Option<usize>) -> Vec<u32> {
        let budget = self.budget_units() as i64;
        let jitter = (self.cfg().budget_tolerance_hours * UNITS_PER_HOUR as f64 / 2.0).floor() as i64;
        let n = self.team_size();
        let draw = |rng: &mut ChaCha8Rng, centre: i64| (centre + rng.gen_range(-jitter..=jitter)).max(1) as u32;
        match slacker {
            None => (0..n).map(|_| draw(&mut self.rng, budget)).collect(),
            Some(who) => {
                let low = ((budget as f64 * 0.3).round() as i64).max(1);
                // others absorb the gap, but stay inside their own allowed range
                let ceiling = (budget as f64 * (1.0 + self.cfg().individual_budget_tolerance_fraction)) as i64 - 2;
                let others = ((budget * n as i64 - low) / (n as i64 - 1)).min(ceiling - jitter);
                let slack_jitter = jitter.min(1);
                (0..n)
                    .map(|m| {
                        if m == who {
                            (low + self.rng.gen_range(-slack_jitter..=slack_jitter)).max(1) as u32
                        } else {
                            draw(&mut self.rng, others)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Adds a task whose estimate misses `actual_units` (all participants) by at most 15%.
    fn new_task(&mut self, sprint: u32, kind: TaskKind, actual_units: u32, planned: Option<u32>) -> usize {
        let n = self.tasks.len();
        let title = match kind {
            TaskKind::TechnicalDebt => format!("Reduce technical debt in {}", TASK_TOPICS[n % TASK_TOPICS.len()]),
            _ => format!(
                "{} {}",
                TASK_VERBS[self.rng.gen_range(0..TASK_VERBS.len())],
                TASK_TOPICS[self.rng.gen_range(0..TASK_TOPICS.len())]
            ),
        };
        // relative error |e| <= 0.15 keeps every task's MRAEE contribution small,
        // and e >= -0.1 keeps 1.75 h shares under the 2 h cap
        let e: f64 = self.rng.gen_range(-0.10..=0.15);
        let estimate = (actual_units as f64 / UNITS_PER_HOUR as f64 / (1.0 + e) * 100.0).round() / 100.0;
        self.tasks.push(Task {
            id: TaskId(format!("S{sprint}-T{:03}", n + 1)),
            title,
            kind,
            sprint,
            estimate_hours: Some(estimate),
            planned_assignees: planned,
        });
        n
    }

    /// Splits `units` into chunks of at most [`MAX_CHUNK_UNITS`].
    fn chunks(&mut self, units: u32) -> Vec<u32> {
        if units == 0 {
            return Vec::new();
        }
        let n = units.div_ceil(6);
        let mut sizes: Vec<u32> = (0..n).map(|i| units / n + u32::from(i < units % n)).collect();
        for _ in 0..n {
            let (i, j) = (self.rng.gen_range(0..n as usize), self.rng.gen_range(0..n as usize));
            if i != j && sizes[i] > MIN_CHUNK_UNITS && sizes[j] < MAX_CHUNK_UNITS {
                sizes[i] -= 1;
                sizes[j] += 1;
            }
        }
        sizes
    }

    fn sprint(&mut self, sprint: u32, slacker: Option<usize>) {
        let scenario = self.spec.scenario;
        let n = self.team_size();
        let totals = self.member_units(slacker);
        let mut items: Vec<Vec<WorkItem>> = (0..n).map(|_| Vec::new()).collect();

        // pair tasks; a split team pairs only inside each half
        let groups: Vec<Vec<usize>> = if scenario == Scenario::SubteamSplit {
            let half = n.div_ceil(2);
            vec![(0..half).collect(), (half..n).collect()]
        } else {
            vec![(0..n).collect()]
        };
        for mut group in groups {
            group.shuffle(&mut self.rng);
            for pair in group.chunks_exact(2) {
                let shares: Vec<u32> = pair.iter().map(|_| self.rng.gen_range(MIN_CHUNK_UNITS..=6)).collect();
                if pair.iter().zip(&shares).any(|(&m, &u)| u + MIN_CHUNK_UNITS > totals[m]) {
                    continue;
                }
                let task = self.new_task(sprint, TaskKind::Task, shares.iter().sum(), Some(2));
                for (&m, &u) in pair.iter().zip(&shares) {
                    items[m].push(WorkItem { task, units: u });
                }
            }
        }

        for m in 0..n {
            let shared: u32 = items[m].iter().map(|w| w.units).sum();
            let chunks = self.chunks(totals[m] - shared);
            for (k, units) in chunks.into_iter().enumerate() {
                let td = m == 0 && k == 0 && sprint >= self.cfg().technical_debt_from_sprint;
                let kind = if td { TaskKind::TechnicalDebt } else { TaskKind::Task };
                let planned = self.rng.gen_bool(0.5).then_some(1);
                let task = self.new_task(sprint, kind, units, planned);
                items[m].push(WorkItem { task, units });
            }
            items[m].shuffle(&mut self.rng);
        }

        if scenario == Scenario::UnestimatedHeavy {
            let first = self.tasks.iter().position(|t| t.sprint == sprint).unwrap_or(self.tasks.len());
            let count = self.tasks.len() - first;
            let mut picks: Vec<usize> = (first..self.tasks.len()).collect();
            picks.shuffle(&mut self.rng);
            for &t in picks.iter().take((count as f64 * 0.2).ceil() as usize) {
                self.tasks[t].estimate_hours = None;
            }
        }

        let days = self.daily_allocation(&totals);
        for (m, member_days) in days.into_iter().enumerate() {
            self.pour(sprint, m, &items[m], member_days);
        }
    }

    /// Daily quarter hours per member for one sprint, shaped by the scenario.
    fn daily_allocation(&mut self, totals: &[u32]) -> Vec<Vec<u32>> {
        let d = self.cfg().sprint_length_days as usize;
        match self.spec.scenario {
            Scenario::BulkBackfill => loop {
                let alloc: Vec<Vec<u32>> = totals.iter().map(|&t| self.backfilled(t, d)).collect();
                if team_trend(&alloc) > 0.5 {
                    break alloc;
                }
            },
            Scenario::RampUp => loop {
                let target: f64 = self.rng.gen_range(0.36..=0.44);
                let profile = self.ramp_profile(d, target);
                let alloc: Vec<Vec<u32>> = totals.iter().map(|&t| proportional(t, &profile)).collect();
                let r = team_trend(&alloc);
                if r > 0.3 && r <= 0.5 {
                    break alloc;
                }
            },
            _ => {
                let mut alloc: Vec<Vec<u32>> = totals.iter().map(|&t| self.spread(t, d)).collect();
                if team_trend(&alloc) > 0.3 {
                    // reversing the days flips the sign of the correlation
                    for row in &mut alloc {
                        row.reverse();
                    }
                }
                alloc
            }
        }
    }

    /// Even spread over 6 to 10 random working days.
    fn spread(&mut self, units: u32, d: usize) -> Vec<u32> {
        let mut days: Vec<usize> = (0..d).collect();
        days.shuffle(&mut self.rng);
        let working = &days[..self.rng.gen_range(6..=10.min(d))];
        let k = working.len() as u32;
        let mut out = vec![0; d];
        for (i, &day) in working.iter().enumerate() {
            out[day] = units / k + u32::from((i as u32) < units % k);
        }
        for _ in 0..k {
            let (a, b) = (working[self.rng.gen_range(0..k as usize)], working[self.rng.gen_range(0..k as usize)]);
            if out[a] > 2 {
                out[a] -= 1;
                out[b] += 1;
            }
        }
        out
    }

    /// 65 to 75% of the hours in the last three days, the rest spread evenly.
    fn backfilled(&mut self, units: u32, d: usize) -> Vec<u32> {
        let late = (units as f64 * self.rng.gen_range(0.65..=0.75)).round() as u32;
        let early = units - late;
        let mut out = vec![0; d];
        let split = |out: &mut [u32], total: u32, rng: &mut ChaCha8Rng| {
            let k = out.len() as u32;
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = total / k + u32::from((i as u32) < total % k);
            }
            out.shuffle(rng);
        };
        split(&mut out[..d - 3], early, &mut self.rng);
        split(&mut out[d - 3..], late, &mut self.rng);
        out
    }

    /// Positive daily weights whose correlation with the day index is `target`.
    fn ramp_profile(&mut self, d: usize, target: f64) -> Vec<f64> {
        let xs: Vec<f64> = (1..=d).map(|x| x as f64).collect();
        let noise: Vec<f64> = (0..d).map(|_| self.rng.gen_range(-1.0..1.0)).collect();
        let zx = standardize(&xs);
        // remove the day component from the noise, then standardize it
        let proj: f64 = zx.iter().zip(&noise).map(|(a, b)| a * b).sum::<f64>() / zx.iter().map(|a| a * a).sum::<f64>();
        let resid: Vec<f64> = noise.iter().zip(&zx).map(|(n, z)| n - proj * z).collect();
        let zn = standardize(&resid);
        let raw: Vec<f64> = zx.iter().zip(&zn).map(|(x, n)| target * x + (1.0 - target * target).sqrt() * n).collect();
        let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
        raw.iter().map(|v| v - min + 1.0).collect()
    }

    /// Emits effort entries by pouring daily amounts into the member's work items in order.
    fn pour(&mut self, sprint: u32, member: usize, items: &[WorkItem], days: Vec<u32>) {
        let mut queue = items.iter().map(|w| (w.task, w.units)).collect::<Vec<_>>().into_iter();
        let mut current = queue.next();
        for (day, mut available) in days.into_iter().enumerate() {
            while available > 0 {
                let Some((task, need)) = current.as_mut() else { break };
                let take = available.min(*need);
                self.effort.push(EffortEntry {
                    task: self.tasks[*task].id.clone(),
                    member: self.members[member].clone(),
                    day: day as u32 + 1,
                    hours: take as f64 / UNITS_PER_HOUR as f64,
                });
                available -= take;
                *need -= take;
                if *need == 0 {
                    current = queue.next();
                }
            }
        }
        debug_assert!(current.is_none(), "sprint {sprint}: work items exceed daily allocation");
    }

    fn meetings(&mut self) -> Vec<Meeting> {
        let d = self.cfg().sprint_length_days;
        let everyone: Vec<MemberId> = self.members.clone();
        let half = self.team_size().div_ceil(2);
        let mut out = Vec::new();
        for sprint in self.cfg().sprints() {
            out.push(Meeting {
                id: format!("S{sprint}-planning"),
                kind: MeetingKind::Planning,
                sprint,
                day: 1,
                duration_minutes: (self.rng.gen_range(12..=24) * 5) as f64,
                participants: everyone.iter().cloned().collect(),
            });
            let mut days: Vec<u32> = (2..=d).collect();
            days.shuffle(&mut self.rng);
            let mut scrum_days = days[..self.rng.gen_range(3..=5)].to_vec();
            scrum_days.sort_unstable();
            for (k, day) in scrum_days.into_iter().enumerate() {
                let groups: Vec<&[MemberId]> = if self.spec.scenario == Scenario::SubteamSplit {
                    vec![&everyone[..half], &everyone[half..]]
                } else {
                    vec![&everyone[..]]
                };
                for (g, group) in groups.into_iter().enumerate() {
                    let suffix = if self.spec.scenario == Scenario::SubteamSplit {
                        format!("-{}", (b'a' + g as u8) as char)
                    } else {
                        String::new()
                    };
                    out.push(Meeting {
                        id: format!("S{sprint}-scrum-{}{suffix}", k + 1),
                        kind: MeetingKind::Scrum,
                        sprint,
                        day,
                        duration_minutes: self.rng.gen_range(10..=20) as f64,
                        participants: group.iter().cloned().collect(),
                    });
                }
            }
        }
        out
    }

    fn manual(&mut self) -> ManualScores {
        let sprints = self.cfg().sprint_count;
        let score = |rng: &mut ChaCha8Rng| (rng.gen_range(0.7..=1.0) * 100.0_f64).round() / 100.0;
        ManualScores {
            review_quality: (0..sprints).map(|_| score(&mut self.rng)).collect(),
            retrospective_quality: (0..sprints).map(|_| score(&mut self.rng)).collect(),
            participation: self.members.iter().map(|m| (m.clone(), sprints + self.rng.gen_range(0..=4))).collect(),
        }
    }
}

fn standardize(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt();
    values.iter().map(|v| (v - mean) / sd).collect()
}

/// Integer split of `units` proportional to `weights` (largest remainder).
fn proportional(units: u32, weights: &[f64]) -> Vec<u32> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| units as f64 * w / total).collect();
    let mut out: Vec<u32> = exact.iter().map(|v| v.floor() as u32).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let missing = units - out.iter().sum::<u32>();
    for &i in order.iter().take(missing as usize) {
        out[i] += 1;
    }
    out
}

fn team_trend(alloc: &[Vec<u32>]) -> f64 {
    let d = alloc.first().map_or(0, Vec::len);
    let team: Vec<f64> = (0..d).map(|day| alloc.iter().map(|row| row[day] as f64).sum()).collect();
    let xs: Vec<f64> = (1..=d).map(|x| x as f64).collect();
    stats::pearson(&xs, &team).unwrap_or(0.0)
}
