//! Shared fixtures for the CLI and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sprintcard::domain::{
    DonenessEvidence, EffortEntry, ManualScores, Meeting, MeetingKind, Member, MemberId, ProjectConfig, Task, TaskId,
    TaskKind,
};
use sprintcard::CohortDataset;

/// Member-by-sprint hours of the sample card team. Member totals are
/// 59, 62, 63 and 66 h, which gives a Gini index of exactly 0.022.
pub const SAMPLE_HOURS: [[f64; 4]; 4] =
    [[13.0, 15.0, 15.5, 15.5], [14.0, 15.0, 16.5, 16.5], [14.0, 15.0, 17.0, 17.0], [15.0, 16.0, 18.0, 17.0]];
/// Relative underestimation of every task, per sprint.
pub const SAMPLE_ERROR: [f64; 4] = [0.5, 0.3, 0.15, 0.1];
const WORK_DAYS: [u32; 8] = [1, 2, 3, 4, 5, 8, 9, 10];

/// A four-member team matching the sample assessment card: balanced effort,
/// shrinking estimation error, every task estimated, scrums getting shorter
/// and more frequent, and one absence from the last planning meeting.
pub fn sample_card_team() -> CohortDataset {
    let ids: Vec<MemberId> = (1..=4).map(|i| MemberId::new(format!("m{i}"))).collect();
    let members = ids.iter().zip(["Ada", "Bo", "Cy", "Di"]).map(|(id, n)| Member { id: id.clone(), name: n.into() });
    let mut ds = CohortDataset::empty("sample-card", ProjectConfig::default(), members.collect());
    for s in 0..4u32 {
        for (m, id) in ids.iter().enumerate() {
            let actual = SAMPLE_HOURS[m][s as usize] / 8.0;
            for (k, day) in WORK_DAYS.iter().enumerate() {
                let task = TaskId::new(format!("S{}-{id}-{k}", s + 1));
                let kind = if s >= 2 && m == 0 && k == 0 { TaskKind::TechnicalDebt } else { TaskKind::Task };
                ds.tasks.push(Task {
                    id: task.clone(),
                    title: format!("work item {k}"),
                    kind,
                    sprint: s + 1,
                    estimate_hours: Some(actual / (1.0 + SAMPLE_ERROR[s as usize])),
                    planned_assignees: Some(1),
                });
                ds.effort.push(EffortEntry { task, member: id.clone(), day: *day, hours: actual });
            }
        }
        let everyone = || ids.iter().cloned().collect();
        let mut planning: std::collections::BTreeSet<MemberId> = everyone();
        if s == 3 {
            planning.remove(&ids[3]);
        }
        ds.meetings.push(Meeting {
            id: format!("plan-{}", s + 1),
            kind: MeetingKind::Planning,
            sprint: s + 1,
            day: 1,
            duration_minutes: 60.0,
            participants: planning,
        });
        for k in 0..2 + s {
            ds.meetings.push(Meeting {
                id: format!("scrum-{}-{k}", s + 1),
                kind: MeetingKind::Scrum,
                sprint: s + 1,
                day: 2 + 2 * k,
                duration_minutes: f64::from(20 - 2 * s),
                participants: everyone(),
            });
        }
        ds.doneness.push(DonenessEvidence {
            sprint: s + 1,
            unit_test_evidence: true,
            e2e_test_evidence: true,
            demo_failures: 0,
            td_tasks_consistent: true,
            docker_image_available: true,
        });
    }
    ds.manual = Some(ManualScores {
        review_quality: vec![0.9, 0.85, 0.9, 0.95],
        retrospective_quality: vec![0.8, 0.85, 0.9, 0.9],
        participation: ids.iter().map(|id| (id.clone(), 4)).collect(),
    });
    ds
}

pub fn sprintcard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sprintcard")).args(args).output().expect("binary runs")
}

pub fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}
