//! Acceptance suite. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{path, sample_card_team, sprintcard, SAMPLE_ERROR, SAMPLE_HOURS};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sprintcard::compliance::{
    aggregate, classify, DonenessReport, DonenessSprint, Improvement, MemberAssessment, MetricId, PanelSeries,
    RatingLevel,
};
use sprintcard::domain::{MemberId, ProjectConfig, TaskId};
use sprintcard::metrics::{DailyEffortSeries, EffortMatrix, SprintSeries};
use sprintcard::stats::{gini, least_squares_slope, pearson, BoxplotStats};
use sprintcard::synth::{generate, Scenario, ScenarioSpec, Target};
use sprintcard::{assess, ingest, metrics, CohortDataset};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    }};
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("threshold faithfulness", Duration::from_secs(1), threshold_faithfulness),
        ("sample card narrative", Duration::MAX, sample_card_narrative),
        ("oracle equivalence", Duration::from_secs(10), oracle_equivalence),
        ("scenario detection matrix", Duration::from_secs(60), detection_matrix),
        ("conservation and invariance", Duration::MAX, conservation_and_invariance),
        ("grade formula", Duration::MAX, grade_formula),
        ("end-to-end determinism", Duration::MAX, end_to_end_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > limit {
                Err(format!("took {elapsed:.2?}, limit {limit:.0?}"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({elapsed:.2?}) {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({elapsed:.2?}) {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
}

fn series(values: [f64; 4]) -> SprintSeries {
    SprintSeries::from_defined(values.to_vec())
}

fn level_of(name: &str) -> RatingLevel {
    RatingLevel::ALL.into_iter().find(|l| l.as_str() == name).unwrap()
}

fn threshold_faithfulness() -> Outcome {
    let cfg = ProjectConfig::default();
    let empty_matrix = || EffortMatrix { members: vec![], hours: vec![] };
    let daily = |r: f64| PanelSeries::DailyTrend {
        sprints: (1..=4)
            .map(|s| DailyEffortSeries { sprint: s, hours_by_day: vec![], trend_r: r, flat: false })
            .collect(),
    };
    let size = |q3: f64| PanelSeries::TaskSize {
        cap: 2.0,
        estimated: vec![],
        actual: vec![],
        estimated_overall: BoxplotStats::from_values(&[q3; 4]),
        actual_overall: BoxplotStats::default(),
    };
    let budget = |team_size: usize, hours: f64| PanelSeries::Budget {
        effort: series([hours; 4]),
        team_size,
        band_low: 0.0,
        band_high: 0.0,
    };
    let just_above = |v: f64| v + 1e-6;
    let just_below = |v: f64| v - 1e-6;

    let mut cases: Vec<(String, PanelSeries, &str)> = Vec::new();
    for (g, want) in [
        (0.0, "good"),
        (just_below(0.03), "good"),
        (0.03, "good"),
        (just_above(0.03), "acceptable"),
        (just_below(0.09), "acceptable"),
        (0.09, "acceptable"),
        (just_above(0.09), "critical"),
    ] {
        cases.push((format!("gini {g}"), PanelSeries::Balance { gini: g, matrix: empty_matrix() }, want));
    }
    for (r, want) in
        [(-0.4, "good"), (0.3, "good"), (just_above(0.3), "warning"), (0.5, "warning"), (just_above(0.5), "critical")]
    {
        cases.push((format!("r {r}"), daily(r), want));
    }
    for (m, want) in [
        (0.05, "excellent"),
        (0.2, "excellent"),
        (just_above(0.2), "acceptable"),
        (0.5, "acceptable"),
        (just_above(0.5), "critical"),
    ] {
        cases.push((format!("mraee {m}"), PanelSeries::Mraee { series: series([m; 4]) }, want));
    }
    for (u, want) in [(0.0, "good"), (0.02, "acceptable"), (0.05, "acceptable"), (just_above(0.05), "critical")] {
        let s = PanelSeries::Unestimated { series: series([u; 4]), active: vec![], unestimated: vec![] };
        cases.push((format!("unestimated {u}"), s, want));
    }
    for (q3, want) in [(1.5, "good"), (2.0, "good"), (just_above(2.0), "warning")] {
        cases.push((format!("task size q3 {q3}"), size(q3), want));
    }
    for (hours, want) in
        [(16.0, "good"), (15.0, "good"), (17.0, "good"), (just_below(15.0), "warning"), (just_above(17.0), "warning")]
    {
        cases.push((format!("1 member at {hours} h"), budget(1, hours), want));
    }
    for (hours, want) in [
        (60.0, "good"),
        (68.0, "good"),
        (just_below(60.0), "warning"),
        (just_above(68.0), "warning"),
        (48.0, "warning"),
        (just_below(48.0), "critical"),
        (80.0, "warning"),
        (just_above(80.0), "critical"),
    ] {
        cases.push((format!("4 members at {hours} h"), budget(4, hours), want));
    }

    for (label, s, want) in &cases {
        let got = classify(s, &cfg).level;
        ensure!(got == level_of(want), "{label}: expected {want}, got {got}");
    }
    Ok(format!("{} boundary cases", cases.len()))
}

fn sample_card_narrative() -> Outcome {
    let ds = sample_card_team();
    ensure!(ingest::validate(&ds).is_empty(), "fixture does not validate cleanly");
    let a = assess(&ds).map_err(|e| e.to_string())?;
    let expected = [
        (MetricId::Budget, RatingLevel::Good),
        (MetricId::Balance, RatingLevel::Good),
        (MetricId::DailyTrend, RatingLevel::Good),
        (MetricId::TaskSize, RatingLevel::Good),
        (MetricId::Mraee, RatingLevel::Acceptable),
        (MetricId::Unestimated, RatingLevel::Good),
        (MetricId::Meetings, RatingLevel::Acceptable),
    ];
    for (id, want) in expected {
        let got = a.rating(id).unwrap();
        ensure!(got == want, "{id}: expected {want}, got {got}");
    }

    // Hand computation from the fixture's constants.
    let totals: Vec<f64> = SAMPLE_HOURS.iter().map(|row| row.iter().sum()).collect();
    ensure!(totals == [59.0, 62.0, 63.0, 66.0], "member totals {totals:?}");
    let gini_hand = (-3.0 * 59.0 - 62.0 + 63.0 + 3.0 * 66.0) / (4.0 * 250.0);
    let PanelSeries::Balance { gini: g, .. } = &a.panel(MetricId::Balance).unwrap().series else { unreachable!() };
    ensure!((g - 0.022).abs() < 1e-9 && (g - gini_hand).abs() < 1e-9, "gini {g}");

    let PanelSeries::Mraee { series: m } = &a.panel(MetricId::Mraee).unwrap().series else { unreachable!() };
    for (s, want) in SAMPLE_ERROR.iter().enumerate() {
        let got = m.per_sprint[s].unwrap();
        ensure!((got - want).abs() < 1e-9, "mraee sprint {}: {got} vs {want}", s + 1);
    }
    let overall = m.overall.unwrap();
    ensure!((overall - 0.2625).abs() < 1e-9 && overall < 0.30, "overall mraee {overall}");
    ensure!(a.panel(MetricId::Mraee).unwrap().improvement == Improvement::Improving, "mraee not improving");

    let PanelSeries::Budget { effort, .. } = &a.panel(MetricId::Budget).unwrap().series else { unreachable!() };
    for (s, want) in [56.0, 61.0, 67.0, 66.0].iter().enumerate() {
        let got = effort.per_sprint[s].unwrap();
        ensure!((got - want).abs() < 1e-9, "sprint {} effort {got}", s + 1);
    }
    let PanelSeries::DailyTrend { sprints } = &a.panel(MetricId::DailyTrend).unwrap().series else { unreachable!() };
    ensure!(sprints.iter().all(|s| s.trend_r < 0.3), "a sprint has r >= 0.3");
    let PanelSeries::Unestimated { series: u, .. } = &a.panel(MetricId::Unestimated).unwrap().series else {
        unreachable!()
    };
    ensure!(u.per_sprint.iter().all(|v| *v == Some(0.0)), "unestimated {u:?}");
    let PanelSeries::Meetings { scrum, planning } = &a.panel(MetricId::Meetings).unwrap().series else {
        unreachable!()
    };
    let absences: Vec<u32> = planning.per_sprint.iter().map(|s| s.total_absences).collect();
    ensure!(absences == [0, 0, 0, 1] && scrum.total_absences() == 0, "planning absences {absences:?}");

    let summary = sprintcard::render::render_summary(&a);
    let line = summary.lines().find(|l| l.starts_with("balance:")).unwrap_or_default();
    ensure!(line.starts_with("balance: 2.2% ") && line.ends_with("— good"), "summary line {line:?}");
    Ok(format!("Gini {g:.3}, overall MRAEE {overall:.4}, 7 ratings as narrated"))
}

fn gini_pairwise(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let total: f64 = xs.iter().flat_map(|a| xs.iter().map(move |b| (a - b).abs())).sum();
    total / (2.0 * n * n * mean)
}

fn pearson_cov(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
    let sx = (xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / n).sqrt();
    (sx > 1e-12 && sy > 1e-12).then(|| cov / (sx * sy))
}

fn quantile_oracle(xs: &[f64], p: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn oracle_equivalence() -> Outcome {
    const N: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let vector = |rng: &mut ChaCha8Rng, lo: usize, hi: usize, max: f64| -> Vec<f64> {
        let n = rng.gen_range(lo..hi);
        (0..n).map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..max) }).collect()
    };
    for i in 0..N {
        let xs = vector(&mut rng, 1, 16, 40.0);
        let (a, b) = (gini(&xs), gini_pairwise(&xs));
        ensure!((a - b).abs() <= 1e-9, "gini input {i}: {a} vs {b}");
    }
    for i in 0..N {
        let ys = vector(&mut rng, 2, 22, 12.0);
        let days: Vec<f64> = (1..=ys.len()).map(|d| d as f64).collect();
        match (pearson(&days, &ys), pearson_cov(&days, &ys)) {
            (Some(a), Some(b)) => ensure!((a - b).abs() <= 1e-9, "r input {i}: {a} vs {b}"),
            (None, None) => {}
            (a, b) => return Err(format!("r input {i}: definedness {a:?} vs {b:?}")),
        }
    }
    for i in 0..N {
        let xs = vector(&mut rng, 1, 50, 6.0);
        let b = BoxplotStats::from_values(&xs);
        let (q1, med, q3) = (quantile_oracle(&xs, 0.25), quantile_oracle(&xs, 0.5), quantile_oracle(&xs, 0.75));
        ensure!(
            (b.q1 - q1).abs() <= 1e-9 && (b.median - med).abs() <= 1e-9 && (b.q3 - q3).abs() <= 1e-9,
            "boxplot input {i}"
        );
        let fence = 1.5 * (q3 - q1);
        let inside: Vec<f64> = xs.iter().copied().filter(|v| *v >= q1 - fence && *v <= q3 + fence).collect();
        let lo = inside.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ensure!((b.whisker_low - lo).abs() <= 1e-9 && (b.whisker_high - hi).abs() <= 1e-9, "whiskers input {i}");
        ensure!(b.outliers.len() + inside.len() == xs.len(), "outliers input {i}");
    }
    for i in 0..N {
        let ys = vector(&mut rng, 2, 10, 1.0);
        let xs: Vec<f64> = (1..=ys.len()).map(|s| s as f64).collect();
        let n = xs.len() as f64;
        let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let closed = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let got = least_squares_slope(&xs, &ys).ok_or("slope undefined")?;
        ensure!((got - closed).abs() <= 1e-9, "slope input {i}: {got} vs {closed}");
    }
    Ok(format!("4 × {N} inputs"))
}

fn detection_matrix() -> Outcome {
    let mut checked = 0;
    for scenario in Scenario::ALL {
        for seed in 1..=100 {
            let ds = generate(&ScenarioSpec::new(scenario, seed)).map_err(|e| e.to_string())?;
            let report = ingest::validate(&ds);
            ensure!(report.is_accepted(), "{scenario} seed {seed} fails validation");
            let a = assess(&ds).map_err(|e| e.to_string())?;
            for id in MetricId::ALL {
                let level = a.rating(id).unwrap();
                let ok = match scenario.target() {
                    Target::Metric(t) if t == id => level <= RatingLevel::Warning,
                    Target::Nothing => level >= RatingLevel::Good,
                    _ => scenario.couples(id, ds.team_size()) || level >= RatingLevel::Acceptable,
                };
                ensure!(ok, "{scenario} seed {seed}: {id} rated {level}");
            }
            let doneness_tripped = !a.doneness.overall_ok;
            ensure!(doneness_tripped == (scenario.target() == Target::Doneness), "{scenario} seed {seed}: doneness");
            if scenario == Scenario::Compliant {
                ensure!(report.is_empty() && a.warnings.is_empty(), "compliant seed {seed} warns");
                ensure!(a.members.iter().all(|m| m.flags.is_empty()), "compliant seed {seed} flags a member");
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} datasets"))
}

fn relabel(ds: &CohortDataset) -> CohortDataset {
    let mut out = ds.clone();
    let task = |t: &TaskId| TaskId::new(format!("renamed-{t}"));
    let member = |m: &MemberId| MemberId::new(format!("who-{m}"));
    out.tasks.iter_mut().for_each(|t| t.id = task(&t.id));
    out.members.iter_mut().for_each(|m| m.id = member(&m.id));
    for e in &mut out.effort {
        e.task = task(&e.task);
        e.member = member(&e.member);
    }
    for m in &mut out.meetings {
        m.participants = m.participants.iter().map(member).collect();
    }
    if let Some(manual) = &mut out.manual {
        manual.participation = manual.participation.iter().map(|(m, n)| (member(m), *n)).collect();
    }
    out
}

fn conservation_and_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut datasets = 0;
    for scenario in Scenario::ALL {
        for seed in 1..=15 {
            let team_size = rng.gen_range(2..9);
            let ds = generate(&ScenarioSpec { team_size, ..ScenarioSpec::new(scenario, seed) })
                .map_err(|e| e.to_string())?;
            let tag = format!("{scenario} seed {seed} size {team_size}");

            let logged: f64 = ds.effort.iter().map(|e| e.hours).sum();
            let team = metrics::team_sprint_effort(&ds);
            let matrix = metrics::member_sprint_effort(&ds);
            let columns = matrix.column_totals();
            for s in ds.config.sprints() {
                let t = team.sprint(s).unwrap_or(0.0);
                let daily = metrics::daily_effort(&ds, s).total();
                ensure!((columns[s as usize - 1] - t).abs() < 1e-9 && (daily - t).abs() < 1e-9, "{tag}: sprint {s}");
            }
            let rows = matrix.row_totals();
            ensure!((rows.iter().sum::<f64>() - logged).abs() < 1e-9, "{tag}: member totals");

            let g = gini(&rows);
            let k = rng.gen_range(0.1..10.0);
            let scaled: Vec<f64> = rows.iter().map(|r| r * k).collect();
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rng);
            ensure!((gini(&scaled) - g).abs() < 1e-9, "{tag}: gini not scale invariant");
            ensure!((gini(&shuffled) - g).abs() < 1e-9, "{tag}: gini not permutation invariant");

            ensure!(metrics::mraee(&relabel(&ds)) == metrics::mraee(&ds), "{tag}: mraee depends on labels");

            let a = assess(&ds).map_err(|e| e.to_string())?;
            for which in 0..a.panels.len() {
                let Some(better) = RatingLevel::ALL.into_iter().find(|l| *l > a.panels[which].rating.level) else {
                    continue;
                };
                let mut panels = a.panels.clone();
                panels[which].rating.level = better;
                let b = aggregate(
                    &a.team_id,
                    panels,
                    a.doneness.clone(),
                    a.members.clone(),
                    ds.manual.as_ref(),
                    &ds.config,
                );
                ensure!(b.team_score >= a.team_score && b.final_grade >= a.final_grade, "{tag}: panel {which}");
            }
            datasets += 1;
        }
    }
    Ok(format!("{datasets} generated datasets"))
}

fn grade_formula() -> Outcome {
    let cfg = ProjectConfig::default();
    let template = assess(&generate(&ScenarioSpec::new(Scenario::Compliant, 1)).unwrap()).unwrap();
    let points = |l: RatingLevel| match l {
        RatingLevel::Excellent => 1.0,
        RatingLevel::Good => 0.9,
        RatingLevel::Acceptable => 0.7,
        RatingLevel::Warning => 0.5,
        RatingLevel::Critical => 0.2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(80_20);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let mut panels = template.panels.clone();
        for p in &mut panels {
            p.rating.level = *RatingLevel::ALL.choose(&mut rng).unwrap();
            p.improvement =
                *[Improvement::Improving, Improvement::Stable, Improvement::Worsening].choose(&mut rng).unwrap();
        }
        let per_sprint: Vec<DonenessSprint> = (1..=4)
            .map(|s| DonenessSprint {
                sprint: s,
                testing_ok: rng.gen_bool(0.7),
                demo_ok: rng.gen_bool(0.7),
                td_ok: rng.gen_bool(0.7),
                release_ok: (s % 2 == 0).then(|| rng.gen_bool(0.7)),
            })
            .collect();
        let doneness = DonenessReport { overall_ok: false, per_sprint };
        let members: Vec<MemberAssessment> = (0..rng.gen_range(2..8))
            .map(|i| MemberAssessment {
                member_id: MemberId::new(format!("m{i}")),
                flags: Default::default(),
                sprint_hours: vec![],
                violated_sprints: vec![],
                max_daily_hours: 0.0,
                participation: None,
                score: rng.gen_range(0.0..=1.0),
            })
            .collect();
        let manual = rng.gen_bool(0.5).then(|| sprintcard::domain::ManualScores {
            review_quality: (0..4).map(|_| rng.gen_range(0.0..=1.0)).collect(),
            retrospective_quality: (0..4).map(|_| rng.gen_range(0.0..=1.0)).collect(),
            participation: Default::default(),
        });

        // Direct arithmetic.
        let improving = panels.iter().filter(|p| p.improvement == Improvement::Improving).count() as f64;
        let coordination =
            (panels.iter().map(|p| points(p.rating.level)).sum::<f64>() / 7.0 + 0.05 * improving).min(1.0);
        let mut flags: Vec<bool> = Vec::new();
        for s in &doneness.per_sprint {
            flags.extend([s.testing_ok, s.demo_ok, s.td_ok]);
            flags.extend(s.release_ok);
        }
        let doneness_score = flags.iter().filter(|f| **f).count() as f64 / flags.len() as f64;
        let team = match &manual {
            Some(m) => {
                let q = (m.review_quality.iter().sum::<f64>() + m.retrospective_quality.iter().sum::<f64>()) / 8.0;
                (coordination + q + doneness_score) / 3.0
            }
            None => (coordination + doneness_score) / 2.0,
        };
        let individual = members.iter().map(|m| m.score).sum::<f64>() / members.len() as f64;
        let expected = 0.8 * team + 0.2 * individual;

        let got = aggregate("grade", panels, doneness, members, manual.as_ref(), &cfg);
        let diff = (got.final_grade - expected).abs();
        worst = worst.max(diff);
        ensure!(diff <= 1e-12, "case {case}: {} vs {expected}", got.final_grade);
        ensure!((got.team_score - team).abs() <= 1e-12, "case {case}: team score");
    }
    Ok(format!("100 combinations, max deviation {worst:.1e}"))
}

fn attr(node: roxmltree::Node<'_, '_>, name: &str) -> Option<f64> {
    node.attribute(name)?.parse().ok()
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("team.json");
    let gen = sprintcard(&["generate", "compliant", "--team-size", "5", "--seed", "11", "--out", path(&input)]);
    ensure!(gen.status.code() == Some(0), "generate exited with {:?}", gen.status.code());

    let mut runs = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        let o = sprintcard(&["assess", path(&input), "--out-dir", path(&out), "--card", "--report", "--summary"]);
        ensure!(o.status.code() == Some(0), "assess exited with {:?}", o.status.code());
        let mut files = Vec::new();
        for name in ["compliant-11.report.json", "compliant-11.card.svg", "compliant-11.summary.txt"] {
            files.push(fs::read(out.join(name)).map_err(|e| format!("{name}: {e}"))?);
        }
        runs.push(files);
    }
    ensure!(runs[0] == runs[1], "outputs differ between runs");

    let svg = String::from_utf8(runs[0][1].clone()).map_err(|e| e.to_string())?;
    let doc = roxmltree::Document::parse(&svg).map_err(|e| format!("card is not well-formed: {e}"))?;
    let class = |c: &str| doc.descendants().filter(move |n| n.attribute("class") == Some(c)).collect::<Vec<_>>();
    let band = class("budget-band");
    ensure!(band.len() == 1, "expected one budget band");
    ensure!(attr(band[0], "data-low") == Some(75.0) && attr(band[0], "data-high") == Some(85.0), "band values");
    let caps = class("cap-line");
    ensure!(caps.len() == 2 && caps.iter().all(|c| attr(*c, "data-hours") == Some(2.0)), "task-size cap lines");
    ensure!(class("mraee-overall").len() == 1, "missing MRAEE overall line");
    ensure!(class("budget-bar").len() == 4, "expected four budget bars");
    Ok("report, card and summary byte-identical".into())
}
