//! Assessment card (self-contained SVG) and plain-text summary.
//!
//! The card is a fixed two-column grid of ten panels. Seven carry a rated
//! metric and a colored badge; the other three are unrated companions.

use std::fmt::Write as _;

use crate::compliance::{MetricId, MetricPanel, PanelSeries, RatingLevel, TeamAssessment};
use crate::domain::{CohortDataset, ProjectConfig};
use crate::metrics::{self, MeetingStats};
use crate::stats::BoxplotStats;

const HEADER_PX: f64 = 40.0;
const ROWS: usize = 5;
const FONT: &str = "Helvetica, Arial, sans-serif";
const OVERALL_COLOR: &str = "#f57c00";
const BAR_COLOR: &str = "#5c7cbf";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardLayout {
    pub width_px: u32,
    pub height_px: u32,
}

impl Default for CardLayout {
    fn default() -> Self {
        Self { width_px: 1400, height_px: 1000 }
    }
}

/// One slot of the card grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardPanel {
    TeamDailyEffort,
    EstimatedTaskSize,
    ActualTaskSize,
    Mraee,
    ScrumMeetings,
    TeamSprintEffort,
    IndividualSprintEffort,
    IndividualDailyEffort,
    UnestimatedTasks,
    PlanningMeetings,
}

impl CardPanel {
    /// Grid order: left column top to bottom, then the right column.
    pub const GRID: [CardPanel; 10] = [
        CardPanel::TeamDailyEffort,
        CardPanel::EstimatedTaskSize,
        CardPanel::ActualTaskSize,
        CardPanel::Mraee,
        CardPanel::ScrumMeetings,
        CardPanel::TeamSprintEffort,
        CardPanel::IndividualSprintEffort,
        CardPanel::IndividualDailyEffort,
        CardPanel::UnestimatedTasks,
        CardPanel::PlanningMeetings,
    ];

    pub fn title(self) -> &'static str {
        match self {
            CardPanel::TeamDailyEffort => "Team daily effort",
            CardPanel::EstimatedTaskSize => "Estimated normalized task size",
            CardPanel::ActualTaskSize => "Actual normalized task size",
            CardPanel::Mraee => "Mean absolute relative estimation error",
            CardPanel::ScrumMeetings => "Tracked meetings",
            CardPanel::TeamSprintEffort => "Team sprint effort",
            CardPanel::IndividualSprintEffort => "Individual sprint effort",
            CardPanel::IndividualDailyEffort => "Individual daily effort",
            CardPanel::UnestimatedTasks => "Active tasks without estimation",
            CardPanel::PlanningMeetings => "Tracked planning meetings",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            CardPanel::TeamDailyEffort => "team-daily-effort",
            CardPanel::EstimatedTaskSize => "estimated-task-size",
            CardPanel::ActualTaskSize => "actual-task-size",
            CardPanel::Mraee => "mraee",
            CardPanel::ScrumMeetings => "scrum-meetings",
            CardPanel::TeamSprintEffort => "team-sprint-effort",
            CardPanel::IndividualSprintEffort => "individual-sprint-effort",
            CardPanel::IndividualDailyEffort => "individual-daily-effort",
            CardPanel::UnestimatedTasks => "unestimated-tasks",
            CardPanel::PlanningMeetings => "planning-meetings",
        }
    }

    /// The rated metric shown on this panel, if any.
    pub fn metric(self) -> Option<MetricId> {
        match self {
            CardPanel::TeamDailyEffort => Some(MetricId::DailyTrend),
            CardPanel::EstimatedTaskSize => Some(MetricId::TaskSize),
            CardPanel::Mraee => Some(MetricId::Mraee),
            CardPanel::ScrumMeetings => Some(MetricId::Meetings),
            CardPanel::TeamSprintEffort => Some(MetricId::Budget),
            CardPanel::IndividualSprintEffort => Some(MetricId::Balance),
            CardPanel::UnestimatedTasks => Some(MetricId::Unestimated),
            CardPanel::ActualTaskSize | CardPanel::IndividualDailyEffort | CardPanel::PlanningMeetings => None,
        }
    }

    pub fn for_metric(metric: MetricId) -> CardPanel {
        CardPanel::GRID.into_iter().find(|p| p.metric() == Some(metric)).expect("every metric has a panel")
    }
}

pub fn badge_color(level: RatingLevel) -> &'static str {
    match level {
        RatingLevel::Excellent | RatingLevel::Good => "#2e7d32",
        RatingLevel::Acceptable | RatingLevel::Warning => "#f9a825",
        RatingLevel::Critical => "#c62828",
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn hours(v: f64) -> String {
    format!("{v:.1} h")
}

fn percent(v: f64) -> String {
    format!("{:.1}%", v * 100.0)
}

/// Plot area of one panel in card coordinates.
#[derive(Debug, Clone, Copy)]
struct Area {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Area {
    fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Vertical position of `v` on a `[0, max]` axis.
    fn y_of(&self, v: f64, max: f64) -> f64 {
        self.bottom() - (v / max).clamp(0.0, 1.0) * self.h
    }

    /// Horizontal slot `i` of `n` equal slots: (left, width).
    fn slot(&self, i: usize, n: usize) -> (f64, f64) {
        let w = self.w / n.max(1) as f64;
        (self.x + i as f64 * w, w)
    }
}

struct Svg {
    out: String,
}

#[allow(clippy::too_many_arguments)]
impl Svg {
    fn rect(&mut self, class: &str, x: f64, y: f64, w: f64, h: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<rect class="{class}" x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"{extra}/>"#,
            w.max(0.0),
            h.max(0.0)
        );
    }

    fn line(&mut self, class: &str, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<line class="{class}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{extra}/>"#
        );
    }

    fn text(&mut self, class: &str, x: f64, y: f64, size: f64, anchor: &str, text: &str) {
        let _ = writeln!(
            self.out,
            r##"<text class="{class}" x="{x:.2}" y="{y:.2}" font-size="{size:.1}" text-anchor="{anchor}" fill="#222">{}</text>"##,
            escape(text)
        );
    }

    /// Short annotation in the title row, left of the badge.
    fn header_note(&mut self, class: &str, area: Area, color: &str, text: &str) {
        let _ = writeln!(
            self.out,
            r#"<text class="{class}" x="{:.2}" y="{:.2}" font-size="11.0" text-anchor="end" fill="{color}">{}</text>"#,
            area.x + area.w - 160.0,
            area.y - 13.0,
            escape(text)
        );
    }

    fn no_data(&mut self, area: Area) {
        self.text("no-data", area.x + area.w / 2.0, area.y + area.h / 2.0, 14.0, "middle", "no data");
    }

    fn axis(&mut self, area: Area) {
        self.line("axis", area.x, area.bottom(), area.x + area.w, area.bottom(), "#888", "");
        self.line("axis", area.x, area.y, area.x, area.bottom(), "#888", "");
    }

    fn sprint_labels(&mut self, area: Area, n: usize) {
        for i in 0..n {
            let (x, w) = area.slot(i, n);
            self.text("tick", x + w / 2.0, area.bottom() + 12.0, 10.0, "middle", &format!("S{}", i + 1));
        }
    }
}

/// Renders the assessment card as a standalone SVG document.
pub fn render_card(assessment: &TeamAssessment, dataset: &CohortDataset, layout: CardLayout) -> Vec<u8> {
    let (w, h) = (f64::from(layout.width_px), f64::from(layout.height_px));
    let mut svg = Svg { out: String::new() };
    let _ = writeln!(svg.out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="{FONT}">"#,
        layout.width_px, layout.height_px, layout.width_px, layout.height_px
    );
    svg.rect("background", 0.0, 0.0, w, h, "#ffffff", "");
    svg.text("card-title", 12.0, 26.0, 18.0, "start", &format!("Team assessment card: {}", assessment.team_id));

    let cell_w = w / 2.0;
    let cell_h = (h - HEADER_PX) / ROWS as f64;
    for (i, panel) in CardPanel::GRID.into_iter().enumerate() {
        let (col, row) = (i / ROWS, i % ROWS);
        let (x, y) = (col as f64 * cell_w, HEADER_PX + row as f64 * cell_h);
        let _ = writeln!(svg.out, r#"<g class="panel" id="panel-{}">"#, panel.key());
        svg.rect("frame", x + 4.0, y + 4.0, cell_w - 8.0, cell_h - 8.0, "none", r##" stroke="#bbb""##);
        svg.text("panel-title", x + 12.0, y + 22.0, 13.0, "start", panel.title());
        let rated = panel.metric().and_then(|m| assessment.panel(m));
        if let Some(p) = rated {
            badge(&mut svg, p, x + cell_w - 12.0, y + 10.0);
        }
        let area = Area { x: x + 56.0, y: y + 36.0, w: cell_w - 80.0, h: cell_h - 62.0 };
        draw_panel(&mut svg, panel, area, assessment, dataset);
        let _ = writeln!(svg.out, "</g>");
    }
    let _ = writeln!(svg.out, "</svg>");
    svg.out.into_bytes()
}

fn badge(svg: &mut Svg, panel: &MetricPanel, right: f64, top: f64) {
    let level = panel.rating.level;
    let width = 92.0;
    let _ = writeln!(
        svg.out,
        r#"<rect class="badge badge-{}" data-metric="{}" x="{:.2}" y="{top:.2}" width="{width:.2}" height="18" rx="9" fill="{}"/>"#,
        level.as_str(),
        panel.metric_id.as_str(),
        right - width,
        badge_color(level)
    );
    let _ = writeln!(
        svg.out,
        r##"<text class="badge-label" x="{:.2}" y="{:.2}" font-size="11.0" text-anchor="middle" fill="#fff">{}</text>"##,
        right - width / 2.0,
        top + 13.0,
        level.as_str()
    );
    svg.text("improvement", right - width - 8.0, top + 13.0, 10.0, "end", panel.improvement.as_str());
}

fn draw_panel(svg: &mut Svg, panel: CardPanel, area: Area, assessment: &TeamAssessment, dataset: &CohortDataset) {
    let cfg = &dataset.config;
    let series = |id: MetricId| assessment.panel(id).map(|p| &p.series);
    match (panel, panel.metric().and_then(series)) {
        (CardPanel::TeamSprintEffort, Some(PanelSeries::Budget { effort, band_low, band_high, .. })) => {
            let values: Vec<f64> = effort.per_sprint.iter().map(|v| v.unwrap_or(0.0)).collect();
            let max = values.iter().copied().fold(*band_high, f64::max) * 1.15;
            svg.axis(area);
            let (top, bottom) = (area.y_of(*band_high, max), area.y_of(*band_low, max));
            svg.rect(
                "budget-band",
                area.x,
                top,
                area.w,
                bottom - top,
                "#c8e6c9",
                &format!(r#" data-low="{band_low}" data-high="{band_high}" opacity="0.7""#),
            );
            for (i, v) in values.iter().enumerate() {
                let (x, sw) = area.slot(i, values.len());
                let y = area.y_of(*v, max);
                svg.rect(
                    "budget-bar",
                    x + sw * 0.25,
                    y,
                    sw * 0.5,
                    area.bottom() - y,
                    BAR_COLOR,
                    &format!(r#" data-sprint="{}" data-hours="{v}""#, i + 1),
                );
                svg.text("value", x + sw / 2.0, y - 3.0, 10.0, "middle", &hours(*v));
            }
            svg.sprint_labels(area, values.len());
        }
        (CardPanel::IndividualSprintEffort, Some(PanelSeries::Balance { gini, matrix })) => {
            let rows = matrix.members.len();
            let cols = cfg.sprint_count as usize;
            let scale = 1.5 * cfg.budget_hours_per_person_per_sprint;
            let cell_h = area.h / rows.max(1) as f64;
            for (r, member) in matrix.members.iter().enumerate() {
                let y = area.y + r as f64 * cell_h;
                svg.text("tick", area.x - 4.0, y + cell_h / 2.0 + 4.0, 10.0, "end", member.as_str());
                for c in 0..cols {
                    let v = matrix.hours[r].get(c).copied().unwrap_or(0.0);
                    let (x, cw) = area.slot(c, cols);
                    let t = (v / scale).clamp(0.0, 1.0);
                    svg.rect(
                        "heat-cell",
                        x + 1.0,
                        y + 1.0,
                        cw - 2.0,
                        cell_h - 2.0,
                        &heat_color(t),
                        &format!(r#" data-member="{member}" data-sprint="{}" data-hours="{v}""#, c + 1),
                    );
                    let _ = writeln!(
                        svg.out,
                        r#"<text class="value" x="{:.2}" y="{:.2}" font-size="{:.1}" text-anchor="middle" fill="{}">{}</text>"#,
                        x + cw / 2.0,
                        y + cell_h / 2.0 + 4.0,
                        (cell_h * 0.5).clamp(6.0, 11.0),
                        if t > 0.55 { "#fff" } else { "#222" },
                        format_args!("{v:.1}")
                    );
                }
            }
            svg.sprint_labels(area, cols);
            svg.header_note("gini", area, "#222", &format!("Gini {}", percent(*gini)));
        }
        (CardPanel::TeamDailyEffort, Some(PanelSeries::DailyTrend { sprints })) => {
            let all: Vec<f64> = sprints.iter().flat_map(|s| s.hours_by_day.iter().copied()).collect();
            let max = all.iter().copied().fold(0.0, f64::max);
            if max <= 0.0 {
                svg.no_data(area);
                return;
            }
            let max = max * 1.15;
            svg.axis(area);
            let n = all.len().max(1);
            let step = area.w / n as f64;
            let mut offset = 0;
            for (i, s) in sprints.iter().enumerate() {
                let points: Vec<String> = s
                    .hours_by_day
                    .iter()
                    .enumerate()
                    .map(|(d, v)| {
                        format!("{:.2},{:.2}", area.x + (offset + d) as f64 * step + step / 2.0, area.y_of(*v, max))
                    })
                    .collect();
                let _ = writeln!(
                    svg.out,
                    r#"<polyline class="daily-line" data-sprint="{}" points="{}" fill="none" stroke="{BAR_COLOR}" stroke-width="1.5"/>"#,
                    s.sprint,
                    points.join(" ")
                );
                let (x, sw) = area.slot(i, sprints.len());
                if i > 0 {
                    svg.line("sprint-separator", x, area.y, x, area.bottom(), "#ddd", "");
                }
                svg.text("trend-r", x + sw / 2.0, area.y + 10.0, 10.0, "middle", &format!("r = {:.2}", s.trend_r));
                offset += s.hours_by_day.len();
            }
            svg.sprint_labels(area, sprints.len());
        }
        (CardPanel::EstimatedTaskSize, Some(PanelSeries::TaskSize { cap, estimated, .. })) => {
            boxplots(svg, area, estimated, *cap);
        }
        (CardPanel::ActualTaskSize, _) => {
            if let Some(PanelSeries::TaskSize { cap, actual, .. }) = series(MetricId::TaskSize) {
                boxplots(svg, area, actual, *cap);
            }
        }
        (CardPanel::Mraee, Some(PanelSeries::Mraee { series })) => {
            let Some(overall) = series.overall else {
                svg.no_data(area);
                return;
            };
            let max = series.defined().map(|(_, v)| v).fold(overall, f64::max).max(0.5) * 1.15;
            svg.axis(area);
            let n = series.per_sprint.len();
            for (i, v) in series.per_sprint.iter().enumerate() {
                let (x, sw) = area.slot(i, n);
                match v {
                    Some(v) => {
                        let y = area.y_of(*v, max);
                        svg.rect("mraee-bar", x + sw * 0.25, y, sw * 0.5, area.bottom() - y, BAR_COLOR, "");
                        svg.text("value", x + sw / 2.0, y - 3.0, 10.0, "middle", &percent(*v));
                    }
                    None => svg.text("value", x + sw / 2.0, area.bottom() - 3.0, 10.0, "middle", "n/a"),
                }
            }
            let y = area.y_of(overall, max);
            svg.line(
                "mraee-overall",
                area.x,
                y,
                area.x + area.w,
                y,
                OVERALL_COLOR,
                &format!(r#" stroke-width="2" data-value="{overall}""#),
            );
            svg.header_note("overall-label", area, OVERALL_COLOR, &format!("overall {}", percent(overall)));
            svg.sprint_labels(area, n);
        }
        (CardPanel::UnestimatedTasks, Some(PanelSeries::Unestimated { series, .. })) => {
            if series.overall.is_none() {
                svg.no_data(area);
                return;
            }
            let max = series.defined().map(|(_, v)| v).fold(cfg.unestimated_critical * 2.0, f64::max) * 1.15;
            svg.axis(area);
            let n = series.per_sprint.len();
            for (i, v) in series.per_sprint.iter().enumerate() {
                let (x, sw) = area.slot(i, n);
                match v {
                    Some(v) => {
                        let y = area.y_of(*v, max);
                        svg.rect("unestimated-bar", x + sw * 0.25, y, sw * 0.5, area.bottom() - y, BAR_COLOR, "");
                        svg.text("value", x + sw / 2.0, y - 3.0, 10.0, "middle", &percent(*v));
                    }
                    None => svg.text("value", x + sw / 2.0, area.bottom() - 3.0, 10.0, "middle", "n/a"),
                }
            }
            let y = area.y_of(cfg.unestimated_critical, max);
            svg.line("threshold-line", area.x, y, area.x + area.w, y, "#c62828", r#" stroke-dasharray="4 3""#);
            svg.sprint_labels(area, n);
        }
        (CardPanel::IndividualDailyEffort, _) => individual_daily(svg, area, dataset),
        (CardPanel::ScrumMeetings, Some(PanelSeries::Meetings { scrum, .. })) => meeting_bars(svg, area, scrum),
        (CardPanel::PlanningMeetings, _) => {
            if let Some(PanelSeries::Meetings { planning, .. }) = series(MetricId::Meetings) {
                meeting_bars(svg, area, planning);
            }
        }
        _ => svg.no_data(area),
    }
}

/// White to dark blue for `t` in [0, 1].
fn heat_color(t: f64) -> String {
    let (r, g, b) = (255.0 - t * (255.0 - 21.0), 255.0 - t * (255.0 - 50.0), 255.0 - t * (255.0 - 110.0));
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

fn boxplots(svg: &mut Svg, area: Area, boxes: &[BoxplotStats], cap: f64) {
    if boxes.iter().all(BoxplotStats::is_empty) {
        svg.no_data(area);
        return;
    }
    let max = boxes.iter().filter(|b| !b.is_empty()).map(|b| b.max).fold(cap, f64::max) * 1.15;
    svg.axis(area);
    for (i, b) in boxes.iter().enumerate() {
        let (x, sw) = area.slot(i, boxes.len());
        let centre = x + sw / 2.0;
        if b.is_empty() {
            svg.text("value", centre, area.bottom() - 3.0, 10.0, "middle", "n/a");
            continue;
        }
        let y = |v: f64| area.y_of(v, max);
        let half = sw * 0.2;
        svg.line("whisker", centre, y(b.whisker_low), centre, y(b.q1), "#333", "");
        svg.line("whisker", centre, y(b.q3), centre, y(b.whisker_high), "#333", "");
        svg.rect(
            "box",
            centre - half,
            y(b.q3),
            2.0 * half,
            y(b.q1) - y(b.q3),
            "#dfe6f3",
            &format!(
                r##" stroke="#333" data-sprint="{}" data-q1="{}" data-median="{}" data-q3="{}""##,
                i + 1,
                b.q1,
                b.median,
                b.q3
            ),
        );
        svg.line("median", centre - half, y(b.median), centre + half, y(b.median), "#333", r#" stroke-width="2""#);
        for o in &b.outliers {
            let _ = writeln!(
                svg.out,
                r##"<circle class="outlier" cx="{centre:.2}" cy="{:.2}" r="2.5" fill="none" stroke="#333"/>"##,
                y(*o)
            );
        }
    }
    let y = area.y_of(cap, max);
    svg.line(
        "cap-line",
        area.x,
        y,
        area.x + area.w,
        y,
        "#c62828",
        &format!(r#" stroke-dasharray="5 3" data-hours="{cap}""#),
    );
    svg.text("cap-label", area.x + area.w, y - 3.0, 10.0, "end", &hours(cap));
    svg.sprint_labels(area, boxes.len());
}

fn meeting_bars(svg: &mut Svg, area: Area, stats: &MeetingStats) {
    if stats.total_count() == 0 {
        svg.no_data(area);
        return;
    }
    let max = stats.per_sprint.iter().filter_map(|s| s.mean_duration_minutes).fold(0.0, f64::max) * 1.3;
    svg.axis(area);
    let n = stats.per_sprint.len();
    for (i, s) in stats.per_sprint.iter().enumerate() {
        let (x, sw) = area.slot(i, n);
        let Some(mean) = s.mean_duration_minutes else {
            svg.text("value", x + sw / 2.0, area.bottom() - 3.0, 10.0, "middle", "none");
            continue;
        };
        let y = area.y_of(mean, max);
        let fill = if s.full_attendance { BAR_COLOR } else { "#e0a040" };
        svg.rect(
            "meeting-bar",
            x + sw * 0.25,
            y,
            sw * 0.5,
            area.bottom() - y,
            fill,
            &format!(r#" data-count="{}" data-absences="{}""#, s.count, s.total_absences),
        );
        let people = s.mean_participants.unwrap_or(0.0);
        svg.text(
            "value",
            x + sw / 2.0,
            y - 3.0,
            10.0,
            "middle",
            &format!("{}× {mean:.1} min, {people:.1} people", s.count),
        );
    }
    svg.sprint_labels(area, n);
}

fn individual_daily(svg: &mut Svg, area: Area, dataset: &CohortDataset) {
    let cfg: &ProjectConfig = &dataset.config;
    let series: Vec<Vec<f64>> = dataset
        .members
        .iter()
        .filter_map(|m| metrics::member_daily_effort(dataset, &m.id).ok())
        .map(|sprints| sprints.into_iter().flat_map(|s| s.hours_by_day).collect())
        .collect();
    if series.iter().flatten().all(|v| *v == 0.0) {
        svg.no_data(area);
        return;
    }
    let days = (cfg.sprint_count * cfg.sprint_length_days) as usize;
    let row_h = area.h / series.len().max(1) as f64;
    for (r, (member, row)) in dataset.members.iter().zip(&series).enumerate() {
        let y = area.y + r as f64 * row_h;
        svg.text("tick", area.x - 4.0, y + row_h / 2.0 + 4.0, 10.0, "end", member.id.as_str());
        for (d, v) in row.iter().enumerate() {
            if *v <= 0.0 {
                continue;
            }
            let (x, cw) = area.slot(d, days);
            let outlier = *v > cfg.daily_outlier_hours;
            let extra = if outlier {
                format!(r##" stroke="#c62828" stroke-width="1.5" data-hours="{v}""##)
            } else {
                format!(r#" data-hours="{v}""#)
            };
            let class = if outlier { "daily-cell daily-outlier" } else { "daily-cell" };
            svg.rect(
                class,
                x,
                y + 1.0,
                cw,
                row_h - 2.0,
                &heat_color((v / cfg.daily_outlier_hours).clamp(0.0, 1.0)),
                &extra,
            );
        }
    }
    for s in 1..cfg.sprint_count {
        let (x, _) = area.slot((s * cfg.sprint_length_days) as usize, days);
        svg.line("sprint-separator", x, area.y, x, area.bottom(), "#bbb", "");
    }
    svg.sprint_labels(area, cfg.sprint_count as usize);
}

fn fmt_opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| "n/a".to_owned(), f)
}

fn panel_values(panel: &MetricPanel) -> (String, Vec<String>) {
    match &panel.series {
        PanelSeries::Budget { effort, .. } => (
            format!("{} mean", fmt_opt(effort.overall, hours)),
            effort.per_sprint.iter().map(|v| fmt_opt(*v, hours)).collect(),
        ),
        PanelSeries::Balance { gini, .. } => {
            (percent(*gini), panel.trend_values.iter().map(|v| fmt_opt(*v, percent)).collect())
        }
        PanelSeries::DailyTrend { sprints } => {
            let max = sprints.iter().map(|s| s.trend_r).fold(f64::NEG_INFINITY, f64::max);
            (
                format!("max r {}", if sprints.is_empty() { "n/a".to_owned() } else { format!("{max:.2}") }),
                sprints.iter().map(|s| format!("{:.2}", s.trend_r)).collect(),
            )
        }
        PanelSeries::TaskSize { estimated, estimated_overall, .. } => (
            format!(
                "estimated q3 {}",
                if estimated_overall.is_empty() { "n/a".to_owned() } else { hours(estimated_overall.q3) }
            ),
            estimated.iter().map(|b| if b.is_empty() { "n/a".to_owned() } else { hours(b.q3) }).collect(),
        ),
        PanelSeries::Mraee { series } | PanelSeries::Unestimated { series, .. } => {
            (fmt_opt(series.overall, percent), series.per_sprint.iter().map(|v| fmt_opt(*v, percent)).collect())
        }
        PanelSeries::Meetings { scrum, planning } => (
            format!(
                "{} scrum, {} planning, {} absences",
                scrum.total_count(),
                planning.total_count(),
                scrum.total_absences() + planning.total_absences()
            ),
            scrum
                .per_sprint
                .iter()
                .zip(&planning.per_sprint)
                .map(|(s, p)| format!("{}+{}", s.count, p.count))
                .collect(),
        ),
    }
}

/// Plain-text summary: one line per panel and per member, then two closing lines.
pub fn render_summary(assessment: &TeamAssessment) -> String {
    let mut out = String::new();
    for panel in &assessment.panels {
        let (overall, per_sprint) = panel_values(panel);
        let _ = writeln!(
            out,
            "{}: {overall} | sprints {} | {} — {}",
            panel.metric_id,
            per_sprint.join(" "),
            panel.improvement.as_str(),
            panel.rating.level
        );
    }
    for m in &assessment.members {
        let flags: Vec<&str> = m.flags.iter().map(|f| f.as_str()).collect();
        let _ = writeln!(
            out,
            "member {}: score {:.3}, flags {}",
            m.member_id,
            m.score,
            if flags.is_empty() { "none".to_owned() } else { flags.join(",") }
        );
    }
    let (satisfied, applicable) = assessment.doneness.flag_counts();
    let failing: Vec<String> = assessment
        .doneness
        .per_sprint
        .iter()
        .flat_map(|s| {
            [
                (!s.testing_ok).then(|| format!("S{} testing", s.sprint)),
                (!s.demo_ok).then(|| format!("S{} demo", s.sprint)),
                (!s.td_ok).then(|| format!("S{} technical debt", s.sprint)),
                (s.release_ok == Some(false)).then(|| format!("S{} release", s.sprint)),
            ]
        })
        .flatten()
        .collect();
    let _ = writeln!(
        out,
        "doneness: {} ({satisfied}/{applicable} checks{})",
        if assessment.doneness.overall_ok { "ok" } else { "not ok" },
        if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(", ")) }
    );
    let quality = assessment.sub_scores.quality.map_or_else(|| "n/a".to_owned(), |q| format!("{q:.4}"));
    let _ = writeln!(
        out,
        "team score {:.4} (coordination {:.4}, quality {quality}, doneness {:.4}), final grade {:.4}",
        assessment.team_score,
        assessment.sub_scores.coordination,
        assessment.sub_scores.doneness,
        assessment.final_grade
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_metric_has_one_panel() {
        for m in MetricId::ALL {
            let panels: Vec<_> = CardPanel::GRID.into_iter().filter(|p| p.metric() == Some(m)).collect();
            assert_eq!(panels.len(), 1, "{m}");
            assert_eq!(CardPanel::for_metric(m), panels[0]);
        }
    }

    #[test]
    fn escaping() {
        assert_eq!(escape(r#"a<b & "c">'"#), "a&lt;b &amp; &quot;c&quot;&gt;&apos;");
    }

    #[test]
    fn heat_scale_ends() {
        assert_eq!(heat_color(0.0), "#ffffff");
        assert_eq!(heat_color(1.0), "#15326e");
    }

    #[test]
    fn badge_colors_follow_rating_bands() {
        assert_eq!(badge_color(RatingLevel::Excellent), badge_color(RatingLevel::Good));
        assert_eq!(badge_color(RatingLevel::Acceptable), badge_color(RatingLevel::Warning));
        assert_ne!(badge_color(RatingLevel::Critical), badge_color(RatingLevel::Warning));
    }
}
