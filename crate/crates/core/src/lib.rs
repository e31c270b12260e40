//! Scrum-process compliance assessment for student and professional teams.
//!
//! Feed a team's exported sprint-tracking record ([`domain::CohortDataset`])
//! through [`compliance::assess`] to get a [`compliance::TeamAssessment`]:
//! seven rated coordination panels, a Definition-of-Done report, individual
//! checks and the weighted grade. [`render`] draws the assessment card and
//! [`synth`] generates seeded datasets of compliant and pathological teams.

pub mod compliance;
pub mod domain;
pub mod ingest;
pub mod metrics;
pub mod render;
pub mod stats;
pub mod synth;

pub use compliance::{assess, RatingLevel, TeamAssessment};
pub use domain::{CohortDataset, ProjectConfig};
