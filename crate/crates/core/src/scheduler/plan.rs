use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::ScheduledStep;
use crate::canonical;
use crate::groundlink::PassPrediction;
use crate::placement::PlacementDecision;
use crate::timeline::OrbitalWindow;
use crate::transfer::{Direction, TransferSpec};

pub const SCHEMA_VERSION: &str = "1.0";

const BASE_CONFIDENCE: f64 = 0.99;
const DEGRADE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteInfo {
    pub catalog_number: u32,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

/// A pass without its elevation samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassSummary {
    pub id: usize,
    pub station_id: String,
    pub aos: DateTime<Utc>,
    pub los: DateTime<Utc>,
    pub peak_elevation: f64,
    pub mean_data_rate: f64,
    pub ber: Option<f64>,
    pub capacity: f64,
}

impl From<&PassPrediction> for PassSummary {
    fn from(p: &PassPrediction) -> Self {
        Self {
            id: p.id,
            station_id: p.station_id.clone(),
            aos: p.aos,
            los: p.los,
            peak_elevation: p.peak_elevation,
            mean_data_rate: p.mean_data_rate(),
            ber: p.link.map(|l| l.ber),
            capacity: p.capacity(),
        }
    }
}

/// Volumes in MB, makespan in seconds.
///
/// `payload_*` sums the raw outputs crossing the boundary. `channel_*` sums the
/// coded, secured volume on the link. `planned_*` adds the retransmission
/// reserve on top of `channel_*`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanMetrics {
    pub payload_downlink: f64,
    pub payload_uplink: f64,
    pub channel_downlink: f64,
    pub channel_uplink: f64,
    pub planned_downlink: f64,
    pub planned_uplink: f64,
    pub step_count: usize,
    pub makespan: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionPlan {
    pub schema_version: String,
    pub satellite: SatelliteInfo,
    pub generated_at: DateTime<Utc>,
    pub horizon: Horizon,
    pub passes: Vec<PassSummary>,
    pub timeline: Vec<OrbitalWindow>,
    pub decisions: Vec<PlacementDecision>,
    pub transfers: Vec<TransferSpec>,
    pub schedule: Vec<ScheduledStep>,
    pub metrics: PlanMetrics,
    pub confidence: f64,
    pub determinism_hash: String,
}

impl ExecutionPlan {
    /// Canonical JSON of the whole plan, hash included.
    pub fn canonical_json(&self) -> String {
        canonical::to_canonical_string(self)
    }

    /// SHA-256 over the canonical JSON with the hash field removed.
    pub fn compute_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("plan serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("determinism_hash");
        }
        canonical::sha256_hex(&canonical::write_value(&v))
    }
}

fn metrics(transfers: &[TransferSpec], schedule: &[ScheduledStep]) -> PlanMetrics {
    let mut m = PlanMetrics {
        step_count: schedule.len(),
        ..PlanMetrics::default()
    };
    for t in transfers {
        let (payload, channel, planned) = match t.direction {
            Direction::Downlink => (
                &mut m.payload_downlink,
                &mut m.channel_downlink,
                &mut m.planned_downlink,
            ),
            Direction::Uplink => (
                &mut m.payload_uplink,
                &mut m.channel_uplink,
                &mut m.planned_uplink,
            ),
        };
        *payload += t.raw;
        *channel += t.total;
        *planned += t.planned;
    }
    let first = schedule.iter().map(|s| s.t_start).min();
    let last = schedule.iter().map(|s| s.t_end).max();
    if let (Some(a), Some(b)) = (first, last) {
        m.makespan = (b - a).num_milliseconds() as f64 / 1000.0;
    }
    m
}

/// 0.99 for a clean plan, times 0.9 for each transfer left with a shortfall
/// and each step pushed to a later comms window by contention. A heuristic
/// score, not a probability. A plan with nothing to schedule scores 1.
pub fn confidence(transfers: &[TransferSpec], schedule: &[ScheduledStep]) -> f64 {
    if schedule.is_empty() {
        return 1.0;
    }
    let degraded = transfers.iter().filter(|t| t.shortfall > 0.0).count()
        + schedule.iter().filter(|s| s.retry_window).count();
    BASE_CONFIDENCE * DEGRADE.powi(degraded as i32)
}

#[allow(clippy::too_many_arguments)]
pub fn assemble_plan(
    satellite: SatelliteInfo,
    horizon: Horizon,
    passes: &[PassPrediction],
    timeline: Vec<OrbitalWindow>,
    decisions: Vec<PlacementDecision>,
    transfers: Vec<TransferSpec>,
    schedule: Vec<ScheduledStep>,
) -> ExecutionPlan {
    let mut plan = ExecutionPlan {
        schema_version: SCHEMA_VERSION.to_string(),
        satellite,
        generated_at: horizon.start,
        horizon,
        passes: passes.iter().map(PassSummary::from).collect(),
        timeline,
        decisions,
        metrics: metrics(&transfers, &schedule),
        confidence: confidence(&transfers, &schedule),
        transfers,
        schedule,
        determinism_hash: String::new(),
    };
    plan.determinism_hash = plan.compute_hash();
    plan
}
