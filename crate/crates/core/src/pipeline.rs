//! End-to-end planning: orbital environment, placement, transfers, schedule.

use std::time::{Duration as WallTime, Instant};

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::groundlink::{
    annotate_link_budget, default_stations, detect_passes, GroundStation, LinkParams,
    PassPrediction,
};
use crate::orbitcore::Tle;
use crate::placement::{place, PlacementConfig};
use crate::propagator::{propagate_trajectory, PropagationConfig, Trajectory};
use crate::scheduler::{assemble_plan, schedule, ExecutionPlan, Horizon, SatelliteInfo};
use crate::skymodel::{eclipse_windows, IlluminationWindow};
use crate::timeline::{build_timeline, EnvelopeConfig, OrbitalWindow};
use crate::transfer::{insert_transfers, TransferConfig};
use crate::workload::Workload;
use crate::PlanError;

pub const MIN_HORIZON_HOURS: u32 = 1;
pub const MAX_HORIZON_HOURS: u32 = 168;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub envelope: EnvelopeConfig,
    pub placement: PlacementConfig,
    pub link: LinkParams,
    pub transfer: TransferConfig,
    pub stations: Vec<GroundStation>,
    /// propagation step, seconds
    pub step: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            envelope: EnvelopeConfig::default(),
            placement: PlacementConfig::default(),
            link: LinkParams::default(),
            transfer: TransferConfig::default(),
            stations: default_stations(),
            step: 30,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        self.envelope.validate()?;
        self.link.validate().map_err(PlanError::Config)?;
        for s in &self.stations {
            s.validate().map_err(PlanError::Config)?;
        }
        if !(self.transfer.assumed_mean_rate > 0.0) || !(self.transfer.min_duration >= 0.0) {
            return Err(PlanError::Config(
                "transfer rate must be positive and minimum duration non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Orbital environment over the horizon.
#[derive(Debug, Clone)]
pub struct Environment {
    pub trajectory: Trajectory,
    pub illumination: Vec<IlluminationWindow>,
    /// sorted by AOS then station, ids are positions in this list
    pub passes: Vec<PassPrediction>,
    pub timeline: Vec<OrbitalWindow>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    pub environment: WallTime,
    /// placement, transfer insertion, scheduling and assembly
    pub planning: WallTime,
}

pub fn horizon_seconds(hours: u32) -> Result<u32, PlanError> {
    if !(MIN_HORIZON_HOURS..=MAX_HORIZON_HOURS).contains(&hours) {
        return Err(PlanError::Config(format!(
            "horizon must be between {MIN_HORIZON_HOURS} and {MAX_HORIZON_HOURS} hours, got {hours}"
        )));
    }
    Ok(hours * 3600)
}

pub fn predict_passes(
    traj: &Trajectory,
    stations: &[GroundStation],
    link: &LinkParams,
) -> Vec<PassPrediction> {
    let mut passes: Vec<PassPrediction> = stations
        .iter()
        .flat_map(|s| detect_passes(traj, s))
        .map(|p| annotate_link_budget(p, link))
        .collect();
    passes.sort_by(|a, b| (a.aos, &a.station_id).cmp(&(b.aos, &b.station_id)));
    for (i, p) in passes.iter_mut().enumerate() {
        p.id = i;
    }
    passes
}

pub fn environment(
    tle: &Tle,
    start: DateTime<Utc>,
    horizon_hours: u32,
    cfg: &PlannerConfig,
) -> Result<Environment, PlanError> {
    cfg.validate()?;
    let prop = PropagationConfig {
        start,
        horizon: horizon_seconds(horizon_hours)?,
        step: cfg.step,
    };
    let trajectory = propagate_trajectory(tle, &prop)?;
    let illumination = eclipse_windows(&trajectory);
    let passes = predict_passes(&trajectory, &cfg.stations, &cfg.link);
    let timeline = build_timeline(&illumination, &passes, &cfg.envelope)?;
    Ok(Environment {
        trajectory,
        illumination,
        passes,
        timeline,
    })
}

/// Placement, transfer insertion and scheduling on a prepared environment.
pub fn plan_in(
    tle: &Tle,
    env: &Environment,
    workload: &Workload,
    cfg: &PlannerConfig,
) -> Result<ExecutionPlan, PlanError> {
    let decisions = place(workload, cfg.envelope.thermal_limit, &cfg.placement)?;
    let (expanded, transfers) = insert_transfers(workload, &decisions, &env.passes, &cfg.transfer)?;
    let steps = schedule(&expanded, &env.timeline, env.trajectory.orbital_period)?;
    let horizon = Horizon {
        start: env.trajectory.start(),
        end: env.trajectory.end(),
    };
    let satellite = SatelliteInfo {
        catalog_number: tle.catalog_number,
        name: tle.name.clone(),
    };
    Ok(assemble_plan(
        satellite,
        horizon,
        &env.passes,
        env.timeline.clone(),
        decisions,
        transfers,
        steps,
    ))
}

pub fn plan_timed(
    tle: &Tle,
    workload: &Workload,
    start: DateTime<Utc>,
    horizon_hours: u32,
    cfg: &PlannerConfig,
) -> Result<(ExecutionPlan, PhaseTimings), PlanError> {
    workload.validate()?;
    let t = Instant::now();
    let env = environment(tle, start, horizon_hours, cfg)?;
    let environment_time = t.elapsed();
    let t = Instant::now();
    let plan = plan_in(tle, &env, workload, cfg)?;
    Ok((
        plan,
        PhaseTimings {
            environment: environment_time,
            planning: t.elapsed(),
        },
    ))
}

pub fn plan(
    tle: &Tle,
    workload: &Workload,
    start: DateTime<Utc>,
    horizon_hours: u32,
    cfg: &PlannerConfig,
) -> Result<ExecutionPlan, PlanError> {
    plan_timed(tle, workload, start, horizon_hours, cfg).map(|(p, _)| p)
}

/// Truncates to the whole minute.
pub fn quantize_to_minute(t: DateTime<Utc>) -> DateTime<Utc> {
    let ms = t.timestamp_millis();
    t - Duration::milliseconds(ms.rem_euclid(60_000))
}
