//! Greedy first-fit assignment of steps to orbital windows.
//!
//! Steps are taken in topological order. Ground steps have unbounded capacity
//! and start as soon as their inputs exist. On-board and transfer steps take
//! the first window that satisfies [`feasible`] and the dependency bound.
//! Window utilisation is tracked in whole milliseconds.

mod plan;

use std::collections::HashMap;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timeline::OrbitalWindow;
use crate::workload::{topo_sort, Location, ProcessingStep, Workload, WorkloadError};

pub use plan::{
    assemble_plan, ExecutionPlan, Horizon, PassSummary, PlanMetrics, SatelliteInfo, SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("step `{step}` cannot be placed before the deadline {deadline}")]
    DeadlineExceeded {
        step: String,
        deadline: DateTime<Utc>,
    },
    #[error("no feasible window for step `{0}` within the horizon")]
    NoFeasibleWindow(String),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}

impl ScheduleError {
    pub fn code(&self) -> &'static str {
        match self {
            ScheduleError::DeadlineExceeded { .. } => "DEADLINE_EXCEEDED",
            ScheduleError::NoFeasibleWindow(_) => "NO_FEASIBLE_WINDOW",
            ScheduleError::Workload(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledStep {
    pub step_id: String,
    /// `None` for ground steps
    pub window_id: Option<usize>,
    pub t_start: DateTime<Utc>,
    pub t_end: DateTime<Utc>,
    pub location: Location,
    pub max_retries: u32,
    /// Placed after an earlier resource-compatible comms window had already
    /// been filled by other steps.
    pub retry_window: bool,
}

fn ms(seconds: f64) -> i64 {
    (seconds * 1000.0).round() as i64
}

fn window_ms(w: &OrbitalWindow) -> i64 {
    (w.t_end - w.t_start).num_milliseconds()
}

/// Resource envelope checks other than remaining time.
fn fits_envelope(step: &ProcessingStep, w: &OrbitalWindow) -> bool {
    step.power <= w.power
        && step.thermal <= w.thermal_limit
        && step.compute <= w.compute
        && (!step.needs_comms || w.comms_rate > 0.0)
}

/// Whether `step` fits in `w` with `used` seconds already allocated.
pub fn feasible(step: &ProcessingStep, w: &OrbitalWindow, used: f64) -> bool {
    fits_ms(step, w, ms(used))
}

fn fits_ms(step: &ProcessingStep, w: &OrbitalWindow, used_ms: i64) -> bool {
    ms(step.duration) <= window_ms(w) - used_ms && fits_envelope(step, w)
}

pub fn schedule(
    w: &Workload,
    timeline: &[OrbitalWindow],
    orbital_period: f64,
) -> Result<Vec<ScheduledStep>, ScheduleError> {
    let order = topo_sort(w)?;
    if order.is_empty() {
        return Ok(Vec::new());
    }
    let Some(first) = timeline.first() else {
        return Err(ScheduleError::NoFeasibleWindow(order[0].clone()));
    };
    let t0 = first.t_start;
    let deadline = t0 + Duration::milliseconds(ms(w.deadline_orbits * orbital_period));
    let steps = w.step_map();
    let preds = w.predecessors();

    let mut used = vec![0i64; timeline.len()];
    let mut ends: HashMap<&str, DateTime<Utc>> = HashMap::new();
    let mut out = Vec::with_capacity(order.len());

    for id in &order {
        let step = steps[id.as_str()];
        let d = Duration::milliseconds(ms(step.duration));
        let dep_end = preds[id.as_str()].iter().map(|p| ends[p]).max();

        if step.location == Location::Ground {
            let t_start = dep_end.map_or(t0, |e| e.max(t0));
            ends.insert(id, t_start + d);
            out.push(ScheduledStep {
                step_id: id.clone(),
                window_id: None,
                t_start,
                t_end: t_start + d,
                location: Location::Ground,
                max_retries: step.max_retries,
                retry_window: false,
            });
            continue;
        }

        let earliest = dep_end.unwrap_or(t0);
        let mut contended = false;
        let mut placed = None;
        for (i, win) in timeline.iter().enumerate() {
            if win.t_end < earliest {
                continue;
            }
            if win.t_start > deadline {
                return Err(ScheduleError::DeadlineExceeded {
                    step: id.clone(),
                    deadline,
                });
            }
            if !fits_ms(step, win, used[i]) {
                if step.needs_comms
                    && used[i] > 0
                    && fits_envelope(step, win)
                    && d.num_milliseconds() <= window_ms(win)
                {
                    contended = true;
                }
                continue;
            }
            let t_start = (win.t_start + Duration::milliseconds(used[i])).max(earliest);
            if t_start + d > win.t_end {
                continue;
            }
            used[i] += d.num_milliseconds();
            placed = Some((i, t_start));
            break;
        }
        let Some((i, t_start)) = placed else {
            return Err(ScheduleError::NoFeasibleWindow(id.clone()));
        };
        ends.insert(id, t_start + d);
        out.push(ScheduledStep {
            step_id: id.clone(),
            window_id: Some(timeline[i].id),
            t_start,
            t_end: t_start + d,
            location: Location::Onboard,
            max_retries: step.max_retries,
            retry_window: contended,
        });
    }
    Ok(out)
}
