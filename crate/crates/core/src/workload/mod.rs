//! Workload DAGs: annotated processing steps joined by data dependencies.

mod presets;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use presets::{load_preset, preset_names, preset_summary, PRESET_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Onboard,
    Ground,
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryPolicy {
    #[default]
    None,
    RetrySameWindow,
    RetryNextWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encryption {
    #[default]
    None,
    Aes128,
    Aes256,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrity {
    #[default]
    None,
    Crc32,
    Sha256,
}

/// One vertex of the workload graph. Resource figures: watts, normalized
/// compute, watts of dissipation, MB, seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessingStep {
    pub id: String,
    #[serde(default)]
    pub power: f64,
    #[serde(default)]
    pub compute: f64,
    #[serde(default)]
    pub thermal: f64,
    #[serde(default)]
    pub memory: f64,
    #[serde(default)]
    pub storage: f64,
    pub duration: f64,
    #[serde(default)]
    pub data_in: f64,
    #[serde(default)]
    pub data_out: f64,
    pub location: Location,
    #[serde(default)]
    pub needs_comms: bool,
    #[serde(default)]
    pub retry_policy: RetryPolicy,
    #[serde(default)]
    pub max_retries: u32,
    #[serde(default)]
    pub checkpoint_interval: Option<f64>,
    #[serde(default)]
    pub encryption: Encryption,
    #[serde(default)]
    pub integrity: Integrity,
    /// Output already carries channel coding and encryption; transfer sizing
    /// must not add them again.
    #[serde(default)]
    pub channel_ready: bool,
    /// Output is a deliverable for the ground even though no ground step
    /// consumes it.
    #[serde(default)]
    pub deliver_to_ground: bool,
}

impl ProcessingStep {
    pub fn new(id: &str, location: Location, duration: f64) -> Self {
        Self {
            id: id.to_string(),
            power: 0.0,
            compute: 0.0,
            thermal: 0.0,
            memory: 0.0,
            storage: 0.0,
            duration,
            data_in: 0.0,
            data_out: 0.0,
            location,
            needs_comms: false,
            retry_policy: RetryPolicy::None,
            max_retries: 0,
            checkpoint_interval: None,
            encryption: Encryption::None,
            integrity: Integrity::None,
            channel_ready: false,
            deliver_to_ground: false,
        }
    }

    fn check(&self) -> Result<(), WorkloadError> {
        let bad = |reason: &str| WorkloadError::InvalidStep {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(bad("duration must be positive"));
        }
        let fields = [
            self.power,
            self.compute,
            self.thermal,
            self.memory,
            self.storage,
            self.data_in,
            self.data_out,
        ];
        if fields.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(bad(
                "resource and data fields must be finite and non-negative",
            ));
        }
        if self.compute > 1.0 {
            return Err(bad("compute must lie in [0, 1]"));
        }
        if self.id.is_empty() {
            return Err(bad("empty id"));
        }
        Ok(())
    }
}

fn default_deadline() -> f64 {
    8.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub name: String,
    pub steps: Vec<ProcessingStep>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    /// deadline in orbital periods
    #[serde(default = "default_deadline")]
    pub deadline_orbits: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkloadError {
    #[error("duplicate step id `{0}`")]
    DuplicateId(String),
    #[error("edge {from} -> {to} references unknown step `{missing}`")]
    DanglingEdge {
        from: String,
        to: String,
        missing: String,
    },
    #[error("dependency cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("step `{id}`: {reason}")]
    InvalidStep { id: String, reason: String },
    #[error("deadline must be a positive number of orbits")]
    InvalidDeadline,
}

impl WorkloadError {
    pub fn code(&self) -> &'static str {
        match self {
            WorkloadError::DuplicateId(_) => "WORKLOAD_DUPLICATE_ID",
            WorkloadError::DanglingEdge { .. } => "WORKLOAD_DANGLING_EDGE",
            WorkloadError::Cycle(_) => "WORKLOAD_CYCLE",
            WorkloadError::UnknownPreset(_) => "UNKNOWN_PRESET",
            WorkloadError::InvalidStep { .. } => "WORKLOAD_INVALID_STEP",
            WorkloadError::InvalidDeadline => "WORKLOAD_INVALID_DEADLINE",
        }
    }
}

impl Workload {
    pub fn step(&self, id: &str) -> Option<&ProcessingStep> {
        self.steps.iter().find(|s| s.id == id)
    }

    pub fn step_map(&self) -> HashMap<&str, &ProcessingStep> {
        self.steps.iter().map(|s| (s.id.as_str(), s)).collect()
    }

    /// Direct predecessors of each step.
    pub fn predecessors(&self) -> HashMap<&str, Vec<&str>> {
        let mut preds: HashMap<&str, Vec<&str>> = self
            .steps
            .iter()
            .map(|s| (s.id.as_str(), Vec::new()))
            .collect();
        for (u, v) in &self.edges {
            preds.entry(v.as_str()).or_default().push(u.as_str());
        }
        preds
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        if !(self.deadline_orbits > 0.0) {
            return Err(WorkloadError::InvalidDeadline);
        }
        let mut seen = BTreeSet::new();
        for s in &self.steps {
            if !seen.insert(s.id.as_str()) {
                return Err(WorkloadError::DuplicateId(s.id.clone()));
            }
            s.check()?;
        }
        for (u, v) in &self.edges {
            for end in [u, v] {
                if !seen.contains(end.as_str()) {
                    return Err(WorkloadError::DanglingEdge {
                        from: u.clone(),
                        to: v.clone(),
                        missing: end.clone(),
                    });
                }
            }
        }
        topo_order(self).map(|_| ())
    }
}

/// Kahn's algorithm; among ready steps the lexicographically smallest id goes
/// first.
pub fn topo_sort(w: &Workload) -> Result<Vec<String>, WorkloadError> {
    w.validate()?;
    topo_order(w)
}

fn topo_order(w: &Workload) -> Result<Vec<String>, WorkloadError> {
    let mut indegree: BTreeMap<&str, usize> = w.steps.iter().map(|s| (s.id.as_str(), 0)).collect();
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (u, v) in &w.edges {
        *indegree
            .get_mut(v.as_str())
            .expect("edge integrity checked") += 1;
        succ.entry(u.as_str()).or_default().push(v.as_str());
    }
    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();
    let mut order = Vec::with_capacity(w.steps.len());
    while let Some(id) = ready.pop_first() {
        order.push(id.to_string());
        for &v in succ.get(id).map(Vec::as_slice).unwrap_or_default() {
            let d = indegree.get_mut(v).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.insert(v);
            }
        }
    }
    if order.len() == w.steps.len() {
        return Ok(order);
    }
    let remaining: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, &d)| d > 0)
        .map(|(&id, _)| id)
        .collect();
    Err(WorkloadError::Cycle(find_cycle(&remaining, &succ)))
}

/// Every unresolved node keeps an unresolved predecessor, so walking
/// predecessor links must revisit a node. The loop found that way is reported
/// in forward edge order, rotated to begin at its smallest id.
fn find_cycle(remaining: &BTreeSet<&str>, succ: &BTreeMap<&str, Vec<&str>>) -> Vec<String> {
    let mut preds: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (&u, vs) in succ {
        for &v in vs {
            if remaining.contains(u) && remaining.contains(v) {
                preds.entry(v).or_default().insert(u);
            }
        }
    }
    let Some(&first) = remaining.iter().next() else {
        return Vec::new();
    };
    let mut path: Vec<&str> = Vec::new();
    let mut pos: HashMap<&str, usize> = HashMap::new();
    let mut cur = first;
    let mut cycle = loop {
        if let Some(&i) = pos.get(cur) {
            break path[i..].to_vec();
        }
        pos.insert(cur, path.len());
        path.push(cur);
        match preds.get(cur).and_then(|p| p.iter().next()) {
            Some(&p) => cur = p,
            None => break path.clone(),
        }
    };
    cycle.reverse();
    if let Some(min_at) = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, id)| **id)
        .map(|(i, _)| i)
    {
        cycle.rotate_left(min_at);
    }
    cycle.into_iter().map(str::to_string).collect()
}
