//! Transfer insertion at space-ground boundaries.
//!
//! Volume layers for one transfer (all MB):
//!
//! ```text
//! raw ──FEC──▶ raw + parity ──security + framing──▶ total ──reserve──▶ planned
//! ```
//!
//! `parity = raw·(1/r − 1)`, `total = (raw + parity)·(1 + η_enc + η_int + η_frame)`
//! and `planned = total·(1 + reserve)`. Outputs flagged `channel_ready` are
//! already coded and encrypted, so for them `total = raw`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groundlink::{PassPrediction, BER_LOW};
use crate::placement::PlacementDecision;
use crate::workload::{Encryption, Integrity, Location, ProcessingStep, RetryPolicy, Workload};

pub const FRAMING_OVERHEAD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("edge {from} -> {to} crosses the space-ground boundary but no passes are available")]
    NoCapacity { from: String, to: String },
    #[error("no placement decision for step `{0}`")]
    MissingDecision(String),
}

impl TransferError {
    pub fn code(&self) -> &'static str {
        match self {
            TransferError::NoCapacity { .. } => "NO_PASS_CAPACITY",
            TransferError::MissingDecision(_) => "MISSING_DECISION",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Downlink,
    Uplink,
}

impl Direction {
    /// Usable share of a pass's capacity: protocol overhead on the downlink,
    /// half-duplex sharing on the uplink.
    pub fn capacity_factor(self) -> f64 {
        match self {
            Direction::Downlink => 0.9,
            Direction::Uplink => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FecRate {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "3/4")]
    ThreeQuarters,
    #[serde(rename = "7/8")]
    SevenEighths,
}

impl FecRate {
    pub fn value(self) -> f64 {
        match self {
            FecRate::Half => 0.5,
            FecRate::ThreeQuarters => 0.75,
            FecRate::SevenEighths => 0.875,
        }
    }
}

pub fn select_fec(worst_ber: f64) -> FecRate {
    if worst_ber > 1e-5 {
        FecRate::Half
    } else if worst_ber > 1e-7 {
        FecRate::ThreeQuarters
    } else {
        FecRate::SevenEighths
    }
}

pub fn retransmission_reserve(worst_ber: f64) -> f64 {
    if worst_ber > 1e-5 {
        0.20
    } else if worst_ber > 1e-7 {
        0.05
    } else {
        0.01
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityOverheads {
    pub encryption: f64,
    pub integrity: f64,
    pub framing: f64,
}

impl SecurityOverheads {
    pub fn sum(&self) -> f64 {
        self.encryption + self.integrity + self.framing
    }
}

pub fn security_overheads(step: &ProcessingStep) -> SecurityOverheads {
    let encryption = match step.encryption {
        Encryption::Aes256 => 0.05,
        Encryption::Aes128 => 0.03,
        Encryption::None => 0.0,
    };
    // 32-byte digest or 4-byte CRC per 4 KB block
    let integrity = match step.integrity {
        Integrity::Sha256 => 0.008,
        Integrity::Crc32 => 0.001,
        Integrity::None => 0.0,
    };
    SecurityOverheads {
        encryption,
        integrity,
        framing: FRAMING_OVERHEAD,
    }
}

pub fn parity_volume(raw: f64, fec: FecRate) -> f64 {
    raw * (1.0 / fec.value() - 1.0)
}

pub fn total_volume(raw: f64, fec: FecRate, overheads: &SecurityOverheads) -> f64 {
    (raw + parity_volume(raw, fec)) * (1.0 + overheads.sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub pass_id: usize,
    /// MB
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub allocations: Vec<Allocation>,
    pub shortfall: f64,
}

/// Greedy chronological fill of passes (sorted by AOS) at their effective
/// capacity. Passes that would receive nothing are not listed.
pub fn allocate_passes(
    volume: f64,
    passes: &[PassPrediction],
    direction: Direction,
) -> AllocationResult {
    let kappa = direction.capacity_factor();
    let mut remaining = volume;
    let mut allocations = Vec::new();
    for p in passes {
        if remaining <= 0.0 {
            break;
        }
        let effective = p.capacity() * kappa;
        let xfer = remaining.min(effective);
        if xfer > 0.0 {
            allocations.push(Allocation {
                pass_id: p.id,
                volume: xfer,
            });
            remaining -= xfer;
        }
    }
    AllocationResult {
        allocations,
        shortfall: remaining.max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransferConfig {
    /// Mbps used to turn a planned volume into a step duration
    pub assumed_mean_rate: f64,
    /// seconds
    pub min_duration: f64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            assumed_mean_rate: 80.0,
            min_duration: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSpec {
    pub id: String,
    pub direction: Direction,
    pub from_step: String,
    /// `None` for a deliverable with no ground consumer
    pub to_step: Option<String>,
    pub worst_ber: f64,
    pub raw: f64,
    /// `None` when the producer's output is already channel coded
    pub fec_rate: Option<FecRate>,
    pub parity: f64,
    pub enc_overhead: f64,
    pub integrity_overhead: f64,
    pub framing_overhead: f64,
    pub total: f64,
    pub reserve_fraction: f64,
    /// total·(1 + reserve)
    pub planned: f64,
    pub allocations: Vec<Allocation>,
    pub shortfall: f64,
    pub step: ProcessingStep,
}

fn transfer_step(id: &str, raw: f64, planned: f64, cfg: &TransferConfig) -> ProcessingStep {
    let secs = (planned / (cfg.assumed_mean_rate / 8.0)).max(cfg.min_duration);
    ProcessingStep {
        power: 40.0,
        compute: 0.1,
        thermal: 15.0,
        memory: 128.0,
        data_in: raw,
        data_out: raw,
        needs_comms: true,
        retry_policy: RetryPolicy::RetryNextWindow,
        max_retries: 3,
        // whole milliseconds keep the schedule arithmetic exact
        ..ProcessingStep::new(id, Location::Onboard, (secs * 1000.0).ceil() / 1000.0)
    }
}

#[allow(clippy::too_many_arguments)]
fn size_transfer(
    id: String,
    direction: Direction,
    producer: &ProcessingStep,
    to_step: Option<String>,
    worst_ber: f64,
    passes: &[PassPrediction],
    cfg: &TransferConfig,
) -> TransferSpec {
    let raw = producer.data_out;
    let reserve = retransmission_reserve(worst_ber);
    let (fec_rate, parity, oh, total) = if producer.channel_ready {
        let none = SecurityOverheads {
            encryption: 0.0,
            integrity: 0.0,
            framing: 0.0,
        };
        (None, 0.0, none, raw)
    } else {
        let fec = select_fec(worst_ber);
        let oh = security_overheads(producer);
        (
            Some(fec),
            parity_volume(raw, fec),
            oh,
            total_volume(raw, fec, &oh),
        )
    };
    let planned = total * (1.0 + reserve);
    let alloc = allocate_passes(planned, passes, direction);
    TransferSpec {
        step: transfer_step(&id, raw, planned, cfg),
        id,
        direction,
        from_step: producer.id.clone(),
        to_step,
        worst_ber,
        raw,
        fec_rate,
        parity,
        enc_overhead: oh.encryption,
        integrity_overhead: oh.integrity,
        framing_overhead: oh.framing,
        total,
        reserve_fraction: reserve,
        planned,
        allocations: alloc.allocations,
        shortfall: alloc.shortfall,
    }
}

/// Rewrites the workload with every step pinned to its decided location and a
/// transfer step spliced into each boundary-crossing edge. On-board outputs
/// marked `deliver_to_ground` get a trailing downlink.
pub fn insert_transfers(
    w: &Workload,
    decisions: &[PlacementDecision],
    passes: &[PassPrediction],
    cfg: &TransferConfig,
) -> Result<(Workload, Vec<TransferSpec>), TransferError> {
    let placed: HashMap<&str, Location> = decisions
        .iter()
        .map(|d| (d.step_id.as_str(), d.location))
        .collect();
    let loc = |id: &str| {
        placed
            .get(id)
            .copied()
            .ok_or_else(|| TransferError::MissingDecision(id.to_string()))
    };

    let mut steps = Vec::with_capacity(w.steps.len());
    for s in &w.steps {
        steps.push(ProcessingStep {
            location: loc(&s.id)?,
            ..s.clone()
        });
    }
    let worst_ber = passes
        .iter()
        .map(|p| p.link.map_or(BER_LOW, |l| l.ber))
        .fold(f64::NEG_INFINITY, f64::max);
    let by_id = w.step_map();

    let mut edges = Vec::with_capacity(w.edges.len());
    let mut transfers = Vec::new();
    for (u, v) in &w.edges {
        let (lu, lv) = (loc(u)?, loc(v)?);
        if lu == lv {
            edges.push((u.clone(), v.clone()));
            continue;
        }
        if passes.is_empty() {
            return Err(TransferError::NoCapacity {
                from: u.clone(),
                to: v.clone(),
            });
        }
        let direction = if lu == Location::Onboard {
            Direction::Downlink
        } else {
            Direction::Uplink
        };
        let id = format!("xfer-{u}-{v}");
        let spec = size_transfer(
            id.clone(),
            direction,
            by_id[u.as_str()],
            Some(v.clone()),
            worst_ber,
            passes,
            cfg,
        );
        edges.push((u.clone(), id.clone()));
        edges.push((id, v.clone()));
        transfers.push(spec);
    }
    for s in w.steps.iter().filter(|s| s.deliver_to_ground) {
        if loc(&s.id)? != Location::Onboard {
            continue;
        }
        if passes.is_empty() {
            return Err(TransferError::NoCapacity {
                from: s.id.clone(),
                to: "ground".into(),
            });
        }
        let id = format!("xfer-{}-ground", s.id);
        let spec = size_transfer(
            id.clone(),
            Direction::Downlink,
            s,
            None,
            worst_ber,
            passes,
            cfg,
        );
        edges.push((s.id.clone(), id));
        transfers.push(spec);
    }
    steps.extend(transfers.iter().map(|t| t.step.clone()));

    Ok((
        Workload {
            name: w.name.clone(),
            steps,
            edges,
            deadline_orbits: w.deadline_orbits,
        },
        transfers,
    ))
}
