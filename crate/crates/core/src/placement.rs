//! On-board versus ground placement for steps that may run either way.

use serde::{Deserialize, Serialize};

use crate::workload::{topo_sort, Encryption, Location, ProcessingStep, Workload, WorkloadError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncryptionOverheads {
    pub aes256: f64,
    pub aes128: f64,
    pub none: f64,
}

impl Default for EncryptionOverheads {
    fn default() -> Self {
        Self {
            aes256: 0.05,
            aes128: 0.03,
            none: 0.0,
        }
    }
}

impl EncryptionOverheads {
    pub fn for_scheme(&self, e: Encryption) -> f64 {
        match e {
            Encryption::Aes256 => self.aes256,
            Encryption::Aes128 => self.aes128,
            Encryption::None => self.none,
        }
    }
}

/// Weights of the placement cost model.
///
/// `energy_weight` multiplies the watt-second term of the on-board cost. It is
/// 1 by default; having it explicit lets every cost term scale together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlacementConfig {
    pub reduction_threshold: f64,
    pub energy_weight: f64,
    pub thermal_penalty_scale: f64,
    /// per second
    pub time_occupancy_weight: f64,
    pub transfer_time_weight: f64,
    /// per MB
    pub transfer_volume_weight: f64,
    /// Mbps
    pub assumed_mean_rate: f64,
    pub default_fec_rate: f64,
    pub enc_overhead: EncryptionOverheads,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            reduction_threshold: 0.1,
            energy_weight: 1.0,
            thermal_penalty_scale: 500.0,
            time_occupancy_weight: 0.5,
            transfer_time_weight: 10.0,
            transfer_volume_weight: 2.0,
            assumed_mean_rate: 80.0,
            default_fec_rate: 0.75,
            enc_overhead: EncryptionOverheads::default(),
        }
    }
}

impl PlacementConfig {
    /// Returns a copy with every cost weight multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            energy_weight: self.energy_weight * k,
            thermal_penalty_scale: self.thermal_penalty_scale * k,
            time_occupancy_weight: self.time_occupancy_weight * k,
            transfer_time_weight: self.transfer_time_weight * k,
            transfer_volume_weight: self.transfer_volume_weight * k,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementReason {
    Fixed,
    ReductionHeuristic,
    CostCompare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementDecision {
    pub step_id: String,
    /// `Onboard` or `Ground`, never `Either`
    pub location: Location,
    pub reason: PlacementReason,
    pub cost_onboard: Option<f64>,
    pub cost_ground: Option<f64>,
}

/// Energy, thermal share of the bus limit and window occupancy.
pub fn cost_onboard(step: &ProcessingStep, thermal_limit: f64, cfg: &PlacementConfig) -> f64 {
    cfg.energy_weight * step.power * step.duration
        + step.thermal / thermal_limit * cfg.thermal_penalty_scale
        + step.duration * cfg.time_occupancy_weight
}

/// Coded, encrypted volumes (MB) that ground execution would move down and
/// back up.
pub fn ground_volumes(step: &ProcessingStep, cfg: &PlacementConfig) -> (f64, f64) {
    let expand = (1.0 + cfg.enc_overhead.for_scheme(step.encryption)) / cfg.default_fec_rate;
    (step.data_in * expand, step.data_out * expand)
}

pub fn cost_ground(step: &ProcessingStep, cfg: &PlacementConfig) -> f64 {
    let (down, up) = ground_volumes(step, cfg);
    let volume = down + up;
    let mb_per_s = cfg.assumed_mean_rate / 8.0;
    volume / mb_per_s * cfg.transfer_time_weight + volume * cfg.transfer_volume_weight
}

pub fn place_step(
    step: &ProcessingStep,
    thermal_limit: f64,
    cfg: &PlacementConfig,
) -> PlacementDecision {
    let decided = |location, reason, on, gr| PlacementDecision {
        step_id: step.id.clone(),
        location,
        reason,
        cost_onboard: on,
        cost_ground: gr,
    };
    match step.location {
        Location::Onboard | Location::Ground => {
            decided(step.location, PlacementReason::Fixed, None, None)
        }
        Location::Either => {
            if step.data_in > 0.0 && step.data_out / step.data_in < cfg.reduction_threshold {
                return decided(
                    Location::Onboard,
                    PlacementReason::ReductionHeuristic,
                    None,
                    None,
                );
            }
            let on = cost_onboard(step, thermal_limit, cfg);
            let gr = cost_ground(step, cfg);
            let loc = if on <= gr {
                Location::Onboard
            } else {
                Location::Ground
            };
            decided(loc, PlacementReason::CostCompare, Some(on), Some(gr))
        }
    }
}

/// One decision per step, in topological order.
pub fn place(
    w: &Workload,
    thermal_limit: f64,
    cfg: &PlacementConfig,
) -> Result<Vec<PlacementDecision>, WorkloadError> {
    let steps = w.step_map();
    Ok(topo_sort(w)?
        .iter()
        .map(|id| place_step(steps[id.as_str()], thermal_limit, cfg))
        .collect())
}
