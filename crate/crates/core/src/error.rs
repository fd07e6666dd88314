use thiserror::Error;

use crate::orbitcore::TleError;
use crate::propagator::PropagationError;
use crate::scheduler::ScheduleError;
use crate::timeline::TimelineError;
use crate::transfer::TransferError;
use crate::workload::WorkloadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Tle(#[from] TleError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Timeline(#[from] TimelineError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl PlanError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            PlanError::Tle(e) => e.code(),
            PlanError::Propagation(e) => e.code(),
            PlanError::Timeline(e) => e.code(),
            PlanError::Workload(e) => e.code(),
            PlanError::Transfer(e) => e.code(),
            PlanError::Schedule(e) => e.code(),
            PlanError::Config(_) => "INVALID_CONFIG",
        }
    }

    /// True when the request itself is malformed; false when a well-formed
    /// request has no feasible plan.
    pub fn is_input_error(&self) -> bool {
        match self {
            PlanError::Tle(_) | PlanError::Workload(_) | PlanError::Config(_) => true,
            PlanError::Propagation(e) => matches!(
                e,
                PropagationError::Config(_) | PropagationError::OutsideValidity { .. }
            ),
            PlanError::Timeline(e) => matches!(e, TimelineError::Config(_)),
            PlanError::Schedule(ScheduleError::Workload(_)) => true,
            PlanError::Transfer(_) | PlanError::Schedule(_) => false,
        }
    }
}
