use orbitplan::workload::WorkloadError;
use orbitplan::PlanError;
use thiserror::Error;

use crate::tle_client::FetchError;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{0}")]
    Input(String),
}

/// Broad outcome class, mapped to exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    NotFound,
    Infeasible,
    Upstream,
}

impl GatewayError {
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::Plan(e) => e.code(),
            GatewayError::Fetch(e) => e.code(),
            GatewayError::Input(_) => "INVALID_REQUEST",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            GatewayError::Plan(PlanError::Workload(WorkloadError::UnknownPreset(_))) => {
                ErrorClass::NotFound
            }
            GatewayError::Plan(e) if e.is_input_error() => ErrorClass::Input,
            GatewayError::Plan(_) => ErrorClass::Infeasible,
            GatewayError::Fetch(FetchError::NotFound(_)) => ErrorClass::NotFound,
            GatewayError::Fetch(FetchError::Io(_)) => ErrorClass::Input,
            GatewayError::Fetch(_) => ErrorClass::Upstream,
            GatewayError::Input(_) => ErrorClass::Input,
        }
    }

    /// 2 for a well-formed request without a feasible plan, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Infeasible => 2,
            _ => 1,
        }
    }

    pub fn http_status(&self) -> u16 {
        match self.class() {
            ErrorClass::Input => 400,
            ErrorClass::NotFound => 404,
            ErrorClass::Infeasible => 422,
            ErrorClass::Upstream => 502,
        }
    }
}
