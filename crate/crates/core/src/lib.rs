//! Deterministic execution planning for workloads that span a LEO satellite
//! and the ground.
//!
//! The pipeline runs in four phases:
//!
//! 1. orbital environment: [`propagator`], [`skymodel`], [`groundlink`],
//!    merged into a resource [`timeline`];
//! 2. compute [`placement`] of flexible [`workload`] steps;
//! 3. [`transfer`] insertion at space-ground boundaries;
//! 4. greedy first-fit [`scheduler`] into orbital windows.
//!
//! [`pipeline::plan`] wires the phases together and returns an
//! [`scheduler::ExecutionPlan`] whose canonical JSON is byte-stable.

// `!(x > 0.0)` style checks reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod error;
pub mod groundlink;
pub mod orbitcore;
pub mod pipeline;
pub mod placement;
pub mod propagator;
pub mod scheduler;
pub mod skymodel;
pub mod timeline;
pub mod transfer;
pub mod workload;

pub use error::PlanError;
