//! Operational shell around the planner: command line, HTTP service, element
//! set acquisition and plan caching.

pub mod cache;
pub mod cli;
pub mod error;
pub mod http;
pub mod service;
pub mod tle_client;

pub use error::GatewayError;
