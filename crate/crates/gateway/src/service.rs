//! Request resolution, caching and pipeline invocation.

use std::sync::Arc;

use chrono::{DateTime, Utc};
use orbitplan::canonical::{sha256_hex, to_canonical_string};
use orbitplan::orbitcore::Tle;
use orbitplan::pipeline::{plan, quantize_to_minute, PlannerConfig};
use orbitplan::scheduler::ExecutionPlan;
use orbitplan::workload::{load_preset, Workload};
use orbitplan::PlanError;
use serde_json::json;

use crate::cache::PlanCache;
use crate::error::GatewayError;
use crate::tle_client::TleSource;

pub const DEFAULT_HORIZON_HOURS: u32 = 12;

#[derive(Debug, Clone)]
pub enum WorkloadSpec {
    Preset(String),
    Inline(Workload),
}

impl WorkloadSpec {
    pub fn resolve(&self) -> Result<Workload, GatewayError> {
        match self {
            WorkloadSpec::Preset(name) => load_preset(name).map_err(|e| PlanError::from(e).into()),
            WorkloadSpec::Inline(w) => Ok(w.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartTime {
    /// current time truncated to the minute
    Now,
    At(DateTime<Utc>),
}

impl StartTime {
    pub fn parse(s: &str) -> Result<Self, GatewayError> {
        if s.eq_ignore_ascii_case("now") {
            return Ok(StartTime::Now);
        }
        DateTime::parse_from_rfc3339(s)
            .map(|t| StartTime::At(t.with_timezone(&Utc)))
            .map_err(|e| GatewayError::Input(format!("bad start time `{s}`: {e}")))
    }

    pub fn resolve(self) -> DateTime<Utc> {
        match self {
            StartTime::Now => quantize_to_minute(Utc::now()),
            StartTime::At(t) => t,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanRequest {
    pub norad: u32,
    pub workload: WorkloadSpec,
    pub horizon_hours: u32,
    pub start: StartTime,
    pub config: PlannerConfig,
}

impl PlanRequest {
    pub fn new(norad: u32, workload: WorkloadSpec) -> Self {
        Self {
            norad,
            workload,
            horizon_hours: DEFAULT_HORIZON_HOURS,
            start: StartTime::Now,
            config: PlannerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
}

/// Key over every input that can change the plan.
pub fn cache_key(
    source: &TleSource,
    norad: u32,
    workload: &Workload,
    start: DateTime<Utc>,
    horizon_hours: u32,
    cfg: &PlannerConfig,
) -> String {
    let doc = json!({
        "norad": norad,
        "source": source.identity(),
        "workload": workload,
        "start": start,
        "horizon_hours": horizon_hours,
        "config": cfg,
    });
    sha256_hex(&to_canonical_string(&doc))
}

pub struct Planner {
    source: TleSource,
    cache: PlanCache,
}

impl Planner {
    pub fn new(source: TleSource, cache: PlanCache) -> Self {
        Self { source, cache }
    }

    pub fn source(&self) -> &TleSource {
        &self.source
    }

    pub fn cache(&self) -> &PlanCache {
        &self.cache
    }

    pub async fn plan(
        &self,
        req: &PlanRequest,
    ) -> Result<(Arc<ExecutionPlan>, CacheStatus), GatewayError> {
        let workload = req.workload.resolve()?;
        let start = req.start.resolve();
        let key = cache_key(
            &self.source,
            req.norad,
            &workload,
            start,
            req.horizon_hours,
            &req.config,
        );
        if let Some(hit) = self.cache.get(&key) {
            return Ok((hit, CacheStatus::Hit));
        }
        let tle = self.source.load(req.norad).await?;
        let (horizon, cfg) = (req.horizon_hours, req.config.clone());
        let result =
            tokio::task::spawn_blocking(move || plan(&tle, &workload, start, horizon, &cfg))
                .await
                .map_err(|e| GatewayError::Input(format!("planning task failed: {e}")))??;
        let result = Arc::new(result);
        self.cache.insert(key, Arc::clone(&result));
        Ok((result, CacheStatus::Miss))
    }
}

/// Runs the pipeline for an already loaded element set, without caching.
pub fn plan_once(tle: &Tle, req: &PlanRequest) -> Result<ExecutionPlan, GatewayError> {
    let workload = req.workload.resolve()?;
    Ok(plan(
        tle,
        &workload,
        req.start.resolve(),
        req.horizon_hours,
        &req.config,
    )?)
}
