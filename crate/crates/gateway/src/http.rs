//! HTTP front end: `/plan`, `/presets`, `/health`.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use orbitplan::workload::{load_preset, preset_summary, PRESET_NAMES};
use serde_json::json;

use crate::error::GatewayError;
use crate::service::{CacheStatus, PlanRequest, Planner, StartTime, WorkloadSpec};

pub const BIND_ENV: &str = "ORBITPLAN_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

pub fn router(planner: Arc<Planner>) -> Router {
    Router::new()
        .route("/plan", get(plan))
        .route("/presets", get(presets))
        .route("/health", get(health))
        .with_state(planner)
}

pub async fn serve(
    listener: tokio::net::TcpListener,
    planner: Arc<Planner>,
) -> std::io::Result<()> {
    axum::serve(listener, router(planner)).await
}

fn problem(err: &GatewayError) -> Response {
    let status =
        StatusCode::from_u16(err.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let body = json!({
        "type": "about:blank",
        "title": status.canonical_reason().unwrap_or("error"),
        "status": status.as_u16(),
        "code": err.code(),
        "detail": err.to_string(),
    });
    let mut resp = (status, body.to_string()).into_response();
    resp.headers_mut().insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static("application/problem+json"),
    );
    resp
}

fn parse_request(q: &HashMap<String, String>) -> Result<PlanRequest, GatewayError> {
    let norad = q
        .get("norad")
        .ok_or_else(|| GatewayError::Input("missing query parameter `norad`".into()))?
        .parse::<u32>()
        .map_err(|_| GatewayError::Input("`norad` must be a catalog number".into()))?;
    let workload = q
        .get("workload")
        .ok_or_else(|| GatewayError::Input("missing query parameter `workload`".into()))?;
    let mut req = PlanRequest::new(norad, WorkloadSpec::Preset(workload.clone()));
    if let Some(h) = q.get("horizon") {
        req.horizon_hours = h
            .parse()
            .map_err(|_| GatewayError::Input("`horizon` must be a whole number of hours".into()))?;
    }
    if let Some(s) = q.get("start") {
        req.start = StartTime::parse(s)?;
    }
    Ok(req)
}

async fn plan(
    State(planner): State<Arc<Planner>>,
    Query(q): Query<HashMap<String, String>>,
) -> Response {
    let req = match parse_request(&q) {
        Ok(r) => r,
        Err(e) => return problem(&e),
    };
    match planner.plan(&req).await {
        Ok((plan, status)) => {
            let mut resp = (StatusCode::OK, plan.canonical_json()).into_response();
            let h = resp.headers_mut();
            h.insert(
                header::CONTENT_TYPE,
                HeaderValue::from_static("application/json"),
            );
            let tag = format!("\"{}\"", plan.determinism_hash);
            h.insert(
                header::ETAG,
                HeaderValue::from_str(&tag).expect("hex is a valid header"),
            );
            h.insert(
                "x-determinism-hash",
                HeaderValue::from_str(&plan.determinism_hash).expect("hex is a valid header"),
            );
            let cache = match status {
                CacheStatus::Hit => "HIT",
                CacheStatus::Miss => "MISS",
            };
            h.insert("x-cache", HeaderValue::from_static(cache));
            let max_age = format!("public, max-age={}", planner.cache().ttl().as_secs());
            h.insert(
                header::CACHE_CONTROL,
                HeaderValue::from_str(&max_age).expect("ascii"),
            );
            resp
        }
        Err(e) => problem(&e),
    }
}

async fn presets() -> Json<serde_json::Value> {
    let list: Vec<_> = PRESET_NAMES
        .iter()
        .map(|name| {
            let w = load_preset(name).expect("built-in preset");
            json!({
                "name": name,
                "summary": preset_summary(name),
                "steps": w.steps.len(),
                "deadline_orbits": w.deadline_orbits,
            })
        })
        .collect();
    Json(json!(list))
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({"status": "ok"}))
}
