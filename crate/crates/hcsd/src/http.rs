//! The daemon's HTTP surface:
//!
//! - `POST /v1/samples` — agent batch ingestion (wire schema)
//! - `GET /v1/series?source=..&name=..&t0=..&t1=..` — range queries
//! - `GET /v1/health` — liveness plus series count
//! - `GET /v1/diagnosis/latest` — the last check cycle's Diagnosis

use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use hcs_checker::Diagnosis;
use hcs_core::wire::{IngestAck, WireBatch};
use hcs_store::SeriesStore;

pub const MAX_BODY_BYTES: usize = 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SeriesStore>,
    pub latest: Arc<RwLock<Option<Arc<Diagnosis>>>>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/samples", post(ingest_samples))
        .route("/v1/series", get(query_series))
        .route("/v1/health", get(health))
        .route("/v1/diagnosis/latest", get(latest_diagnosis))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

async fn ingest_samples(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Json<IngestAck>, (StatusCode, Json<serde_json::Value>)> {
    let batch: WireBatch = serde_json::from_slice(&body).map_err(|err| {
        (
            StatusCode::BAD_REQUEST,
            Json(json!({ "error": err.to_string() })),
        )
    })?;
    let outcome = state.store.ingest(&batch, crate::wall_clock_ms());
    Ok(Json(IngestAck {
        accepted: outcome.accepted,
        rejected: outcome.rejected,
    }))
}

#[derive(Deserialize)]
struct SeriesQuery {
    source: String,
    name: String,
    t0: i64,
    t1: i64,
}

async fn query_series(
    State(state): State<AppState>,
    Query(query): Query<SeriesQuery>,
) -> Result<Json<serde_json::Value>, (StatusCode, Json<serde_json::Value>)> {
    let points = state
        .store
        .query_range(&query.source, &query.name, query.t0, query.t1)
        .map_err(|err| {
            (
                StatusCode::BAD_REQUEST,
                Json(json!({ "error": err.to_string() })),
            )
        })?;
    let points: Vec<serde_json::Value> = points
        .into_iter()
        .map(|(ts, value)| json!([ts, value]))
        .collect();
    Ok(Json(json!({ "points": points })))
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "series": state.store.series_count() }))
}

async fn latest_diagnosis(
    State(state): State<AppState>,
) -> Result<Json<serde_json::Value>, (StatusCode, Json<serde_json::Value>)> {
    let latest = state.latest.read().expect("latest lock").clone();
    match latest {
        Some(diagnosis) => {
            let value = serde_json::to_value(diagnosis.as_ref()).map_err(|err| {
                (
                    StatusCode::INTERNAL_SERVER_ERROR,
                    Json(json!({ "error": err.to_string() })),
                )
            })?;
            Ok(Json(value))
        }
        None => Err((
            StatusCode::NOT_FOUND,
            Json(json!({ "error": "no diagnosis yet" })),
        )),
    }
}
