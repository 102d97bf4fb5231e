//! HTTP binding of [`crate::api`].
//!
//! | method | path                      | body                                 |
//! |--------|---------------------------|--------------------------------------|
//! | GET    | `/api/staff`              |                                      |
//! | GET    | `/api/staff/{id}`         |                                      |
//! | GET    | `/api/advisor/{student}`  |                                      |
//! | GET    | `/api/graph`              |                                      |
//! | POST   | `/api/scan`               | `{payload}`                          |
//! | POST   | `/api/route`              | `{from_node, staff_id}`              |
//! | POST   | `/api/relocalize`         | `{route, scanned, staff_id?}`        |
//! | POST   | `/api/reload`             |                                      |
//!
//! Errors are `{error, detail}` with status 400, 404 or 422.

use crate::api::{
    ApiError, ErrorBody, RelocalizeRequest, ReloadResponse, RouteRequest, ScanRequest, Snapshot,
};
use crate::config::AppConfig;
use arc_swap::ArcSwap;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use std::sync::Arc;
use tokio::sync::Mutex;

pub struct AppState {
    config: AppConfig,
    snapshot: ArcSwap<Snapshot>,
    /// Serializes reloads so generations stay in order.
    reload_lock: Mutex<()>,
}

impl AppState {
    /// Loads the initial snapshot.
    pub fn new(config: AppConfig) -> Result<Arc<AppState>, ApiError> {
        let snapshot = Snapshot::load(&config, 1)?;
        Ok(Arc::new(AppState {
            config,
            snapshot: ArcSwap::from_pointee(snapshot),
            reload_lock: Mutex::new(()),
        }))
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.load_full()
    }

    /// Re-reads every file named by the config and swaps the new snapshot in.
    /// On failure the current snapshot stays in place.
    pub async fn reload(&self) -> Result<ReloadResponse, ApiError> {
        let _guard = self.reload_lock.lock().await;
        let generation = self.snapshot.load().generation + 1;
        let config = self.config.clone();
        let next = tokio::task::spawn_blocking(move || Snapshot::load(&config, generation))
            .await
            .map_err(|e| ApiError::LoadFailed(e.to_string()))??;
        let response = ReloadResponse {
            generation,
            nodes: next.graph.node_count(),
            staff: next.directory.staff_count(),
            advisors: next.directory.advisor_count(),
        };
        self.snapshot.store(Arc::new(next));
        tracing::info!(generation, "snapshot reloaded");
        Ok(response)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::UNPROCESSABLE_ENTITY);
        if status != StatusCode::NOT_FOUND {
            tracing::debug!(error = %self, "request failed");
        }
        (status, Json(ErrorBody::from(&self))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(req: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    req.map(|Json(v)| v)
        .map_err(|e| ApiError::BadRequest(e.body_text()))
}

fn ok<T: Serialize>(v: T) -> ApiResult<T> {
    Ok(Json(v))
}

async fn list_staff(State(s): State<Arc<AppState>>) -> ApiResult<Vec<campus_ar_core::StaffRecord>> {
    ok(s.snapshot().all_staff())
}

async fn get_staff(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<campus_ar_core::StaffRecord> {
    ok(s.snapshot().staff(&id)?.clone())
}

async fn get_advisor(
    State(s): State<Arc<AppState>>,
    Path(student): Path<String>,
) -> ApiResult<crate::api::AdvisorResponse> {
    ok(s.snapshot().advisor(&student)?)
}

async fn get_graph(State(s): State<Arc<AppState>>) -> ApiResult<serde_json::Value> {
    ok(s.snapshot().graph_json())
}

async fn scan(
    State(s): State<Arc<AppState>>,
    req: Result<Json<ScanRequest>, JsonRejection>,
) -> ApiResult<crate::api::ScanResponse> {
    ok(s.snapshot().scan(&body(req)?)?)
}

async fn route(
    State(s): State<Arc<AppState>>,
    req: Result<Json<RouteRequest>, JsonRejection>,
) -> ApiResult<crate::api::RouteResponse> {
    ok(s.snapshot().route(&body(req)?)?)
}

async fn relocalize(
    State(s): State<Arc<AppState>>,
    req: Result<Json<RelocalizeRequest>, JsonRejection>,
) -> ApiResult<crate::api::RouteResponse> {
    ok(s.snapshot().relocalize(&body(req)?)?)
}

async fn reload(State(s): State<Arc<AppState>>) -> ApiResult<ReloadResponse> {
    ok(s.reload().await?)
}

async fn not_found(method: Method, uri: Uri) -> Response {
    let body = ErrorBody {
        error: "NotFound".into(),
        detail: format!("no endpoint {method} {}", uri.path()),
    };
    (StatusCode::NOT_FOUND, Json(body)).into_response()
}

async fn method_not_allowed(method: Method, uri: Uri) -> Response {
    let body = ErrorBody {
        error: "MethodNotAllowed".into(),
        detail: format!("{method} is not supported on {}", uri.path()),
    };
    (StatusCode::METHOD_NOT_ALLOWED, Json(body)).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/staff", get(list_staff))
        .route("/api/staff/{id}", get(get_staff))
        .route("/api/advisor/{student_id}", get(get_advisor))
        .route("/api/graph", get(get_graph))
        .route("/api/scan", post(scan))
        .route("/api/route", post(route))
        .route("/api/relocalize", post(relocalize))
        .route("/api/reload", post(reload))
        .fallback(not_found)
        .method_not_allowed_fallback(method_not_allowed)
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>) -> std::io::Result<()> {
    let addr = state
        .config
        .socket_addr()
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
