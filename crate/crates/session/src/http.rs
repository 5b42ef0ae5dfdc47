//! HTTP/JSON front end.
//!
//! ```text
//! POST   /v1/sessions                       {"space": "worlds: a b c"}
//! POST   /v1/sessions/{id}/judgments        {"lhs": S, "rel": ">", "rhs": S}
//! DELETE /v1/sessions/{id}/judgments/{jid}
//! GET    /v1/sessions/{id}/status | report | realization | journal
//! GET    /v1/sessions/{id}/entails?lhs=S&rhs=S
//! GET    /v1/sessions/{id}/bounds?event=S[&given=S]
//! ```
//!
//! Errors are `{"error": code, "message": text, "offset"?: n, "field"?: f}`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::error::SessionError;
use crate::journal::render_journal;
use crate::store::Store;

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'static str>,
}

pub struct ApiError(pub SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(SessionError::BadRequest(e.body_text()))
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError(SessionError::BadRequest(e.body_text()))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let e = self.0;
        let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = ErrorBody {
            error: e.code(),
            message: e.to_string(),
            offset: e.offset(),
            field: e.field(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Runs CPU-bound work off the async executor, within `budget` when set.
async fn blocking<T: Send + 'static>(
    store: &Arc<Store>,
    budget: bool,
    work: impl FnOnce() -> Result<T, SessionError> + Send + 'static,
) -> Result<T, SessionError> {
    let limit = store.config().query_budget;
    if budget && limit.is_zero() {
        return Err(SessionError::Timeout(0));
    }
    let task = tokio::task::spawn_blocking(work);
    let joined = if budget {
        tokio::time::timeout(limit, task)
            .await
            .map_err(|_| SessionError::Timeout(limit.as_millis() as u64))?
    } else {
        task.await
    };
    joined.map_err(|e| SessionError::Io(format!("worker failed: {e}")))?
}

#[derive(Deserialize)]
struct CreateBody {
    space: String,
}

#[derive(Serialize)]
struct Created {
    id: String,
    status: crate::view::StatusView,
}

async fn create(
    State(store): State<Arc<Store>>,
    body: Result<Json<CreateBody>, JsonRejection>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(body) = body?;
    let s = store.clone();
    let (id, status) = blocking(&store, false, move || s.create(&body.space)).await?;
    Ok((StatusCode::CREATED, Json(Created { id, status })))
}

#[derive(Deserialize)]
struct AssertBody {
    lhs: String,
    rel: String,
    rhs: String,
}

async fn assert_judgment(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: Result<Json<AssertBody>, JsonRejection>,
) -> ApiResult<crate::view::StatusView> {
    let Json(body) = body?;
    let s = store.clone();
    let view = blocking(&store, false, move || {
        s.assert(&id, &body.lhs, &body.rel, &body.rhs)
    })
    .await?;
    Ok(Json(view))
}

async fn retract_judgment(
    State(store): State<Arc<Store>>,
    Path((id, jid)): Path<(String, String)>,
) -> ApiResult<crate::view::StatusView> {
    let s = store.clone();
    Ok(Json(
        blocking(&store, false, move || s.retract(&id, &jid)).await?,
    ))
}

async fn status(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> ApiResult<crate::view::StatusView> {
    Ok(Json(store.snapshot(&id)?.status()))
}

async fn report(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> ApiResult<crate::view::ReportView> {
    let snap = store.snapshot(&id)?;
    Ok(Json(
        blocking(&store, true, move || Ok(snap.report())).await?,
    ))
}

async fn realization(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> ApiResult<crate::view::RealizationView> {
    let snap = store.snapshot(&id)?;
    Ok(Json(
        blocking(&store, true, move || snap.realization()).await?,
    ))
}

#[derive(Serialize)]
struct JournalBody {
    revision: usize,
    journal: String,
}

async fn journal(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> ApiResult<JournalBody> {
    let records = store.journal(&id)?;
    Ok(Json(JournalBody {
        revision: records.len(),
        journal: render_journal(&records),
    }))
}

#[derive(Deserialize)]
struct EntailsParams {
    lhs: String,
    rhs: String,
}

async fn entails(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    params: Result<Query<EntailsParams>, QueryRejection>,
) -> ApiResult<crate::view::EntailsView> {
    let Query(p) = params?;
    let snap = store.snapshot(&id)?;
    Ok(Json(
        blocking(&store, true, move || snap.entails(&p.lhs, &p.rhs)).await?,
    ))
}

#[derive(Deserialize)]
struct BoundsParams {
    event: String,
    given: Option<String>,
}

async fn bounds(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    params: Result<Query<BoundsParams>, QueryRejection>,
) -> ApiResult<crate::view::BoundsView> {
    let Query(p) = params?;
    let snap = store.snapshot(&id)?;
    Ok(Json(
        blocking(&store, true, move || {
            snap.bounds(&p.event, p.given.as_deref())
        })
        .await?,
    ))
}

async fn not_found() -> ApiError {
    ApiError(SessionError::BadRequest("no such endpoint".into()))
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/v1/sessions", post(create))
        .route("/v1/sessions/{id}/judgments", post(assert_judgment))
        .route(
            "/v1/sessions/{id}/judgments/{jid}",
            delete(retract_judgment),
        )
        .route("/v1/sessions/{id}/status", get(status))
        .route("/v1/sessions/{id}/report", get(report))
        .route("/v1/sessions/{id}/realization", get(realization))
        .route("/v1/sessions/{id}/journal", get(journal))
        .route("/v1/sessions/{id}/entails", get(entails))
        .route("/v1/sessions/{id}/bounds", get(bounds))
        .fallback(not_found)
        // Browser consoles may be served from another origin.
        .layer(CorsLayer::permissive())
        .with_state(store)
}

/// Serves until interrupted.
pub async fn serve(addr: SocketAddr, store: Store) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
