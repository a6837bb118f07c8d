//! HTTP front of the annotation service.
//!
//! | method | path                           | body / reply                      |
//! |--------|--------------------------------|-----------------------------------|
//! | GET    | `/api/reports?status=&page=`   | page of report summaries (JSON)   |
//! | GET    | `/api/reports/{id}?tweet_page=`| report with one page of tweets    |
//! | POST   | `/api/reports/{id}/annotation` | [`Submission`] → acknowledgement  |
//! | GET    | `/api/counts`                  | total, pending and annotated      |
//! | GET    | `/api/export`                  | tab-separated labelled dataset    |
//!
//! Pages are numbered from 0. Errors come back as `{"error": "..."}` with
//! 404 for unknown reports, 400 for invalid requests and 500 otherwise.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use ripwire::annotation::{Ack, AnnotationRecord, AnnotationService, Counts, Page, ReportSummary, ReportView};
use ripwire::{Error, Label};

/// What a client posts for one report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum Submission {
    Annotate {
        resolved_person_id: String,
        label: Label,
        annotator: String,
        /// Seconds since the epoch; the server clock when absent.
        #[serde(default)]
        annotated_at: Option<i64>,
    },
    /// Leave the report pending.
    Skip { annotator: String },
    /// Withdraw the current annotation.
    Retract { annotator: String },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

pub struct ApiError(Error);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::NotFound(_) => StatusCode::NOT_FOUND,
            Error::Validation(_) | Error::Parse { .. } | Error::Config(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = ErrorBody {
            error: self.0.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Default, Deserialize)]
struct ListQuery {
    #[serde(default)]
    status: String,
    #[serde(default)]
    page: usize,
}

#[derive(Debug, Default, Deserialize)]
struct ReportQuery {
    #[serde(default)]
    tweet_page: usize,
}

type Shared = Arc<AnnotationService>;

/// Run blocking service work off the async executor.
async fn blocking<T: Send + 'static>(
    service: &Shared,
    f: impl FnOnce(&AnnotationService) -> ripwire::Result<T> + Send + 'static,
) -> ApiResult<T> {
    let service = Arc::clone(service);
    tokio::task::spawn_blocking(move || f(&service))
        .await
        .map_err(|e| ApiError(Error::Validation(format!("worker failed: {e}"))))?
        .map_err(ApiError)
}

async fn list_reports(State(s): State<Shared>, Query(q): Query<ListQuery>) -> ApiResult<Json<Page<ReportSummary>>> {
    let status = q.status.parse().map_err(ApiError)?;
    blocking(&s, move |svc| Ok(svc.list_reports(status, q.page)))
        .await
        .map(Json)
}

async fn get_report(
    State(s): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<ReportQuery>,
) -> ApiResult<Json<ReportView>> {
    blocking(&s, move |svc| svc.get_report(&id, q.tweet_page))
        .await
        .map(Json)
}

async fn submit(State(s): State<Shared>, Path(id): Path<String>, Json(sub): Json<Submission>) -> ApiResult<Json<Ack>> {
    let now = chrono::Utc::now().timestamp();
    blocking(&s, move |svc| match sub {
        Submission::Annotate {
            resolved_person_id,
            label,
            annotator,
            annotated_at,
        } => svc.submit_annotation(AnnotationRecord {
            report_id: id,
            resolved_person_id,
            label,
            annotator,
            annotated_at: annotated_at.unwrap_or(now),
        }),
        Submission::Skip { annotator } => svc.skip(&id, &annotator, now),
        Submission::Retract { annotator } => svc.retract(&id, &annotator, now),
    })
    .await
    .map(Json)
}

async fn counts(State(s): State<Shared>) -> Json<Counts> {
    Json(s.counts())
}

async fn export(State(s): State<Shared>) -> ApiResult<Response> {
    let text = blocking(&s, |svc| Ok(svc.export_labels())).await?;
    Ok((
        [(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")],
        text,
    )
        .into_response())
}

pub fn router(service: Arc<AnnotationService>) -> Router {
    Router::new()
        .route("/api/reports", get(list_reports))
        .route("/api/reports/{id}", get(get_report))
        .route("/api/reports/{id}/annotation", post(submit))
        .route("/api/counts", get(counts))
        .route("/api/export", get(export))
        .with_state(service)
}

/// Serve until interrupted.
pub async fn serve(service: Arc<AnnotationService>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("annotation server listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Open `store` and serve it on `addr`, blocking the calling thread.
pub fn serve_blocking(store: &std::path::Path, addr: SocketAddr) -> ripwire::Result<()> {
    let service = Arc::new(AnnotationService::open(store)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::Io {
        context: "starting the server runtime".into(),
        source: e,
    })?;
    runtime.block_on(serve(service, addr)).map_err(|e| Error::Io {
        context: format!("serving on {addr}"),
        source: e,
    })
}
