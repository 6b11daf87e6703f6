//! HTTP API over one loaded schema.
//!
//! Derived documents are computed once at startup and never change. Focus
//! state belongs to the client and arrives with each request.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use shex_atlas::focus::{classify, collapse_neighbourhood, FocusError, FocusState};
use shex_atlas::graph3d::{emit_graph3d, Graph3D};
use shex_atlas::mermaid::{emit_classdiagram, DiagramText};
use shex_atlas::schema_graph::VisualGraph;
use shex_atlas::wikidata::{LookupError, WikidataClient};
use tower_http::services::ServeDir;

use crate::commands::{load_graph, lookup_entity, near_misses, CliError};

const FALLBACK_INDEX: &str = include_str!("../assets/index.html");

pub struct AppState {
    pub graph: VisualGraph,
    pub graph3d: Graph3D,
    pub diagram: DiagramText,
    pub wikidata: Option<Arc<WikidataClient>>,
    pub include_incoming: bool,
    pub language: String,
}

impl AppState {
    pub fn new(graph: VisualGraph, wikidata: Option<WikidataClient>, include_incoming: bool) -> Self {
        Self {
            graph3d: emit_graph3d(&graph),
            diagram: emit_classdiagram(&graph),
            graph,
            wikidata: wikidata.map(Arc::new),
            include_incoming,
            language: "en".into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    suggestions: Vec<String>,
}

struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.into(),
                suggestions: Vec::new(),
            },
        }
    }

    fn unknown_node(g: &VisualGraph, err: FocusError) -> Self {
        let FocusError::UnknownNode(id) = err;
        Self {
            status: StatusCode::NOT_FOUND,
            body: ErrorBody {
                suggestions: near_misses(g, &id),
                error: format!("unknown node {id}"),
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn health() -> Json<&'static str> {
    Json("ok")
}

async fn graph(State(s): State<Arc<AppState>>) -> Json<Graph3D> {
    Json(s.graph3d.clone())
}

async fn diagram(State(s): State<Arc<AppState>>) -> impl IntoResponse {
    (
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        s.diagram.text.clone(),
    )
}

#[derive(Debug, Serialize)]
struct MapEntry<'a> {
    safe: &'a str,
    original: &'a str,
}

async fn diagram_map(State(s): State<Arc<AppState>>) -> Response {
    let entries: Vec<MapEntry> = s
        .diagram
        .map
        .pairs()
        .map(|(safe, original)| MapEntry { safe, original })
        .collect();
    Json(entries).into_response()
}

#[derive(Debug, Deserialize)]
pub struct FocusRequest {
    #[serde(default)]
    pub focused: Vec<String>,
    pub include_incoming: Option<bool>,
}

async fn focus(
    State(s): State<Arc<AppState>>,
    body: Result<Json<FocusRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.body_text()))?;
    let state = FocusState::from_ids(&s.graph, &req.focused).map_err(|e| ApiError::unknown_node(&s.graph, e))?;
    let incoming = req.include_incoming.unwrap_or(s.include_incoming);
    let c = classify(&s.graph, &state, incoming).map_err(|e| ApiError::unknown_node(&s.graph, e))?;
    Ok(Json(c).into_response())
}

#[derive(Debug, Deserialize)]
struct NodeQuery {
    node: Option<String>,
}

async fn collapse(State(s): State<Arc<AppState>>, Query(q): Query<NodeQuery>) -> ApiResult<Json<Graph3D>> {
    let node = q
        .node
        .filter(|n| !n.is_empty())
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "missing query parameter: node"))?;
    let sub = collapse_neighbourhood(&s.graph, &node).map_err(|e| ApiError::unknown_node(&s.graph, e))?;
    Ok(Json(emit_graph3d(&sub)))
}

#[derive(Debug, Deserialize)]
struct TermQuery {
    term: Option<String>,
    lang: Option<String>,
}

async fn entity(State(s): State<Arc<AppState>>, Query(q): Query<TermQuery>) -> ApiResult<Response> {
    let term = q
        .term
        .filter(|t| !t.is_empty())
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "missing query parameter: term"))?;
    let client = s
        .wikidata
        .clone()
        .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "wikidata lookups are off"))?;
    let language = q.lang.unwrap_or_else(|| s.language.clone());
    // Live lookups block; keep them off the async workers.
    let answer = tokio::task::spawn_blocking(move || lookup_entity(&client, &term, &language))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    match answer {
        Ok(a) => Ok(Json(a).into_response()),
        Err(e @ (CliError::NotWikidata(_) | CliError::Lookup(LookupError::NotFound(_)))) => {
            Err(ApiError::new(StatusCode::NOT_FOUND, e.to_string()))
        }
        Err(e) => Err(ApiError::new(StatusCode::SERVICE_UNAVAILABLE, e.to_string())),
    }
}

async fn fallback_index() -> Html<&'static str> {
    Html(FALLBACK_INDEX)
}

/// API routes plus static viewer assets from `static_dir`, or a minimal
/// built-in page when none is given.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/graph", get(graph))
        .route("/api/diagram", get(diagram))
        .route("/api/diagram/map", get(diagram_map))
        .route("/api/focus", post(focus))
        .route("/api/collapse", get(collapse))
        .route("/api/entity", get(entity))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(fallback_index)),
    }
}

pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub input_path: PathBuf,
    pub include_incoming_focus: bool,
    pub static_dir: Option<PathBuf>,
}

pub async fn serve(config: ServiceConfig, wikidata: Option<WikidataClient>) -> Result<(), CliError> {
    let graph = load_graph(&config.input_path)?;
    let state = Arc::new(AppState::new(graph, wikidata, config.include_incoming_focus));
    let app = router(state, config.static_dir);
    let addr: SocketAddr = format!("{}:{}", config.host, config.port)
        .parse()
        .map_err(|e| CliError::Config(format!("bad listen address: {e}")))?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| CliError::Server(format!("cannot bind {addr}: {e}")))?;
    log::info!("serving {} on http://{addr}", config.input_path.display());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::Server(e.to_string()))
}
