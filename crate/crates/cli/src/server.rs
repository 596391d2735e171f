//! Read-only HTTP/JSON API over a tagged corpus and its index.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use morfwork::corpus::TaggedCorpus;
use morfwork::error::{AnalysisError, SearchError};
use morfwork::index::FeatureIndex;
use morfwork::search::{self, analysis_view, SearchOutcome};
use morfwork::text::ascii_fold;
use morfwork::Workbench;
use serde::Serialize;
use tower_http::services::ServeDir;

use crate::views;

/// Everything a request may read. Nothing here changes after startup.
pub struct AppState {
    pub workbench: Workbench,
    pub tagged: TaggedCorpus,
    pub index: FeatureIndex,
    pub ascii_fold: bool,
}

type Shared = State<Arc<AppState>>;
type Params = Result<Query<Vec<(String, String)>>, QueryRejection>;

impl AppState {
    fn json<T: Serialize>(&self, status: StatusCode, body: &T) -> Response {
        let mut text = serde_json::to_string(body).expect("views serialize infallibly");
        if self.ascii_fold {
            text = ascii_fold(&text);
        }
        (status, [(header::CONTENT_TYPE, "application/json; charset=utf-8")], text).into_response()
    }

    fn error(&self, status: StatusCode, message: impl Into<String>) -> Response {
        self.json(status, &views::ErrorBody { error: message.into() })
    }
}

pub fn router(state: Arc<AppState>, ui: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/features", get(features))
        .route("/api/search", get(search_handler))
        .route("/api/sentences/{id}", get(sentence))
        .route("/api/analysis", get(analysis))
        .route("/api/analyze", get(analyze));
    let api = match ui {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    };
    api.with_state(state)
}

pub async fn serve(state: Arc<AppState>, ui: Option<PathBuf>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state, ui))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn not_found(State(st): Shared) -> Response {
    st.error(StatusCode::NOT_FOUND, "no such resource")
}

async fn features(State(st): Shared) -> Response {
    st.json(StatusCode::OK, &views::features(&st.workbench.vocabulary, &st.tagged))
}

/// Parses query-string pairs, rejecting repeated fields.
fn query_from(params: Params) -> Result<search::Query, (StatusCode, String)> {
    let Query(pairs) = params.map_err(|e| (StatusCode::BAD_REQUEST, e.body_text()))?;
    let mut seen = std::collections::BTreeSet::new();
    for (k, _) in &pairs {
        if !seen.insert(k.as_str()) {
            return Err((StatusCode::BAD_REQUEST, format!("field `{k}` given more than once")));
        }
    }
    search::Query::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .map_err(|e| (StatusCode::BAD_REQUEST, e.to_string()))
}

async fn search_handler(State(st): Shared, params: Params) -> Response {
    let q = match query_from(params) {
        Ok(q) => q,
        Err((status, msg)) => return st.error(status, msg),
    };
    let wb = &st.workbench;
    match search::search(&q, &wb.implications, &wb.vocabulary, &st.index, &st.tagged) {
        Ok(SearchOutcome::Hits(hits)) => st.json(StatusCode::OK, &views::search_response(&q, &hits)),
        Ok(SearchOutcome::Conflict(c)) => st.json(StatusCode::CONFLICT, &views::conflict_response(&c)),
        Err(e @ SearchError::UnknownFeatureValue { .. }) => st.error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(e) => st.error(StatusCode::BAD_REQUEST, e.to_string()),
    }
}

async fn sentence(State(st): Shared, Path(id): Path<String>) -> Response {
    let found = id
        .parse::<usize>()
        .ok()
        .and_then(|i| Some((st.tagged.sentences.get(i)?, st.tagged.chosen.get(i)?)));
    match found {
        Some((s, chosen)) => st.json(StatusCode::OK, &views::sentence_view(s, chosen)),
        None => st.error(StatusCode::NOT_FOUND, format!("no sentence `{id}`")),
    }
}

async fn analysis(State(st): Shared, params: Params) -> Response {
    let Ok(Query(pairs)) = params else {
        return st.error(StatusCode::BAD_REQUEST, "malformed query string");
    };
    let get = |name: &str| {
        pairs
            .iter()
            .find(|(k, _)| k == name)
            .and_then(|(_, v)| v.parse::<usize>().ok())
    };
    let (Some(s), Some(t)) = (get("sentence"), get("token")) else {
        return st.error(StatusCode::BAD_REQUEST, "expected numeric `sentence` and `token` parameters");
    };
    match analysis_view(&st.tagged, s, t, st.workbench.analyzer.morphotactics()) {
        Ok(view) => st.json(StatusCode::OK, &view),
        Err(e) => st.error(StatusCode::NOT_FOUND, e.to_string()),
    }
}

async fn analyze(State(st): Shared, params: Params) -> Response {
    let word = match params {
        Ok(Query(pairs)) => pairs.into_iter().find(|(k, _)| k == "word").map(|(_, v)| v),
        Err(_) => None,
    };
    let Some(word) = word else {
        return st.error(StatusCode::BAD_REQUEST, "expected a `word` parameter");
    };
    match st.workbench.analyzer.analyze(&word) {
        Ok(parses) => st.json(
            StatusCode::OK,
            &views::AnalyzeResponse {
                word,
                parses: parses.iter().map(views::ParseView::from).collect(),
            },
        ),
        Err(e @ AnalysisError::EmptyInput) => st.error(StatusCode::BAD_REQUEST, e.to_string()),
        Err(e) => st.error(StatusCode::NOT_FOUND, e.to_string()),
    }
}
