use std::collections::BTreeSet;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use narrative_core::strategies::candidate_panel_with;
use narrative_core::{
    Engine, Error, GeneratedQuery, NarrativeQuery, QueryLabels, Strategy, StrategyOptions, TranslationOptions,
};
use serde::{Deserialize, Serialize};

use crate::AppState;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateRequest {
    pub keywords: String,
    #[serde(default)]
    pub options: RequestOptions,
}

/// Per-request overrides of the server defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequestOptions {
    pub tau: Option<usize>,
    pub consider_permutations: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateDto {
    pub strategy: Strategy,
    pub query: NarrativeQuery,
    pub key: String,
    pub labels: QueryLabels,
    pub result_count: usize,
    pub excluded_tokens: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslateResponse {
    pub tokens: Vec<String>,
    /// In the order specific, mixed, most-supported.
    pub candidates: Vec<CandidateDto>,
    /// Tokens no generated query uses in any role.
    pub excluded_tokens: Vec<String>,
    pub query_count: usize,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    pub query: NarrativeQuery,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentDto {
    pub doc_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub doc_ids: Vec<String>,
    pub documents: Vec<DocumentDto>,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concept_count: Option<usize>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn unavailable() -> Self {
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "index is still being built")
    }

    fn internal() -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal error")
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::TokenLimit { .. } => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            Error::Invalid(_)
            | Error::UnknownConcept(_)
            | Error::UnknownPredicate(_)
            | Error::PairConflict(..)
            | Error::MissingEndpoint(_) => ApiError::bad_request(e.to_string()),
            other => {
                tracing::error!(error = %other, "request failed");
                ApiError::internal()
            }
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

fn engine(state: &AppState) -> Result<Arc<Engine>, ApiError> {
    state.engine.get().cloned().ok_or_else(ApiError::unavailable)
}

pub(crate) async fn health(State(state): State<Arc<AppState>>) -> (StatusCode, Json<HealthResponse>) {
    match state.engine.get() {
        Some(engine) => (
            StatusCode::OK,
            Json(HealthResponse {
                status: "ok".into(),
                doc_count: Some(engine.document_count()),
                concept_count: Some(engine.ontology().len()),
            }),
        ),
        None => (
            StatusCode::SERVICE_UNAVAILABLE,
            Json(HealthResponse {
                status: "starting".into(),
                doc_count: None,
                concept_count: None,
            }),
        ),
    }
}

pub(crate) async fn translate(
    State(state): State<Arc<AppState>>,
    body: Result<Json<TranslateRequest>, JsonRejection>,
) -> Result<Json<TranslateResponse>, ApiError> {
    let Json(req) = body?;
    let engine = engine(&state)?;
    if req.keywords.trim().is_empty() {
        return Err(ApiError::bad_request("keywords must not be empty"));
    }
    let mut opts = state.translation.clone();
    if let Some(tau) = req.options.tau {
        opts.tau = tau;
    }
    if let Some(p) = req.options.consider_permutations {
        opts.consider_permutations = p;
    }
    let strategy = state.strategy;
    let response = tokio::task::spawn_blocking(move || translate_with(&engine, &req.keywords, &opts, &strategy))
        .await
        .map_err(|e| {
            tracing::error!(error = %e, "translation task failed");
            ApiError::internal()
        })??;
    Ok(Json(response))
}

/// Translation plus candidate panel, as returned by `POST /api/translate`.
pub fn translate_with(
    engine: &Engine,
    keywords: &str,
    opts: &TranslationOptions,
    strategy: &StrategyOptions,
) -> Result<TranslateResponse, Error> {
    let translation = engine.translate(keywords, opts)?;
    let panel = candidate_panel_with(&translation.queries, engine.collection(), engine.hierarchy(), strategy);
    let candidates = panel
        .iter()
        .map(|c| CandidateDto {
            strategy: c.strategy,
            query: c.query.query.clone(),
            key: c.query.query.canonical_key(),
            labels: engine.labels(&c.query.query),
            result_count: c.result_count,
            excluded_tokens: c.query.excluded_tokens.clone(),
        })
        .collect();
    Ok(TranslateResponse {
        excluded_tokens: unused_tokens(translation.tokens(), &translation.queries),
        tokens: translation.tokens().to_vec(),
        candidates,
        query_count: translation.queries.len(),
        truncated: translation.truncated,
    })
}

fn unused_tokens(tokens: &[String], queries: &[GeneratedQuery]) -> Vec<String> {
    let mut used = BTreeSet::new();
    for q in queries {
        used.extend(q.concept_spans.iter().flat_map(|(span, _)| span.indices.iter().copied()));
        used.extend(q.predicate_spans.iter().flat_map(|(span, _)| span.indices.iter().copied()));
        used.extend(q.term_tokens.iter().copied());
    }
    tokens
        .iter()
        .enumerate()
        .filter(|(i, _)| !used.contains(i))
        .map(|(_, t)| t.clone())
        .collect()
}

pub(crate) async fn search(
    State(state): State<Arc<AppState>>,
    body: Result<Json<SearchRequest>, JsonRejection>,
) -> Result<Json<SearchResponse>, ApiError> {
    let Json(SearchRequest { query }) = body?;
    let engine = engine(&state)?;
    Ok(Json(search_with(&engine, &query)?))
}

/// Validates and answers `query`, as returned by `POST /api/search`.
pub fn search_with(engine: &Engine, query: &NarrativeQuery) -> Result<SearchResponse, Error> {
    if query.is_empty() {
        return Err(Error::Invalid("query must contain a statement, concept or term".into()));
    }
    engine.validate_query(query)?;
    let doc_ids = engine.answers(query);
    // The engine guarantees that every indexed document is loaded.
    let documents = doc_ids
        .iter()
        .filter_map(|id| engine.document(id))
        .map(|d| DocumentDto {
            doc_id: d.doc_id.clone(),
            title: d.title.clone(),
            abstract_text: d.abstract_text.clone(),
        })
        .collect();
    Ok(SearchResponse {
        total: doc_ids.len(),
        doc_ids,
        documents,
    })
}
