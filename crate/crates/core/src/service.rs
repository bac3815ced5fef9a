//! Stateless JSON API over the engine, the generator and the bundled
//! corpora, plus static file serving for a browser front end.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::corpora::{list_corpora, load_corpus, CorpusError};
use crate::engine::{forward_chain, ModelSummary, ProofTree};
use crate::explain::{english_sentences, english_statement, explain, Explanation};
use crate::generator::{generate_theory, theory_rng, DiscardStats, GenerateError};
use crate::logic::{Theory, TheoryType};
use crate::questions::{generate_questions, Provenance, QuestionOptions};
use crate::render::{render_question, render_theory};
use crate::syntax::{emit_literal, emit_theory, parse_literal, parse_theory, SourceSpan, SyntaxError};

/// Largest depth `/v1/generate` accepts.
pub const MAX_GENERATE_DEPTH: u32 = 6;
pub const MAX_GENERATE_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCap {
    pub sentences: usize,
    pub entities: usize,
}

impl Default for SizeCap {
    fn default() -> SizeCap {
        SizeCap { sentences: 200, entities: 12 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub size_cap: SizeCap,
    /// Served under `/` when set.
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status, body: ErrorBody { error, message: message.into(), field: None, span: None } }
    }

    fn syntax(field: &'static str, e: SyntaxError) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody { error: "syntax", message: e.message, field: Some(field), span: Some(e.span) },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProveRequest {
    /// Statement-format theory text.
    pub theory: String,
    /// One ground statement such as `("Bob" "is" "green" "+")`.
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProveResponse {
    #[serde(flatten)]
    pub explanation: Explanation,
    /// English per sentence index.
    pub sentences: Vec<String>,
    pub statement_english: String,
}

/// Parses and answers one request, enforcing the size cap.
pub fn prove(req: &ProveRequest, cap: SizeCap) -> Result<ProveResponse, ApiError> {
    let theory = parse_theory(&req.theory).map_err(|e| ApiError::syntax("theory", e))?;
    let statement = parse_literal(&req.statement).map_err(|e| ApiError::syntax("statement", e))?;
    if !statement.is_ground() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "non_ground", "the statement must name an entity"));
    }
    check_size(&theory, cap)?;
    let model = forward_chain(&theory);
    let explanation = explain(&model, &statement)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "engine", e.to_string()))?;
    Ok(ProveResponse {
        explanation,
        sentences: english_sentences(&theory),
        statement_english: english_statement(&statement),
    })
}

fn check_size(theory: &Theory, cap: SizeCap) -> Result<(), ApiError> {
    let entities = theory.signature().names.len();
    if theory.len() > cap.sentences || entities > cap.entities {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "too_large",
            format!(
                "theory has {} sentences and {entities} entities; the limit is {} and {}",
                theory.len(),
                cap.sentences,
                cap.entities
            ),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateRequest {
    #[serde(rename = "type")]
    pub theory_type: TheoryType,
    #[serde(alias = "negation")]
    pub neg: bool,
    pub depth: u32,
    pub seed: u64,
    #[serde(default = "default_attempts")]
    pub max_attempts: usize,
    #[serde(default)]
    pub oversample_blind_spot: bool,
}

fn default_attempts() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedQuestion {
    pub statement: String,
    pub question: String,
    pub answer: bool,
    pub depth: u32,
    pub provenance: Provenance,
    pub proofs: Vec<ProofTree>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateResponse {
    pub theory: String,
    pub context: String,
    pub sentences: Vec<String>,
    pub questions: Vec<GeneratedQuestion>,
    pub summary: ModelSummary,
    pub attempts: usize,
    pub discards: DiscardStats,
}

pub fn generate(req: &GenerateRequest) -> Result<GenerateResponse, ApiError> {
    if req.depth > MAX_GENERATE_DEPTH {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_config",
            format!("depth {} is above the limit of {MAX_GENERATE_DEPTH}", req.depth),
        ));
    }
    if req.max_attempts == 0 || req.max_attempts > MAX_GENERATE_ATTEMPTS {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_config",
            format!("max_attempts must be in 1..={MAX_GENERATE_ATTEMPTS}"),
        ));
    }
    let mut rng = theory_rng(req.seed, 0);
    let g = generate_theory(req.theory_type, req.neg, req.depth, req.max_attempts, &mut rng).map_err(|e| match e {
        GenerateError::AttemptsExhausted { .. } => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "attempts_exhausted", e.to_string())
        }
    })?;
    let options = QuestionOptions { oversample_blind_spot: req.oversample_blind_spot };
    let questions = generate_questions(&g.theory, &g.model, req.depth, options, &mut rng);
    let rendered = render_theory(&g.theory, &mut rng);
    let questions = questions
        .iter()
        .map(|q| {
            let target = match q.provenance {
                Provenance::Proven => Some(q.statement.clone()),
                Provenance::NegatedProven => Some(q.statement.negated()),
                Provenance::CwaFalse | Provenance::FlippedTrue => None,
            };
            GeneratedQuestion {
                statement: emit_literal(&q.statement),
                question: render_question(&q.statement),
                answer: q.answer,
                depth: q.depth,
                provenance: q.provenance,
                proofs: target.map_or_else(Vec::new, |t| g.model.proofs(&t).iter().map(|p| p.to_tree()).collect()),
            }
        })
        .collect();
    Ok(GenerateResponse {
        theory: emit_theory(&g.theory),
        context: rendered.context,
        sentences: rendered.sentences,
        questions,
        summary: g.model.summary(),
        attempts: g.attempts,
        discards: g.discards,
    })
}

async fn prove_handler(State(cfg): State<Arc<ServiceConfig>>, body: Bytes) -> Result<Json<ProveResponse>, ApiError> {
    let req: ProveRequest = parse_body(&body)?;
    let cap = cfg.size_cap;
    let out = tokio::task::spawn_blocking(move || prove(&req, cap))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(out))
}

async fn generate_handler(body: Bytes) -> Result<Json<GenerateResponse>, ApiError> {
    let req: GenerateRequest = parse_body(&body)?;
    let out = tokio::task::spawn_blocking(move || generate(&req))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(out))
}

async fn corpora_handler() -> Response {
    Json(list_corpora()).into_response()
}

async fn corpus_handler(Path(name): Path<String>) -> Result<Response, ApiError> {
    match load_corpus(&name) {
        Ok(c) => Ok(Json(c).into_response()),
        Err(e @ CorpusError::UnknownCorpus(_)) => {
            Err(ApiError::new(StatusCode::NOT_FOUND, "unknown_corpus", e.to_string()))
        }
        Err(e) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "corpus", e.to_string())),
    }
}

pub fn router(config: ServiceConfig) -> Router {
    let static_dir = config.static_dir.clone();
    let api = Router::new()
        .route("/v1/prove", post(prove_handler))
        .route("/v1/generate", post(generate_handler))
        .route("/v1/corpora", get(corpora_handler))
        .route("/v1/corpora/{name}", get(corpus_handler))
        .with_state(Arc::new(config));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}
