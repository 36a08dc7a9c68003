//! HTTP API over the sessions of one directory.
//!
//! Reads work on immutable session snapshots. Writes for one session are
//! serialised through that session's writer lock: clone the snapshot, apply
//! the change, persist it, then publish the new snapshot.

use std::collections::BTreeMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use anyhow::Context;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::{Deserialize, Serialize};

use concordia_core::analysis::{partition, MatchMode, PartitionReport};
use concordia_core::export::{export_concept_sheet, export_element_sheet, export_matrix, resolve_pair};
use concordia_core::filters::{apply, node_filter, FilterSpec, ScoreRange};
use concordia_core::session::{
    load_session, save_session, Annotation, ConceptLabel, ConceptMatch, DecisionRequest, DecisionStatus, MatchDecision,
    Session,
};
use concordia_core::{ElementSet, Error, Schema};

pub struct SessionSlot {
    path: PathBuf,
    snapshot: RwLock<Arc<Session>>,
    writer: tokio::sync::Mutex<()>,
}

impl SessionSlot {
    pub fn snapshot(&self) -> Arc<Session> {
        self.snapshot.read().expect("snapshot lock poisoned").clone()
    }

    /// Applies `f` to a copy of the session, saves it and publishes it.
    async fn update<T>(&self, f: impl FnOnce(&mut Session) -> Result<T, Error>) -> Result<T, ApiError> {
        let _guard = self.writer.lock().await;
        let mut next = (*self.snapshot()).clone();
        let out = f(&mut next)?;
        save_session(&next, &self.path).map_err(|e| ApiError::internal(format!("cannot persist session: {e}")))?;
        *self.snapshot.write().expect("snapshot lock poisoned") = Arc::new(next);
        Ok(out)
    }
}

/// Sessions keyed by session id.
#[derive(Clone, Default)]
pub struct Store {
    sessions: Arc<BTreeMap<String, Arc<SessionSlot>>>,
}

impl Store {
    /// Loads every session file (`*.json` with an event log) in `dir`.
    pub fn open(dir: &Path) -> anyhow::Result<Store> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("cannot read {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        let mut sessions = BTreeMap::new();
        for p in paths {
            let Ok(text) = fs::read_to_string(&p) else { continue };
            let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) else { continue };
            if value.get("events").is_none() {
                continue;
            }
            let s = load_session(&p).with_context(|| format!("cannot load session {}", p.display()))?;
            let id = s.id().to_owned();
            if sessions.contains_key(&id) {
                anyhow::bail!("two session files share the id `{id}`");
            }
            sessions.insert(id, Self::slot(p, s));
        }
        Ok(Store {
            sessions: Arc::new(sessions),
        })
    }

    /// Store over already loaded sessions; writes go to `path`.
    pub fn from_sessions(sessions: impl IntoIterator<Item = (PathBuf, Session)>) -> Store {
        Store {
            sessions: Arc::new(
                sessions
                    .into_iter()
                    .map(|(p, s)| (s.id().to_owned(), Self::slot(p, s)))
                    .collect(),
            ),
        }
    }

    fn slot(path: PathBuf, s: Session) -> Arc<SessionSlot> {
        Arc::new(SessionSlot {
            path,
            snapshot: RwLock::new(Arc::new(s)),
            writer: tokio::sync::Mutex::new(()),
        })
    }

    pub fn session_ids(&self) -> impl Iterator<Item = &str> {
        self.sessions.keys().map(String::as_str)
    }

    fn get(&self, id: &str) -> Result<&Arc<SessionSlot>, ApiError> {
        self.sessions
            .get(id)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownElement(_)
            | Error::UnknownSchema(_)
            | Error::UnknownConcept(_)
            | Error::UnknownPair { .. } => StatusCode::NOT_FOUND,
            Error::ConceptConflict { .. } | Error::IllegalTransition { .. } => StatusCode::CONFLICT,
            Error::Range { .. }
            | Error::InvalidArgument(_)
            | Error::UnknownVoter(_)
            | Error::Config(_)
            | Error::PairBudget { .. }
            | Error::MissingPairs(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: &self.message })).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/schemas", get(list_schemas))
        .route("/schemas/{id}/tree", get(schema_tree))
        .route("/sessions", get(list_sessions))
        .route("/sessions/{id}/links", get(links))
        .route("/sessions/{id}/decisions", post(post_decision))
        .route("/sessions/{id}/concepts", get(list_concepts).post(post_concept))
        .route("/sessions/{id}/incremental-match", post(incremental_match))
        .route("/sessions/{id}/partition", get(get_partition))
        .route("/sessions/{id}/concept-matches", get(concept_matches))
        .route("/sessions/{id}/export/{kind}", get(export))
        .with_state(store)
}

pub async fn serve(store: Store, addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("cannot listen on {addr}"))?;
    tracing::info!("serving {} session(s) on {}", store.sessions.len(), listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .context("server failed")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SchemaInfo {
    id: String,
    name: String,
    source_format: &'static str,
    element_count: usize,
    sessions: Vec<String>,
}

async fn list_schemas(State(store): State<Store>) -> Json<Vec<SchemaInfo>> {
    let mut by_id: BTreeMap<String, SchemaInfo> = BTreeMap::new();
    for (sid, slot) in store.sessions.iter() {
        for s in slot.snapshot().schemas() {
            by_id
                .entry(s.id.to_string())
                .or_insert_with(|| SchemaInfo {
                    id: s.id.to_string(),
                    name: s.name.clone(),
                    source_format: s.source_format.as_str(),
                    element_count: s.element_count(),
                    sessions: Vec::new(),
                })
                .sessions
                .push(sid.clone());
        }
    }
    Json(by_id.into_values().collect())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TreeNode {
    id: String,
    name: String,
    documentation: String,
    type_hint: String,
    depth: u32,
    path: String,
    children: Vec<TreeNode>,
}

fn tree(schema: &Schema, idx: usize) -> TreeNode {
    let e = schema.element(idx);
    TreeNode {
        id: e.id.to_string(),
        name: e.name.clone(),
        documentation: e.documentation.clone(),
        type_hint: e.type_hint.clone(),
        depth: e.depth,
        path: e.path.clone(),
        children: schema.children(idx).iter().map(|&c| tree(schema, c)).collect(),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SchemaTree {
    id: String,
    name: String,
    source_format: &'static str,
    roots: Vec<TreeNode>,
}

async fn schema_tree(State(store): State<Store>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<SchemaTree>> {
    for slot in store.sessions.values() {
        let snap = slot.snapshot();
        if let Ok(s) = snap.schema(&id) {
            return Ok(Json(SchemaTree {
                id: s.id.to_string(),
                name: s.name.clone(),
                source_format: s.source_format.as_str(),
                roots: s.roots().map(|r| tree(s, r)).collect(),
            }));
        }
    }
    Err(Error::UnknownSchema(id).into())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionInfo {
    id: String,
    schemas: Vec<String>,
    pairs: Vec<[String; 2]>,
    decisions: usize,
    concepts: usize,
    review_threshold: f64,
}

async fn list_sessions(State(store): State<Store>) -> Json<Vec<SessionInfo>> {
    Json(
        store
            .sessions
            .iter()
            .map(|(id, slot)| {
                let s = slot.snapshot();
                SessionInfo {
                    id: id.clone(),
                    schemas: s.schemas().map(|x| x.id.to_string()).collect(),
                    pairs: s.pairs().map(|(l, r)| [l.to_string(), r.to_string()]).collect(),
                    decisions: s.decisions().count(),
                    concepts: s.concepts().count(),
                    review_threshold: s.review_threshold(),
                }
            })
            .collect(),
    )
}

#[derive(Debug, Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LinkQuery {
    min_score: Option<f64>,
    max_score: Option<f64>,
    left_subtree: Option<String>,
    right_subtree: Option<String>,
    depth_min: Option<u32>,
    depth_max: Option<u32>,
    sort: Option<String>,
    order: Option<String>,
    offset: Option<usize>,
    limit: Option<usize>,
    left: Option<String>,
    right: Option<String>,
}

pub const DEFAULT_PAGE: usize = 100;
pub const MAX_PAGE: usize = 10_000;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkRow {
    pub left_id: String,
    pub right_id: String,
    pub left_path: String,
    pub right_path: String,
    pub left_concept: Option<String>,
    pub right_concept: Option<String>,
    pub score: f64,
    pub status: DecisionStatus,
    pub annotation: Option<Annotation>,
    pub assignee: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LinkPage {
    left_schema_id: String,
    right_schema_id: String,
    total: usize,
    offset: usize,
    limit: usize,
    links: Vec<LinkRow>,
}

fn pair_param<'a>(left: &'a Option<String>, right: &'a Option<String>) -> ApiResult<Option<(&'a str, &'a str)>> {
    match (left, right) {
        (Some(l), Some(r)) => Ok(Some((l.as_str(), r.as_str()))),
        (None, None) => Ok(None),
        _ => Err(ApiError::bad_request("`left` and `right` go together")),
    }
}

fn node_set(schema: &Schema, subtree: Option<&str>, depth: Option<(u32, u32)>) -> ApiResult<Option<ElementSet>> {
    let mut set: Option<ElementSet> = None;
    if let Some(root) = subtree {
        if !schema.contains(root) {
            // an element of the other schema, or nothing at all
            return Err(ApiError::bad_request(format!(
                "subtree root `{root}` is not an element of `{}`",
                schema.id
            )));
        }
        set = Some(node_filter(
            schema,
            &FilterSpec::Subtree {
                schema_id: schema.id.clone(),
                root_element_id: root.into(),
            },
        )?);
    }
    if let Some((lo, hi)) = depth {
        let d = node_filter(schema, &FilterSpec::Depth { lo, hi }).map_err(|e| ApiError::bad_request(e.to_string()))?;
        set = Some(match set {
            Some(s) => s.intersection(&d).copied().collect(),
            None => d,
        });
    }
    Ok(set)
}

fn link_rows(session: &Session, q: &LinkQuery) -> ApiResult<(String, String, Vec<LinkRow>)> {
    let pair = pair_param(&q.left, &q.right)?;
    let Some((l, r)) = resolve_pair(session, pair).map_err(|e| match e {
        Error::InvalidArgument(m) => ApiError::bad_request(m),
        other => other.into(),
    })?
    else {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "session has no matched schema pair"));
    };
    let (m, flipped) = session.matrix_between(l.as_str(), r.as_str()).expect("pair resolved");
    let transposed;
    let m = if flipped {
        transposed = m.transpose();
        &transposed
    } else {
        m.as_ref()
    };

    let lo = q.min_score.unwrap_or(-1.0);
    let hi = q.max_score.unwrap_or(1.0);
    let range = ScoreRange::new(lo, hi).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let depth = match (q.depth_min, q.depth_max) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(1), b.unwrap_or(u32::MAX))),
    };
    let left_nodes = node_set(m.left(), q.left_subtree.as_deref(), depth)?;
    let right_nodes = node_set(m.right(), q.right_subtree.as_deref(), depth)?;
    let links = apply(m, &[range], left_nodes.as_ref(), right_nodes.as_ref());

    let mut rows: Vec<LinkRow> = links
        .iter()
        .map(|link| {
            let (le, re) = (m.left().element(link.left), m.right().element(link.right));
            let d = session.decision(le.id.as_str(), re.id.as_str());
            LinkRow {
                left_id: le.id.to_string(),
                right_id: re.id.to_string(),
                left_path: le.path.clone(),
                right_path: re.path.clone(),
                left_concept: session.concept_of(le.id.as_str()).map(|c| c.id.to_string()),
                right_concept: session.concept_of(re.id.as_str()).map(|c| c.id.to_string()),
                score: link.score,
                status: d.map_or(DecisionStatus::Candidate, |d| d.status),
                annotation: d.map(|d| d.annotation),
                assignee: d.map(|d| d.assignee.clone()).unwrap_or_default(),
            }
        })
        .collect();

    // `links` is already in score order; stable sorts keep it as the tie-break
    let descending = match q.order.as_deref() {
        None => None,
        Some("asc") => Some(false),
        Some("desc") => Some(true),
        Some(o) => return Err(ApiError::bad_request(format!("unknown order `{o}`"))),
    };
    match q.sort.as_deref().unwrap_or("score") {
        "score" => {
            if descending == Some(false) {
                rows.reverse();
                rows.sort_by(|a, b| a.score.total_cmp(&b.score));
            }
        }
        key @ ("status" | "leftPath" | "rightPath" | "assignee") => {
            let k = |r: &LinkRow| -> (u8, String) {
                match key {
                    "status" => (r.status as u8, String::new()),
                    "leftPath" => (0, r.left_path.clone()),
                    "rightPath" => (0, r.right_path.clone()),
                    _ => (0, r.assignee.clone()),
                }
            };
            if descending == Some(true) {
                rows.sort_by_cached_key(|r| std::cmp::Reverse(k(r)));
            } else {
                rows.sort_by_cached_key(k);
            }
        }
        other => return Err(ApiError::bad_request(format!("unknown sort key `{other}`"))),
    }
    Ok((l.to_string(), r.to_string(), rows))
}

async fn links(
    State(store): State<Store>,
    UrlPath(id): UrlPath<String>,
    query: Result<Query<LinkQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<LinkPage>> {
    let Query(q) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let session = store.get(&id)?.snapshot();
    let limit = q.limit.unwrap_or(DEFAULT_PAGE);
    if limit == 0 || limit > MAX_PAGE {
        return Err(ApiError::bad_request(format!("limit must be in 1..={MAX_PAGE}")));
    }
    let offset = q.offset.unwrap_or(0);
    let (left, right, rows) = link_rows(&session, &q)?;
    let total = rows.len();
    Ok(Json(LinkPage {
        left_schema_id: left,
        right_schema_id: right,
        total,
        offset,
        limit,
        links: rows.into_iter().skip(offset).take(limit).collect(),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DecisionBody {
    left_id: String,
    right_id: String,
    status: DecisionStatus,
    #[serde(default)]
    annotation: Annotation,
    #[serde(default)]
    author: String,
    #[serde(default)]
    assignee: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DecisionView {
    left_id: String,
    right_id: String,
    status: DecisionStatus,
    annotation: Annotation,
    author: String,
    assignee: String,
    timestamp: chrono::DateTime<Utc>,
}

impl From<MatchDecision> for DecisionView {
    fn from(d: MatchDecision) -> Self {
        Self {
            left_id: d.left_id.to_string(),
            right_id: d.right_id.to_string(),
            status: d.status,
            annotation: d.annotation,
            author: d.author,
            assignee: d.assignee,
            timestamp: d.timestamp,
        }
    }
}

fn json_body<T>(body: Result<Json<T>, axum::extract::rejection::JsonRejection>) -> ApiResult<T> {
    body.map(|Json(b)| b).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn post_decision(
    State(store): State<Store>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<DecisionBody>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Json<DecisionView>> {
    let b = json_body(body)?;
    let slot = store.get(&id)?;
    let d = slot
        .update(|s| {
            s.record_decision(DecisionRequest {
                left_id: b.left_id.into(),
                right_id: b.right_id.into(),
                status: b.status,
                annotation: b.annotation,
                author: b.author,
                assignee: b.assignee,
                timestamp: Utc::now(),
            })
        })
        .await?;
    Ok(Json(d.into()))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ConceptBody {
    schema_id: String,
    name: String,
    element_ids: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConceptViewJson {
    id: String,
    name: String,
    schema_id: String,
    members: Vec<String>,
}

impl From<&ConceptLabel> for ConceptViewJson {
    fn from(c: &ConceptLabel) -> Self {
        Self {
            id: c.id.to_string(),
            name: c.name.clone(),
            schema_id: c.schema_id.to_string(),
            members: c.members.iter().map(|m| m.to_string()).collect(),
        }
    }
}

async fn list_concepts(State(store): State<Store>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Vec<ConceptViewJson>>> {
    let s = store.get(&id)?.snapshot();
    Ok(Json(s.concepts().map(ConceptViewJson::from).collect()))
}

async fn post_concept(
    State(store): State<Store>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<ConceptBody>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Json<ConceptViewJson>> {
    let b = json_body(body)?;
    let ids: Vec<_> = b.element_ids.into_iter().map(Into::into).collect();
    let label = store
        .get(&id)?
        .update(|s| s.assign_concept(&b.schema_id, &b.name, &ids))
        .await?;
    Ok(Json((&label).into()))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct IncrementalBody {
    concept_id: String,
    opposing_schema_id: Option<String>,
    min_score: Option<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct IncrementalView {
    concept_id: String,
    concept_schema_id: String,
    opposing_schema_id: String,
    considered: usize,
    links: Vec<LinkRow>,
}

async fn incremental_match(
    State(store): State<Store>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<IncrementalBody>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Json<IncrementalView>> {
    let b = json_body(body)?;
    let s = store.get(&id)?.snapshot();
    let r = s.incremental_match(&b.concept_id, b.opposing_schema_id.as_deref(), b.min_score)?;
    let (own, other) = (s.schema(r.concept_schema.as_str())?, s.schema(r.opposing_schema.as_str())?);
    let links = r
        .links
        .iter()
        .map(|l| {
            let (le, re) = (own.element(l.left), other.element(l.right));
            let d = s.decision(le.id.as_str(), re.id.as_str());
            LinkRow {
                left_id: le.id.to_string(),
                right_id: re.id.to_string(),
                left_path: le.path.clone(),
                right_path: re.path.clone(),
                left_concept: s.concept_of(le.id.as_str()).map(|c| c.id.to_string()),
                right_concept: s.concept_of(re.id.as_str()).map(|c| c.id.to_string()),
                score: l.score,
                status: d.map_or(DecisionStatus::Candidate, |d| d.status),
                annotation: d.map(|d| d.annotation),
                assignee: d.map(|d| d.assignee.clone()).unwrap_or_default(),
            }
        })
        .collect();
    Ok(Json(IncrementalView {
        concept_id: b.concept_id,
        concept_schema_id: r.concept_schema.to_string(),
        opposing_schema_id: r.opposing_schema.to_string(),
        considered: r.considered,
        links,
    }))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct PartitionQuery {
    mode: Option<String>,
    threshold: Option<f64>,
    left: Option<String>,
    right: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SideView {
    schema_id: String,
    element_count: usize,
    common_count: usize,
    only_count: usize,
    common_percent: u32,
    only_percent: u32,
    common: Vec<String>,
    only: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PartitionView {
    mode: &'static str,
    threshold: Option<f64>,
    left: SideView,
    right: SideView,
    common_pairs: Vec<[String; 2]>,
}

impl From<PartitionReport> for PartitionView {
    fn from(p: PartitionReport) -> Self {
        let side = |s: concordia_core::analysis::SidePartition| SideView {
            schema_id: s.schema_id.to_string(),
            element_count: s.element_count,
            common_count: s.common.len(),
            only_count: s.only.len(),
            common_percent: s.common_percent,
            only_percent: s.only_percent,
            common: s.common.iter().map(|e| e.to_string()).collect(),
            only: s.only.iter().map(|e| e.to_string()).collect(),
        };
        let (mode, threshold) = match p.mode {
            MatchMode::Validated => ("validated", None),
            MatchMode::Automatic { threshold } => ("automatic", Some(threshold)),
        };
        PartitionView {
            mode,
            threshold,
            left: side(p.left),
            right: side(p.right),
            common_pairs: p.common_pairs.into_iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        }
    }
}

async fn get_partition(
    State(store): State<Store>,
    UrlPath(id): UrlPath<String>,
    query: Result<Query<PartitionQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<PartitionView>> {
    let Query(q) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let s = store.get(&id)?.snapshot();
    let mode = match q.mode.as_deref().unwrap_or("validated") {
        "validated" => MatchMode::Validated,
        "automatic" => MatchMode::Automatic {
            threshold: q.threshold.unwrap_or(s.review_threshold()),
        },
        other => return Err(ApiError::bad_request(format!("unknown mode `{other}`"))),
    };
    let pair = pair_param(&q.left, &q.right)?;
    let (l, r) = resolve_pair(&s, pair)?
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "session has no matched schema pair"))?;
    Ok(Json(partition(&s, l.as_str(), r.as_str(), mode)?.into()))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConceptMatchView {
    left_concept: String,
    right_concept: String,
    support: usize,
}

impl From<ConceptMatch> for ConceptMatchView {
    fn from(m: ConceptMatch) -> Self {
        Self {
            left_concept: m.left_concept.to_string(),
            right_concept: m.right_concept.to_string(),
            support: m.support,
        }
    }
}

async fn concept_matches(State(store): State<Store>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Vec<ConceptMatchView>>> {
    let s = store.get(&id)?.snapshot();
    Ok(Json(s.derive_concept_matches().into_iter().map(Into::into).collect()))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ExportQuery {
    min_score: Option<f64>,
    left: Option<String>,
    right: Option<String>,
}

async fn export(
    State(store): State<Store>,
    UrlPath((id, kind)): UrlPath<(String, String)>,
    query: Result<Query<ExportQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let s = store.get(&id)?.snapshot();
    let pair = pair_param(&q.left, &q.right)?;
    let text = match kind.as_str() {
        "concepts" => export_concept_sheet(&s, pair)?,
        "elements" => export_element_sheet(&s, pair)?,
        "matrix" => {
            let (l, r) = resolve_pair(&s, pair)?
                .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "session has no matched schema pair"))?;
            let (m, flipped) = s.matrix_between(l.as_str(), r.as_str()).expect("pair resolved");
            let lo = q.min_score.unwrap_or(s.review_threshold());
            if flipped {
                export_matrix(&m.transpose(), lo)?
            } else {
                export_matrix(m, lo)?
            }
        }
        other => return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown export `{other}`"))),
    };
    Ok((
        [
            (header::CONTENT_TYPE, "text/csv; charset=utf-8".to_owned()),
            (header::CONTENT_DISPOSITION, format!("attachment; filename=\"{kind}.csv\"")),
        ],
        text,
    )
        .into_response())
}
