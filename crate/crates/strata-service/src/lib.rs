//! HTTP sessions over proof documents.
//!
//! A session holds a document, the current diagram and the steps applied
//! since the proof's start. Mutations on one session are serialized by its
//! lock; distinct sessions are independent.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use serde_json::json;

use strata::diagram::globular;
use strata::homotopy::{
    interchange_redexes, pullthrough_variant, Composite, Direction, Family, MoveKind, MoveLocation,
};
use strata::proofdoc::{
    check_document, checked_step, parse_document, serialize_document, DiagramExpr, MoveSpec, Proof, ProofDocument,
    Step,
};
use strata::render::{project, Scene};
use strata::{Diagram, Signature};

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("no session `{0}`")]
    NotFound(String),
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("{message}")]
    Unprocessable { kind: &'static str, message: String, detail: serde_json::Value },
    #[error("{0}")]
    Conflict(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, detail) = match &self {
            ApiError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found", serde_json::Value::Null),
            ApiError::BadRequest(_) => (StatusCode::BAD_REQUEST, "bad_request", serde_json::Value::Null),
            ApiError::Unprocessable { kind, detail, .. } => (StatusCode::UNPROCESSABLE_ENTITY, *kind, detail.clone()),
            ApiError::Conflict(_) => (StatusCode::CONFLICT, "inapplicable", serde_json::Value::Null),
        };
        let mut body = json!({ "error": kind, "message": self.to_string() });
        if !detail.is_null() {
            body["detail"] = detail;
        }
        (status, Json(body)).into_response()
    }
}

pub struct Session {
    pub doc: ProofDocument,
    /// The document's signature plus every move cell synthesized so far.
    pub sig: Signature,
    pub start: Diagram,
    pub state: Diagram,
    /// Applied steps with the state each one replaced.
    pub history: Vec<(Step, Diagram)>,
}

impl Session {
    /// Checks the document's own proof, then starts a fresh session at its
    /// start diagram.
    pub fn open(text: &str) -> Result<Session, ApiError> {
        let doc = parse_document(text).map_err(|e| {
            let detail = match &e {
                strata::proofdoc::DocError::Syntax { line, column, .. } => json!({ "line": line, "column": column }),
                _ => serde_json::Value::Null,
            };
            ApiError::Unprocessable { kind: "parse", message: e.to_string(), detail }
        })?;
        let report = check_document(&doc);
        if !report.ok() {
            let detail = serde_json::to_value(&report).unwrap_or_default();
            return Err(ApiError::Unprocessable { kind: "check", message: report.to_string(), detail });
        }
        let proof = doc.proof.as_ref().expect("a passing report has a proof");
        let start = doc.diagrams[&proof.start].clone();
        Ok(Session { sig: doc.signature.clone(), state: start.clone(), start, history: Vec::new(), doc })
    }

    fn proof(&self) -> &Proof {
        self.doc.proof.as_ref().expect("sessions always have a proof")
    }

    pub fn summary(&self, id: &str) -> StateSummary {
        let proof = self.proof();
        StateSummary {
            session: id.to_string(),
            start: proof.start.clone(),
            goal: proof.goal.clone(),
            diagram: DiagramExpr::from_diagram(&self.state),
            dim: self.state.dim(),
            height: self.state.height(),
            steps: self.history.len(),
            goal_reached: self.state == self.doc.diagrams[&proof.goal],
        }
    }

    /// Applies `step` if it keeps the state well-defined and parallel to the
    /// start; otherwise the state is untouched. Move cells synthesized on
    /// the way stay in the signature either way.
    pub fn apply(&mut self, step: Step) -> Result<(), ApiError> {
        let next = try_step(&mut self.sig, &self.start, &self.state, &step)?;
        let prev = std::mem::replace(&mut self.state, next);
        self.history.push((step, prev));
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), ApiError> {
        let (_, prev) = self.history.pop().ok_or_else(|| ApiError::Conflict("nothing to undo".into()))?;
        self.state = prev;
        Ok(())
    }

    /// Moves applicable at `loc`, each checked by a trial application.
    pub fn moves(&self, loc: &MoveLocation) -> Vec<MoveOption> {
        let mut out = Vec::new();
        for spec in self.candidates(loc) {
            let step = Step::Homotopy(spec);
            if let Ok(next) = try_step(&mut self.sig.clone(), &self.start, &self.state, &step) {
                out.push(MoveOption { label: step.label(), height: next.height(), step });
            }
        }
        out
    }

    fn candidates(&self, loc: &MoveLocation) -> Vec<MoveSpec> {
        let d = &self.state;
        let h = loc.height;
        let spec = |kind: MoveKind, location: MoveLocation, direction: Direction| MoveSpec {
            kind,
            location,
            direction,
            variant: None,
            mu: None,
        };
        let mut out = Vec::new();
        for (i, c) in interchange_redexes(&self.sig, d).unwrap_or_default() {
            if i == h {
                let kind = MoveKind::new(Family::I).inverse(c.is_inverse());
                out.push(spec(kind, MoveLocation::at(h), Direction::Forward));
            }
        }
        for dir in [Direction::Forward, Direction::Backward] {
            if let Ok(v) = pullthrough_variant(&self.sig, d, h, dir) {
                let kind = MoveKind::new(Family::II).primed(v.is_primed());
                out.push(MoveSpec { variant: Some(v), ..spec(kind, MoveLocation::at(h), dir) });
            }
        }
        let c = &loc.coords;
        if c.len() >= 2 {
            for inverse in [false, true] {
                let kind = MoveKind::new(Family::I).composite(Composite::Tilde).inverse(inverse);
                out.push(spec(kind, loc.clone(), Direction::Forward));
            }
            for primed in [false, true] {
                for dir in [Direction::Forward, Direction::Backward] {
                    let kind = MoveKind::new(Family::II).composite(Composite::Tilde).primed(primed);
                    out.push(spec(kind, loc.clone(), dir));
                }
            }
        }
        if !c.is_empty() {
            out.push(spec(MoveKind::new(Family::I).composite(Composite::Hat), loc.clone(), Direction::Forward));
            let mus: Vec<_> = self.sig.level(d.dim()).iter().cloned().map(Some).chain([None]).collect();
            for family in [Family::III, Family::IV, Family::V, Family::VI] {
                for primed in [false, true] {
                    for dir in [Direction::Forward, Direction::Backward] {
                        let kind = MoveKind::new(family).primed(primed);
                        if family == Family::III {
                            for mu in &mus {
                                out.push(MoveSpec { mu: mu.clone(), ..spec(kind, loc.clone(), dir) });
                            }
                        } else {
                            out.push(spec(kind, loc.clone(), dir));
                        }
                    }
                }
            }
        }
        out
    }

    /// The document with the session's steps as its proof script.
    pub fn export(&self) -> String {
        let mut doc = self.doc.clone();
        let proof = self.proof();
        doc.proof = Some(Proof {
            start: proof.start.clone(),
            goal: proof.goal.clone(),
            steps: self.history.iter().map(|(s, _)| s.clone()).collect(),
        });
        serialize_document(&doc)
    }

    pub fn projection(&self) -> Result<Scene, ApiError> {
        project(&self.sig, &self.state).map_err(|e| ApiError::Unprocessable {
            kind: "render",
            message: e.to_string(),
            detail: serde_json::Value::Null,
        })
    }
}

fn try_step(sig: &mut Signature, start: &Diagram, state: &Diagram, step: &Step) -> Result<Diagram, ApiError> {
    let next = checked_step(sig, state, step).map_err(|e| ApiError::Conflict(e.to_string()))?;
    if start.dim() > 0 && !globular(sig, start, &next).unwrap_or(false) {
        return Err(ApiError::Conflict("step changes the boundary of the session".into()));
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub session: String,
    pub start: String,
    pub goal: String,
    pub diagram: DiagramExpr,
    pub dim: usize,
    pub height: usize,
    pub steps: usize,
    pub goal_reached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveOption {
    pub step: Step,
    pub label: String,
    /// Height of the state after applying the move.
    pub height: usize,
}

#[derive(Default)]
pub struct Sessions {
    next: AtomicU64,
    map: RwLock<HashMap<String, Arc<RwLock<Session>>>>,
}

impl Sessions {
    pub fn insert(&self, s: Session) -> String {
        let id = format!("s{}", self.next.fetch_add(1, Ordering::Relaxed) + 1);
        self.map.write().insert(id.clone(), Arc::new(RwLock::new(s)));
        id
    }

    pub fn get(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.map.read().get(id).cloned().ok_or_else(|| ApiError::NotFound(id.to_string()))
    }
}

pub type AppState = Arc<Sessions>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/state", get(state_of))
        .route("/sessions/{id}/moves", get(moves))
        .route("/sessions/{id}/apply", post(apply))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/projection", get(projection))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}

async fn create(State(app): State<AppState>, body: String) -> Result<(StatusCode, Json<StateSummary>), ApiError> {
    let session = Session::open(&body)?;
    let id = app.insert(session);
    let summary = app.get(&id)?.read().summary(&id);
    Ok((StatusCode::CREATED, Json(summary)))
}

async fn state_of(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateSummary>, ApiError> {
    Ok(Json(app.get(&id)?.read().summary(&id)))
}

#[derive(Deserialize)]
struct MovesQuery {
    height: usize,
    /// Comma-separated.
    #[serde(default)]
    coords: Option<String>,
}

fn parse_coords(s: Option<&str>) -> Result<Vec<usize>, ApiError> {
    match s.map(str::trim) {
        None | Some("") => Ok(Vec::new()),
        Some(s) => s
            .split(',')
            .map(|c| c.trim().parse().map_err(|_| ApiError::BadRequest(format!("bad coordinate `{c}`"))))
            .collect(),
    }
}

async fn moves(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<MovesQuery>,
) -> Result<Json<Vec<MoveOption>>, ApiError> {
    let session = app.get(&id)?;
    let loc = MoveLocation { height: q.height, coords: parse_coords(q.coords.as_deref())? };
    let list = session.read().moves(&loc);
    Ok(Json(list))
}

async fn apply(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<StateSummary>, ApiError> {
    let session = app.get(&id)?;
    let step: Step = serde_json::from_str(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut s = session.write();
    s.apply(step)?;
    Ok(Json(s.summary(&id)))
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<StateSummary>, ApiError> {
    let session = app.get(&id)?;
    let mut s = session.write();
    s.undo()?;
    Ok(Json(s.summary(&id)))
}

async fn projection(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<Scene>, ApiError> {
    Ok(Json(app.get(&id)?.read().projection()?))
}

async fn export(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let text = app.get(&id)?.read().export();
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}
