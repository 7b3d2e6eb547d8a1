use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use strata::proofdoc::{check_document, parse_document};
use strata_service::{router, Sessions};

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.hdprf"));
    std::fs::read_to_string(path).unwrap()
}

fn app() -> Router {
    router(Arc::new(Sessions::default()))
}

async fn call(app: &Router, method: Method, uri: &str, body: impl Into<String>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.into())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn json_call(app: &Router, method: Method, uri: &str, body: impl Into<String>) -> (StatusCode, Value) {
    let (status, text) = call(app, method, uri, body).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
}

async fn open(app: &Router, name: &str) -> (String, Value) {
    let (status, body) = json_call(app, Method::POST, "/sessions", corpus(name)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (body["session"].as_str().unwrap().to_string(), body)
}

#[tokio::test]
async fn created_session_starts_at_the_start_diagram() {
    let app = app();
    let (id, created) = open(&app, "sigma_star_interchange").await;
    let doc = parse_document(&corpus("sigma_star_interchange")).unwrap();
    let start = &doc.diagrams["start"];
    assert_eq!(created["height"], json!(start.height()));
    assert_eq!(created["steps"], json!(0));
    let (status, state) = json_call(&app, Method::GET, &format!("/sessions/{id}/state"), "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state, created);
    assert_eq!(state["diagram"], serde_json::to_value(strata::proofdoc::DiagramExpr::from_diagram(start)).unwrap());
}

#[tokio::test]
async fn apply_then_undo_restores_the_state_and_projection() {
    let app = app();
    let (id, initial) = open(&app, "sigma_star_interchange").await;
    let (_, scene0) = json_call(&app, Method::GET, &format!("/sessions/{id}/projection"), "").await;

    let (status, moves) = json_call(&app, Method::GET, &format!("/sessions/{id}/moves?height=0"), "").await;
    assert_eq!(status, StatusCode::OK);
    let moves = moves.as_array().unwrap();
    assert_eq!(moves.len(), 1, "{moves:?}");
    assert_eq!(moves[0]["label"], "I-");
    let step = moves[0]["step"].to_string();

    let (status, after) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), step).await;
    assert_eq!(status, StatusCode::OK, "{after}");
    assert_eq!(after["steps"], json!(1));
    assert_ne!(after["diagram"], initial["diagram"]);
    let (_, scene1) = json_call(&app, Method::GET, &format!("/sessions/{id}/projection"), "").await;
    assert_ne!(scene1, scene0);

    let (status, undone) = json_call(&app, Method::POST, &format!("/sessions/{id}/undo"), "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, initial);
    let (_, scene2) = json_call(&app, Method::GET, &format!("/sessions/{id}/projection"), "").await;
    assert_eq!(scene2, scene0);
}

#[tokio::test]
async fn undo_on_empty_history_conflicts() {
    let app = app();
    let (id, _) = open(&app, "pull_through").await;
    let (status, body) = json_call(&app, Method::POST, &format!("/sessions/{id}/undo"), "").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], "inapplicable");
}

#[tokio::test]
async fn inapplicable_steps_conflict_and_leave_the_state_alone() {
    let app = app();
    let (id, initial) = open(&app, "sigma_star_interchange").await;
    let step = json!({"move": "homotopy", "kind": {"family": "I"}, "location": {"height": 0}});
    let (status, _) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), step.to_string()).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let step = json!({"move": "homotopy", "kind": {"family": "I"}, "location": {"height": 9}});
    let (status, _) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), step.to_string()).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, state) = json_call(&app, Method::GET, &format!("/sessions/{id}/state"), "").await;
    assert_eq!(state, initial);
}

#[tokio::test]
async fn boundary_changing_steps_are_rejected() {
    let app = app();
    let (id, initial) = open(&app, "sigma_star_interchange").await;
    // Extending the target by m changes the session's boundary.
    let step = json!({"move": "attach", "g": "m", "side": "target", "e": [0]});
    let (status, body) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), step.to_string()).await;
    assert_eq!(status, StatusCode::CONFLICT, "{body}");
    let (_, state) = json_call(&app, Method::GET, &format!("/sessions/{id}/state"), "").await;
    assert_eq!(state, initial);
}

#[tokio::test]
async fn moves_on_a_height_one_diagram_are_empty() {
    let app = app();
    let mut parsed = parse_document(&corpus("sigma_star_interchange")).unwrap();
    let base = parsed.diagrams["start"].source().unwrap().clone();
    let one = strata::Diagram::new(base, vec![parsed.diagrams["start"].entries()[1].clone()]);
    assert_eq!(one.height(), 1);
    parsed.diagrams.insert("single".into(), one);
    let proof = parsed.proof.as_mut().unwrap();
    proof.steps.clear();
    proof.start = "single".into();
    proof.goal = "single".into();
    let text = strata::proofdoc::serialize_document(&parsed);
    assert!(check_document(&parse_document(&text).unwrap()).ok());
    let (status, created) = json_call(&app, Method::POST, "/sessions", text).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["session"].as_str().unwrap();
    for h in 0..2 {
        let (status, moves) = json_call(&app, Method::GET, &format!("/sessions/{id}/moves?height={h}"), "").await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(moves, json!([]));
    }
}

#[tokio::test]
async fn pull_moves_are_listed_with_their_variant() {
    let app = app();
    let (id, _) = open(&app, "pull_through").await;
    let (_, moves) = json_call(&app, Method::GET, &format!("/sessions/{id}/moves?height=0"), "").await;
    let labels: Vec<&str> = moves.as_array().unwrap().iter().map(|m| m["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"II' rear"), "{labels:?}");
    for m in moves.as_array().unwrap() {
        let (status, _) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), m["step"].to_string()).await;
        assert_eq!(status, StatusCode::OK);
        let (status, _) = json_call(&app, Method::POST, &format!("/sessions/{id}/undo"), "").await;
        assert_eq!(status, StatusCode::OK);
    }
}

#[tokio::test]
async fn export_carries_the_applied_steps() {
    let app = app();
    let (id, _) = open(&app, "sigma_star_interchange").await;
    let (_, moves) = json_call(&app, Method::GET, &format!("/sessions/{id}/moves?height=0"), "").await;
    json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), moves[0]["step"].to_string()).await;
    let (status, text) = call(&app, Method::GET, &format!("/sessions/{id}/export"), "").await;
    assert_eq!(status, StatusCode::OK);
    let doc = parse_document(&text).unwrap();
    let proof = doc.proof.as_ref().unwrap();
    assert_eq!(proof.steps.len(), 1);
    let report = check_document(&doc);
    assert!(report.failure.is_none(), "{report}");
    assert_eq!(report.steps[0].label, "I-");
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let app = app();
    for (method, path) in [
        (Method::GET, "/sessions/nope/state"),
        (Method::GET, "/sessions/nope/moves?height=0"),
        (Method::POST, "/sessions/nope/undo"),
        (Method::GET, "/sessions/nope/projection"),
        (Method::GET, "/sessions/nope/export"),
    ] {
        let (status, _) = call(&app, method, path, "").await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{path}");
    }
    let (status, _) = call(&app, Method::POST, "/sessions/nope/apply", "{}").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn malformed_bodies_and_queries_are_bad_requests() {
    let app = app();
    let (id, _) = open(&app, "sigma_star_interchange").await;
    let (status, body) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "bad_request");
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/apply"), r#"{"move": "teleport"}"#).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves?height=x"), "").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves?height=0&coords=1,z"), "").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn bad_documents_are_unprocessable() {
    let app = app();
    let (status, body) = json_call(&app, Method::POST, "/sessions", "{\n  \"version\": 1,\n  oops\n}").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "parse");
    assert_eq!(body["detail"], json!({"line": 3, "column": 3}));

    // A proof whose goal is not reached fails the check.
    let text = corpus("sigma_star_interchange").replace("\"goal\": \"goal\"", "\"goal\": \"zigzag\"");
    let (status, body) = json_call(&app, Method::POST, "/sessions", text).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "check");
    assert_eq!(body["detail"]["goal_reached"], json!(false));
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = app();
    let (a, initial) = open(&app, "sigma_star_interchange").await;
    let (b, _) = open(&app, "sigma_star_interchange").await;
    assert_ne!(a, b);
    let (_, moves) = json_call(&app, Method::GET, &format!("/sessions/{a}/moves?height=0"), "").await;
    json_call(&app, Method::POST, &format!("/sessions/{a}/apply"), moves[0]["step"].to_string()).await;
    let (_, state_b) = json_call(&app, Method::GET, &format!("/sessions/{b}/state"), "").await;
    assert_eq!(state_b["diagram"], initial["diagram"]);
    assert_eq!(state_b["steps"], json!(0));
}

#[tokio::test]
async fn higher_moves_are_found_by_boundary_matching() {
    use strata::homotopy::{higher_move_boundary, Chirality, Family, HigherParams, MoveKind};
    use strata::proofdoc::{serialize_document, Proof, ProofDocument, FORMAT_VERSION};
    use strata::random::Fuzz;
    use strata::scenarios::{braid, CAPACITY};

    let (mut sig, base) = (0..200u64)
        .find_map(|seed| {
            let mut fz = Fuzz::new(seed);
            let mut sig = fz.signature_in(2, CAPACITY);
            braid(&mut fz, &mut sig, Chirality::LeftDown).map(|d| (sig, d))
        })
        .expect("some seed builds a braid");
    let kind = MoveKind::new(Family::IV);
    let params = HigherParams { base: base.clone(), anchor: 0, mu: None };
    let (s, t) = higher_move_boundary(&mut sig, kind, &params).unwrap();
    let d4 = strata::Diagram::new(base, s.entries().to_vec());
    let goal = strata::Diagram::new(d4.source().unwrap().clone(), t.entries().to_vec());
    let doc = ProofDocument {
        version: FORMAT_VERSION,
        signature: sig,
        diagrams: [("start".to_string(), d4), ("goal".to_string(), goal)].into_iter().collect(),
        proof: Some(Proof { start: "start".into(), goal: "start".into(), steps: vec![] }),
    };
    let app = app();
    let (status, created) = json_call(&app, Method::POST, "/sessions", serialize_document(&doc)).await;
    assert_eq!(status, StatusCode::CREATED, "{created}");
    let id = created["session"].as_str().unwrap();

    let (_, moves) = json_call(&app, Method::GET, &format!("/sessions/{id}/moves?height=0&coords=0"), "").await;
    let moves = moves.as_array().unwrap();
    let iv: Vec<&Value> = moves.iter().filter(|m| m["label"] == "IV").collect();
    assert_eq!(iv.len(), 1, "{moves:?}");
    let (status, after) = json_call(&app, Method::POST, &format!("/sessions/{id}/apply"), iv[0]["step"].to_string()).await;
    assert_eq!(status, StatusCode::OK, "{after}");
    let expected = serde_json::to_value(strata::proofdoc::DiagramExpr::from_diagram(&doc.diagrams["goal"])).unwrap();
    assert_eq!(after["diagram"], expected);
    // Without an anchor coordinate no higher move is offered.
    let (_, moves) = json_call(&app, Method::GET, &format!("/sessions/{id}/moves?height=0"), "").await;
    assert!(moves.as_array().unwrap().iter().all(|m| m["label"] != "IV"));
}
