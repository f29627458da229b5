use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use clustercc_cli::default_session;
use clustercc_cli::serve::router;
use clustercc_cli::session::Session;

fn fresh() -> Router {
    router(Session::load(&default_session(), None).unwrap(), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn fresh_state_is_the_two_triangle_example() {
    let app = fresh();
    let (status, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["n"], 3);
    assert_eq!(s["m"], 1);
    assert_eq!(s["history"], json!([]));
    assert_eq!(s["cluster"].as_array().unwrap().len(), 4);
    assert_eq!(s["gVectors"]["S2"], json!([0, -1, 1, 1]));
}

#[tokio::test]
async fn mutate_then_undo_restores_the_state() {
    let app = fresh();
    let (_, before) = call(&app, "GET", "/state", None).await;
    let (status, after) = call(&app, "POST", "/mutate", Some(json!({ "k": 2 }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after["history"], json!([2]));
    assert_ne!(after["matrix"], before["matrix"]);
    let (status, undone) = call(&app, "POST", "/undo", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, before);
    let (status, e) = call(&app, "POST", "/undo", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "NothingToUndo");
}

#[tokio::test]
async fn bad_vertices_are_rejected() {
    let app = fresh();
    for k in [0, 4, 9] {
        let (status, e) = call(&app, "POST", "/mutate", Some(json!({ "k": k }))).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "k = {k}");
        assert_eq!(e["error"], "KOutOfRange");
    }
    let (status, e) = call(&app, "POST", "/mutate", Some(json!({ "vertex": 1 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "Parse");
    let (_, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(s["history"], json!([]));
}

#[tokio::test]
async fn two_cycle_at_k_is_rejected() {
    let app = fresh();
    let qp = json!({
        "n": 3, "m": 0,
        "arrows": [
            { "id": "a", "from": 1, "to": 2 },
            { "id": "b", "from": 2, "to": 1 },
            { "id": "c", "from": 2, "to": 3 }
        ],
        "potential": []
    });
    let (status, _) = call(&app, "POST", "/load", Some(json!({ "qp": qp }))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, e) = call(&app, "POST", "/mutate", Some(json!({ "k": 1 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "TwoCycleAtK");
    let (status, _) = call(&app, "POST", "/mutate", Some(json!({ "k": 3 }))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn stale_history_is_a_conflict() {
    let app = fresh();
    let (status, _) = call(
        &app,
        "POST",
        "/mutate",
        Some(json!({ "k": 1, "historyLength": 0 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let (status, e) = call(
        &app,
        "POST",
        "/mutate",
        Some(json!({ "k": 3, "historyLength": 0 })),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(e["error"], "HistoryConflict");
    let (_, s) = call(&app, "GET", "/state", None).await;
    assert_eq!(s["history"], json!([1]));
}

#[tokio::test]
async fn cc_of_a_session_representation() {
    let app = fresh();
    let (status, v) = call(&app, "GET", "/cc?rep=S2", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["text"], "1 * x2^-1 x3 x4 + 1 * x1 x2^-1");
    let (status, e) = call(&app, "GET", "/cc?rep=S9", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(e["error"], "UnknownRep");
}

#[tokio::test]
async fn replaying_the_session_reproduces_the_state() {
    let app = fresh();
    for k in [2, 1, 3, 2] {
        let (status, _) = call(&app, "POST", "/mutate", Some(json!({ "k": k }))).await;
        assert_eq!(status, StatusCode::OK);
    }
    let (_, s) = call(&app, "GET", "/state", None).await;
    let other = fresh();
    let (status, loaded) = call(&other, "POST", "/load", Some(s["session"].clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(loaded, s);
    let (_, again) = call(&other, "GET", "/state", None).await;
    assert_eq!(again, s);
}
