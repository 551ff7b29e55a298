//! Drives one evaluator session against the service in-process: partial
//! scores, a rejected field, a CAP gate, then submit.
//!
//! ```bash
//! cargo run -p growai-service --example live_session
//! ```
//!
//! The same requests work over the network against `growai serve`.

use axum::body::Body;
use axum::http::Request;
use growai_core::rubric::ArenaId;
use growai_service::{router, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Value) -> (u16, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::main]
async fn main() {
    let data = tempfile::tempdir().unwrap();
    let app = router(AppState::new(data.path()).unwrap());

    call(&app, "POST", "/campaigns", json!({"campaign_id": "demo", "entity_id": "demo-bot"})).await;
    let (_, s) = call(&app, "POST", "/campaigns/demo/sessions", json!({"evaluator_id": "E1"})).await;
    let sid = s["session_id"].as_str().unwrap().to_string();
    let scores_uri = format!("/sessions/{sid}/scores");

    let (_, s) = call(
        &app,
        "PATCH",
        &scores_uri,
        json!({"scores": {"A1.GR": "2.0", "A2.AD": "3.0", "A3.IN": "2.0", "A4.SD": "3.0"}}),
    )
    .await;
    println!("C1 provisional composite {} (revision {})", s["criteria"][0]["display"], s["revision"]);

    let (status, s) = call(&app, "PATCH", &scores_uri, json!({"scores": {"A1.GRV": "2.45"}})).await;
    println!("2.45 -> HTTP {status}: {}", s["errors"][0]);

    let (_, s) = call(
        &app,
        "PATCH",
        &scores_uri,
        json!({
            "scores": {"A1.DET": "2.7"},
            "gates": [{"gate_id": "G1", "severity": "CAP", "scope": ["A1.DET"]}]
        }),
    )
    .await;
    let det = s["arenas"].as_array().unwrap().iter().find(|a| a["arena"] == "A1.DET").unwrap();
    println!("A1.DET entered {} shown {} capped {}", det["entered"], det["value"], det["capped"]);

    let rest: serde_json::Map<String, Value> = ArenaId::all().map(|a| (a.label(), json!("2.5"))).collect();
    let mut rest = rest;
    for done in ["A1.GR", "A2.AD", "A3.IN", "A4.SD", "A1.DET"] {
        rest.remove(done);
    }
    let (_, s) = call(&app, "PATCH", &scores_uri, json!({ "scores": rest })).await;
    println!("complete: provisional index {} {}", s["provisional_gui"]["display"], s["provisional_verdict"]);

    let (status, run) = call(&app, "POST", &format!("/sessions/{sid}/submit"), Value::Null).await;
    println!("submit -> HTTP {status}, verdict {}, run index {}", run["verdict"], run["run_gui"]);
    let (_, c) = call(&app, "GET", "/campaigns/demo", Value::Null).await;
    println!("campaign has {} run(s)", c["run_count"]);
}
