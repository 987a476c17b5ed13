//! HTTP service over one immutable engine.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use natroute_core::RoadSetKind;
use serde_json::{json, Value};

use crate::engine::{compare_json, Engine, EngineError};
use crate::geojson::{network_geojson, roads_geojson};

struct AppState {
    engine: Engine,
    network: String,
    unsplit: String,
    split: String,
}

type Params = Query<HashMap<String, String>>;

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn reply(status: StatusCode, v: &Value) -> Response {
    json_body(status, v.to_string())
}

fn error(e: &EngineError) -> Response {
    let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    reply(status, &e.to_json())
}

fn required<'a>(q: &'a HashMap<String, String>, key: &str) -> Result<&'a str, EngineError> {
    q.get(key).map(String::as_str).ok_or_else(|| EngineError::Malformed(format!("missing query parameter {key:?}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, EngineError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| EngineError::Internal(e.to_string()))
}

async fn health(State(s): State<Arc<AppState>>) -> Response {
    reply(StatusCode::OK, &json!({"status": "ok", "snapshot": s.engine.hash()}))
}

async fn network(State(s): State<Arc<AppState>>) -> Response {
    json_body(StatusCode::OK, s.network.clone())
}

async fn roads(State(s): State<Arc<AppState>>, Query(q): Params) -> Response {
    match q.get("kind").map(String::as_str).unwrap_or("unsplit") {
        "unsplit" => json_body(StatusCode::OK, s.unsplit.clone()),
        "split" => json_body(StatusCode::OK, s.split.clone()),
        other => error(&EngineError::Malformed(format!("unknown road kind {other:?}; expected unsplit or split"))),
    }
}

async fn route(State(s): State<Arc<AppState>>, Query(q): Params) -> Response {
    let args = (|| Ok::<_, EngineError>((required(&q, "from")?.to_owned(), required(&q, "to")?.to_owned())))();
    let (from, to) = match args {
        Ok(a) => a,
        Err(e) => return error(&e),
    };
    let mode = q.get("mode").cloned().unwrap_or_else(|| "ft".into());
    let answer = blocking(move || s.engine.route(&from, &to, &mode).map(|a| a.to_json())).await;
    match answer.and_then(|r| r) {
        Ok(v) => reply(StatusCode::OK, &v),
        Err(e) => error(&e),
    }
}

async fn compare(State(s): State<Arc<AppState>>, Query(q): Params) -> Response {
    let args = (|| Ok::<_, EngineError>((required(&q, "from")?.to_owned(), required(&q, "to")?.to_owned())))();
    let (from, to) = match args {
        Ok(a) => a,
        Err(e) => return error(&e),
    };
    let answer = blocking(move || s.engine.compare(&from, &to).map(|r| compare_json(&r))).await;
    match answer.and_then(|r| r) {
        Ok(v) => reply(StatusCode::OK, &v),
        Err(e) => error(&e),
    }
}

async fn not_found() -> Response {
    reply(StatusCode::NOT_FOUND, &json!({"error": "not_found", "detail": "no such endpoint"}))
}

/// Builds the application. Map layers are serialized once up front.
pub fn app(engine: Engine) -> axum::Router {
    let r = engine.router();
    let net = r.network();
    let state = AppState {
        network: network_geojson(net).to_string(),
        unsplit: roads_geojson(net, r.roads(RoadSetKind::Unsplit)).to_string(),
        split: roads_geojson(net, r.roads(RoadSetKind::Split)).to_string(),
        engine,
    };
    axum::Router::new()
        .route("/health", get(health))
        .route("/network", get(network))
        .route("/roads", get(roads))
        .route("/route", get(route))
        .route("/compare", get(compare))
        .fallback(not_found)
        .with_state(Arc::new(state))
}

/// Serves until Ctrl-C.
pub async fn serve(engine: Engine, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
