use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use natroute::engine::Engine;
use natroute::server::app;
use natroute::snapshot::{BuildParams, EngineSnapshot};
use natroute_core::fixtures;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

fn engine_for(net: natroute_core::RoadNetwork) -> Engine {
    let params = BuildParams { angle_deg: 45.0, split_distance: 1.0, split_ratio: 0.2 };
    Engine::new(EngineSnapshot::build(net, params).unwrap())
}

fn grid() -> Engine {
    engine_for(fixtures::grid(4, 4, 1.0))
}

async fn get(router: &axum::Router, uri: &str) -> (StatusCode, Value) {
    let resp = router.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    assert_eq!(resp.headers()["content-type"], "application/json");
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn health_and_layers() {
    let engine = grid();
    let hash = engine.hash().to_string();
    let router = app(engine);
    let (st, v) = get(&router, "/health").await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["snapshot"], hash);
    let (_, v) = get(&router, "/network").await;
    assert_eq!(v["features"].as_array().unwrap().len(), 24);
    let (_, v) = get(&router, "/roads?kind=unsplit").await;
    assert_eq!(v["features"].as_array().unwrap().len(), 8);
    assert_eq!(v["features"][0]["properties"]["kind"], "unsplit");
    let (_, v) = get(&router, "/roads?kind=split").await;
    assert_eq!(v["features"][0]["properties"]["kind"], "split");
    let (st, v) = get(&router, "/roads?kind=weird").await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    assert!(v["detail"].is_string());
}

#[tokio::test]
async fn route_on_grid() {
    let router = app(grid());
    let (st, v) = get(&router, "/route?from=0,0&to=3,3&mode=ft").await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["distance"], 6.0);
    assert_eq!(v["turns_topological"], 1);
    assert_eq!(v["route"]["type"], "Feature");
    assert!(v["instructions"].as_str().unwrap().starts_with("<?xml"));
    let (_, v) = get(&router, "/route?from=1,2&to=1,2&mode=st").await;
    assert_eq!(v["distance"], 0.0);
    assert_eq!(v["turns_topological"], 0);
}

#[tokio::test]
async fn error_statuses() {
    let router = app(grid());
    for (uri, status, kind) in [
        ("/route?from=0,0&mode=ft", StatusCode::BAD_REQUEST, "malformed_request"),
        ("/route?from=0;0&to=1,1", StatusCode::BAD_REQUEST, "malformed_request"),
        ("/route?from=0,0&to=1,1&mode=xx", StatusCode::BAD_REQUEST, "malformed_request"),
        ("/route?from=0,0&to=1000,1000", StatusCode::UNPROCESSABLE_ENTITY, "off_network"),
        ("/compare?from=0,0", StatusCode::BAD_REQUEST, "malformed_request"),
        ("/nowhere", StatusCode::NOT_FOUND, "not_found"),
    ] {
        let (st, v) = get(&router, uri).await;
        assert_eq!(st, status, "{uri}");
        assert_eq!(v["error"], kind, "{uri}");
    }
}

#[tokio::test]
async fn unreachable_is_404() {
    // two disconnected streets
    let net = natroute_core::network::load_network(
        &[
            natroute_core::LineFeature::new(vec![natroute_core::Point::new(0.0, 0.0), natroute_core::Point::new(10.0, 0.0)]),
            natroute_core::LineFeature::new(vec![natroute_core::Point::new(0.0, 5.0), natroute_core::Point::new(10.0, 5.0)]),
        ],
        &Default::default(),
    )
    .unwrap()
    .network;
    let router = app(engine_for(net));
    for mode in ["st", "sp", "ft", "fts"] {
        let (st, v) = get(&router, &format!("/route?from=1,0&to=1,5&mode={mode}")).await;
        assert_eq!(st, StatusCode::NOT_FOUND, "{mode}");
        assert_eq!(v["error"], "unreachable");
    }
}

#[tokio::test]
async fn compare_keeps_shortest_no_longer_than_fewest_turn() {
    let net = fixtures::perturbed_grid(6, 6, 5.0, 4);
    let router = app(engine_for(net));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let (a, b): ((f64, f64), (f64, f64)) =
            ((rng.gen_range(0.0..25.0), rng.gen_range(0.0..25.0)), (rng.gen_range(0.0..25.0), rng.gen_range(0.0..25.0)));
        let (st, v) = get(&router, &format!("/compare?from={},{}&to={},{}", a.0, a.1, b.0, b.1)).await;
        assert_eq!(st, StatusCode::OK);
        let m = &v["modes"];
        let d = |k: &str| m[k]["distance"].as_f64().unwrap();
        assert!(d("ST") <= d("FT") + 1e-9);
        assert!(d("ST") <= d("FTS") + 1e-9);
        assert!(d("ST") <= d("SP") + 1e-9);
        assert!(m["FT"]["turns_topological"].as_u64() <= m["SP"]["turns_topological"].as_u64());
        assert!(v["note"].as_str().unwrap().starts_with("SP"));
    }
}

#[tokio::test]
async fn cli_and_http_answers_match() {
    let dir = tempfile::TempDir::new().unwrap();
    let snap_path = dir.path().join("g.snap");
    let params = BuildParams { angle_deg: 45.0, split_distance: 1.0, split_ratio: 0.2 };
    EngineSnapshot::build(fixtures::perturbed_grid(5, 5, 3.0, 8), params).unwrap().save(&snap_path).unwrap();
    let router = app(Engine::new(EngineSnapshot::load(&snap_path).unwrap()));
    for (from, to, mode) in [("0,0", "12,12", "ft"), ("1.3,0.2", "7.1,9", "fts"), ("0,6", "12,3", "sp"), ("4,4", "9,1", "st")] {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_natroute"))
            .args(["route", snap_path.to_str().unwrap(), "--from", from, "--to", to, "--mode", mode, "--json"])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let cli: Value = serde_json::from_slice(&out.stdout).unwrap();
        let (_, http) = get(&router, &format!("/route?from={from}&to={to}&mode={mode}")).await;
        assert_eq!(cli, http, "{from} -> {to} {mode}");
    }
}

#[tokio::test]
async fn concurrent_identical_requests_agree() {
    let router = app(engine_for(fixtures::perturbed_grid(8, 8, 5.0, 1)));
    let uri = "/compare?from=0.5,0.5&to=33,31";
    let tasks: Vec<_> = (0..16)
        .map(|_| {
            let r = router.clone();
            tokio::spawn(async move {
                let resp = r.oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
                resp.into_body().collect().await.unwrap().to_bytes()
            })
        })
        .collect();
    let mut bodies = Vec::new();
    for t in tasks {
        bodies.push(t.await.unwrap());
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
}
