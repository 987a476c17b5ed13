//! Query answering shared by the CLI and the HTTP service.

use natroute_core::instructions::route_instructions;
use natroute_core::routing::{locate, Located, Query};
use natroute_core::{Anchor, Mode, Point, Route, RouteError, RoadSetKind, Router};
use serde_json::{json, Map, Value};

use crate::geojson::route_geojson;
use crate::snapshot::{BuildParams, EngineSnapshot};

/// Endpoints farther than this from every segment are rejected.
pub const DEFAULT_SNAP_RADIUS: f64 = 250.0;

/// Shown wherever simplest-path results are reported.
pub const SP_NOTE: &str =
    "SP is a stand-in cost: fewest deflections above the join angle, then shortest distance";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("{0}")]
    Malformed(String),
    #[error("point is {distance} units from the network; the snap radius is {radius}")]
    OffNetwork { distance: f64, radius: f64 },
    #[error("{0}")]
    Unreachable(RouteError),
    #[error("{0}")]
    Internal(String),
}

impl EngineError {
    pub fn status(&self) -> u16 {
        match self {
            EngineError::Malformed(_) => 400,
            EngineError::Unreachable(_) => 404,
            EngineError::OffNetwork { .. } => 422,
            EngineError::Internal(_) => 500,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::Malformed(_) => "malformed_request",
            EngineError::Unreachable(_) => "unreachable",
            EngineError::OffNetwork { .. } => "off_network",
            EngineError::Internal(_) => "internal",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": self.kind(), "detail": self.to_string()})
    }
}

impl From<RouteError> for EngineError {
    fn from(e: RouteError) -> Self {
        match e {
            RouteError::Unreachable | RouteError::NoFeasibleSequence { .. } => EngineError::Unreachable(e),
            other => EngineError::Internal(other.to_string()),
        }
    }
}

/// Parses `x,y` (lon,lat for projected networks).
pub fn parse_point(s: &str) -> Result<(f64, f64), EngineError> {
    let bad = || EngineError::Malformed(format!("expected \"x,y\", got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = a.trim().parse().map_err(|_| bad())?;
    let y: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(bad());
    }
    Ok((x, y))
}

pub fn parse_mode(s: &str) -> Result<Mode, EngineError> {
    Mode::parse(s).ok_or_else(|| EngineError::Malformed(format!("unknown mode {s:?}; expected st, sp, ft or fts")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteAnswer {
    pub route: Route,
    pub geojson: Value,
    pub instructions_xml: String,
}

impl RouteAnswer {
    pub fn to_json(&self) -> Value {
        let roads: Vec<u32> = self.route.road_sequence.iter().map(|r| r.0).collect();
        json!({
            "mode": self.route.mode.tag(),
            "distance": self.route.distance,
            "turns_topological": self.route.turns_topological,
            "turns_perceptual": self.route.turns_perceptual,
            "road_sequence": roads,
            "truncated": self.route.truncated,
            "route": self.geojson,
            "instructions": self.instructions_xml,
        })
    }

    /// One-line summary used by the CLI.
    pub fn summary(&self) -> String {
        let r = &self.route;
        format!(
            "turns={} distance={:?} turns_perceptual={} mode={}",
            r.turns_topological,
            r.distance,
            r.turns_perceptual,
            r.mode.tag()
        )
    }
}

/// An immutable snapshot plus query settings.
#[derive(Debug, Clone)]
pub struct Engine {
    router: Router,
    params: BuildParams,
    hash: String,
    snap_radius: f64,
}

impl Engine {
    pub fn new(snapshot: EngineSnapshot) -> Self {
        let (params, hash) = (snapshot.params(), snapshot.hash_hex());
        Self { router: snapshot.into_router(), params, hash, snap_radius: DEFAULT_SNAP_RADIUS }
    }

    pub fn with_snap_radius(mut self, radius: f64) -> Self {
        self.snap_radius = radius;
        self
    }

    /// Limits fewest-turn sequence enumeration.
    pub fn with_sequence_cap(mut self, cap: usize) -> Self {
        self.router = self.router.with_cap(cap);
        self
    }

    /// Hex content hash of the loaded snapshot.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn params(&self) -> BuildParams {
        self.params
    }

    pub fn router(&self) -> &Router {
        &self.router
    }

    pub fn snap_radius(&self) -> f64 {
        self.snap_radius
    }

    /// Nearest network position to a point given in input coordinates.
    pub fn snap(&self, (x, y): (f64, f64)) -> Result<Located, EngineError> {
        let net = self.router.network();
        let p = match net.projection() {
            Some(proj) => proj.project(x, y),
            None => Point::new(x, y),
        };
        let located = locate(net, self.router.roads(RoadSetKind::Unsplit), Query::Point(p))?;
        if located.distance > self.snap_radius {
            return Err(EngineError::OffNetwork { distance: located.distance, radius: self.snap_radius });
        }
        Ok(located)
    }

    pub fn route_anchors(&self, mode: Mode, from: Anchor, to: Anchor) -> Result<RouteAnswer, EngineError> {
        let net = self.router.network();
        let route = self.router.route(mode, from, to)?;
        let doc = route_instructions(&route, self.router.roads_for(mode), net)
            .map_err(|e| EngineError::Internal(e.to_string()))?;
        Ok(RouteAnswer { geojson: route_geojson(&route, net), instructions_xml: doc.to_xml(), route })
    }

    pub fn route_points(&self, mode: Mode, from: (f64, f64), to: (f64, f64)) -> Result<RouteAnswer, EngineError> {
        let (a, b) = (self.snap(from)?, self.snap(to)?);
        self.route_anchors(mode, a.anchor, b.anchor)
    }

    /// String-level entry point: `x,y` endpoints and a mode tag.
    pub fn route(&self, from: &str, to: &str, mode: &str) -> Result<RouteAnswer, EngineError> {
        let mode = parse_mode(mode)?;
        self.route_points(mode, parse_point(from)?, parse_point(to)?)
    }

    /// Every mode between the same snapped endpoints.
    pub fn compare(&self, from: &str, to: &str) -> Result<Vec<(Mode, Result<RouteAnswer, EngineError>)>, EngineError> {
        let (a, b) = (self.snap(parse_point(from)?)?, self.snap(parse_point(to)?)?);
        Ok(Mode::ALL.iter().map(|&m| (m, self.route_anchors(m, a.anchor, b.anchor))).collect())
    }
}

pub fn compare_json(results: &[(Mode, Result<RouteAnswer, EngineError>)]) -> Value {
    let mut modes = Map::new();
    for (mode, r) in results {
        let v = match r {
            Ok(a) => a.to_json(),
            Err(e) => e.to_json(),
        };
        modes.insert(mode.tag().to_string(), v);
    }
    json!({"modes": modes, "note": SP_NOTE})
}

#[cfg(test)]
mod tests {
    use super::*;
    use natroute_core::fixtures;

    fn engine() -> Engine {
        let params = BuildParams { angle_deg: 45.0, split_distance: 1.0, split_ratio: 0.2 };
        Engine::new(EngineSnapshot::build(fixtures::grid(4, 4, 1.0), params).unwrap())
    }

    #[test]
    fn parses_points() {
        assert_eq!(parse_point("1.5, -2").unwrap(), (1.5, -2.0));
        for bad in ["", "1", "1,", "a,b", "1,2,3", "nan,1", "inf,0"] {
            assert!(parse_point(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_corner_to_corner() {
        let a = engine().route("0,0", "3,3", "ft").unwrap();
        assert_eq!(a.route.turns_topological, 1);
        assert_eq!(a.route.distance, 6.0);
        assert_eq!(a.summary(), "turns=1 distance=6.0 turns_perceptual=1 mode=FT");
        assert_eq!(a.to_json()["route"]["properties"]["road_sequence"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn error_statuses() {
        let e = engine();
        assert_eq!(e.route("0,0", "3,3", "xx").unwrap_err().status(), 400);
        assert_eq!(e.route("0;0", "3,3", "st").unwrap_err().status(), 400);
        let far = e.route("0,0", "1000,0", "st").unwrap_err();
        assert_eq!(far.status(), 422);
        assert_eq!(far.to_json()["error"], "off_network");
        assert!(e.clone().with_snap_radius(1e6).route("0,0", "1000,0", "st").is_ok());
    }

    #[test]
    fn from_equals_to() {
        let a = engine().route("1,1.5", "1,1.5", "fts").unwrap();
        assert_eq!(a.route.distance, 0.0);
        assert_eq!(a.route.turns_topological, 0);
        let coords = a.geojson["geometry"]["coordinates"].as_array().unwrap();
        assert_eq!(coords.len(), 2);
        assert_eq!(coords[0], coords[1]);
    }
}
