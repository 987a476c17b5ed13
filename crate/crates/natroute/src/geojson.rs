//! GeoJSON in and out.
//!
//! Input is a FeatureCollection (or a single Feature) of LineString or
//! MultiLineString geometries. Output coordinates are converted back to
//! lon/lat when the network was projected at ingest. Collections written
//! from planar networks carry a `"natroute:crs": "planar"` member so they
//! can be read back without a flag.

use natroute_core::natural_roads::RoadSet;
use natroute_core::network::{Crs, LineFeature, RoadNetwork};
use natroute_core::routing::Route;
use natroute_core::Point;
use serde_json::{json, Map, Value};

use crate::FormatError;

pub const CRS_MEMBER: &str = "natroute:crs";

#[derive(Debug, Clone, PartialEq)]
pub struct GeoJsonInput {
    pub features: Vec<LineFeature>,
    /// CRS declared through the foreign member, if any.
    pub declared_crs: Option<Crs>,
    /// Features skipped because they are not lines.
    pub skipped: usize,
}

fn bad(msg: impl Into<String>) -> FormatError {
    FormatError::GeoJson(msg.into())
}

fn position(v: &Value) -> Result<Point, FormatError> {
    let arr = v.as_array().ok_or_else(|| bad("position is not an array"))?;
    match (arr.first().and_then(Value::as_f64), arr.get(1).and_then(Value::as_f64)) {
        (Some(x), Some(y)) => Ok(Point::new(x, y)),
        _ => Err(bad("position needs two numbers")),
    }
}

fn line(v: &Value) -> Result<Vec<Point>, FormatError> {
    v.as_array().ok_or_else(|| bad("LineString coordinates are not an array"))?.iter().map(position).collect()
}

fn text(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn read_feature(f: &Value, out: &mut GeoJsonInput) -> Result<(), FormatError> {
    let props = f.get("properties");
    let name = text(props.and_then(|p| p.get("name")));
    let id = text(props.and_then(|p| p.get("id"))).or_else(|| text(f.get("id")));
    let Some(geom) = f.get("geometry").filter(|g| !g.is_null()) else {
        out.skipped += 1;
        return Ok(());
    };
    let coords = geom.get("coordinates");
    match geom.get("type").and_then(Value::as_str) {
        Some("LineString") => {
            let coords = line(coords.ok_or_else(|| bad("LineString without coordinates"))?)?;
            out.features.push(LineFeature { coords, name, id });
        }
        Some("MultiLineString") => {
            let parts = coords.and_then(Value::as_array).ok_or_else(|| bad("MultiLineString coordinates"))?;
            for part in parts {
                out.features.push(LineFeature { coords: line(part)?, name: name.clone(), id: id.clone() });
            }
        }
        _ => out.skipped += 1,
    }
    Ok(())
}

pub fn parse_geojson(input: &str) -> Result<GeoJsonInput, FormatError> {
    let root: Value = serde_json::from_str(input).map_err(|e| bad(e.to_string()))?;
    let declared_crs = match root.get(CRS_MEMBER).and_then(Value::as_str) {
        Some("planar") => Some(Crs::Planar),
        Some("lonlat") => Some(Crs::LonLat),
        Some(other) => return Err(bad(format!("unknown {CRS_MEMBER} value {other:?}"))),
        None => None,
    };
    let mut out = GeoJsonInput { features: Vec::new(), declared_crs, skipped: 0 };
    match root.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => {
            let features = root.get("features").and_then(Value::as_array).ok_or_else(|| bad("missing features"))?;
            for f in features {
                read_feature(f, &mut out)?;
            }
        }
        Some("Feature") => read_feature(&root, &mut out)?,
        _ => return Err(bad("expected a FeatureCollection or Feature")),
    }
    Ok(out)
}

/// Features as a planar FeatureCollection.
pub fn features_to_geojson(features: &[LineFeature]) -> Value {
    let fs: Vec<Value> = features
        .iter()
        .map(|f| {
            let mut props = Map::new();
            if let Some(id) = &f.id {
                props.insert("id".into(), json!(id));
            }
            if let Some(name) = &f.name {
                props.insert("name".into(), json!(name));
            }
            let coords: Vec<[f64; 2]> = f.coords.iter().map(|p| [p.x, p.y]).collect();
            json!({"type": "Feature", "properties": props, "geometry": {"type": "LineString", "coordinates": coords}})
        })
        .collect();
    json!({"type": "FeatureCollection", CRS_MEMBER: "planar", "features": fs})
}

fn coords(net: &RoadNetwork, pts: &[Point]) -> Vec<[f64; 2]> {
    match net.projection() {
        Some(proj) => pts
            .iter()
            .map(|&p| {
                let (lon, lat) = proj.unproject(p);
                [lon, lat]
            })
            .collect(),
        None => pts.iter().map(|p| [p.x, p.y]).collect(),
    }
}

fn collection(net: &RoadNetwork, features: Vec<Value>) -> Value {
    let mut root = json!({"type": "FeatureCollection", "features": features});
    if net.projection().is_none() {
        root[CRS_MEMBER] = json!("planar");
    }
    root
}

/// Every segment as a LineString.
pub fn network_geojson(net: &RoadNetwork) -> Value {
    let features = net
        .segments()
        .iter()
        .map(|s| {
            json!({
                "type": "Feature",
                "properties": {
                    "id": s.id.0,
                    "name": s.name,
                    "source_id": s.source_id,
                    "from": s.from.0,
                    "to": s.to.0,
                    "length": s.length,
                },
                "geometry": {"type": "LineString", "coordinates": coords(net, s.geometry.points())},
            })
        })
        .collect();
    collection(net, features)
}

/// Every road as a LineString with its member segments.
pub fn roads_geojson(net: &RoadNetwork, rs: &RoadSet) -> Value {
    let features = rs
        .roads()
        .iter()
        .map(|r| {
            let segments: Vec<u32> = r.segments().map(|s| s.0).collect();
            json!({
                "type": "Feature",
                "properties": {
                    "road": r.id.0,
                    "kind": rs.kind().as_str(),
                    "segments": segments,
                    "parent": r.parent.map(|p| p.0),
                    "length": r.length(),
                    "ring": r.is_ring(),
                },
                "geometry": {"type": "LineString", "coordinates": coords(net, r.geometry.points())},
            })
        })
        .collect();
    collection(net, features)
}

/// A route as one LineString feature. A zero-length route repeats its
/// single coordinate.
pub fn route_geojson(route: &Route, net: &RoadNetwork) -> Value {
    let roads: Vec<u32> = route.road_sequence.iter().map(|r| r.0).collect();
    json!({
        "type": "Feature",
        "properties": {
            "mode": route.mode.tag().to_ascii_lowercase(),
            "distance": route.distance,
            "turns_topological": route.turns_topological,
            "turns_perceptual": route.turns_perceptual,
            "road_sequence": roads,
            "truncated": route.truncated,
        },
        "geometry": {"type": "LineString", "coordinates": coords(net, &route.points(net))},
    })
}
