//! The geometric road network: segments between junctions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::geometry::{GeometryError, Point, Polyline};
use crate::natural_roads::RoadSet;

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl core::fmt::Display for $name {
            fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

id_type!(SegmentId);
id_type!(JunctionId);
pub(crate) use id_type;

/// Which end of a segment touches a junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum SegmentEnd {
    Start,
    End,
}

impl SegmentEnd {
    pub fn opposite(self) -> Self {
        match self {
            SegmentEnd::Start => SegmentEnd::End,
            SegmentEnd::End => SegmentEnd::Start,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Segment {
    pub id: SegmentId,
    pub geometry: Polyline,
    pub name: Option<String>,
    /// The `id` property of the source feature, if any.
    pub source_id: Option<String>,
    pub from: JunctionId,
    pub to: JunctionId,
    pub length: f64,
}

impl Segment {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }

    pub fn junction_at(&self, end: SegmentEnd) -> JunctionId {
        match end {
            SegmentEnd::Start => self.from,
            SegmentEnd::End => self.to,
        }
    }

    /// Direction of the terminal chord, pointing into the junction at `end`.
    pub fn arriving_direction(&self, end: SegmentEnd) -> Point {
        let p = self.geometry.points();
        match end {
            SegmentEnd::Start => p[0] - p[1],
            SegmentEnd::End => p[p.len() - 1] - p[p.len() - 2],
        }
    }

    /// Direction of the terminal chord, pointing away from the junction at `end`.
    pub fn departing_direction(&self, end: SegmentEnd) -> Point {
        -self.arriving_direction(end)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Junction {
    pub id: JunctionId,
    pub location: Point,
    /// Incident segment ends, ascending.
    pub incident: Vec<(SegmentId, SegmentEnd)>,
}

impl Junction {
    pub fn degree(&self) -> usize {
        self.incident.len()
    }
}

/// Azimuthal equidistant projection about a reference point, in meters.
/// Distances from the reference point are exact; other distances within a
/// degree or so of it are off by well under 0.1%.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LocalProjection {
    pub lon0: f64,
    pub lat0: f64,
}

const EARTH_RADIUS_M: f64 = 6_371_008.8;

impl LocalProjection {
    pub fn project(&self, lon: f64, lat: f64) -> Point {
        let (phi0, phi) = (self.lat0.to_radians(), lat.to_radians());
        let dl = (lon - self.lon0).to_radians();
        let east = libm::cos(phi) * libm::sin(dl);
        let north = libm::cos(phi0) * libm::sin(phi) - libm::sin(phi0) * libm::cos(phi) * libm::cos(dl);
        let along = libm::sin(phi0) * libm::sin(phi) + libm::cos(phi0) * libm::cos(phi) * libm::cos(dl);
        let chord = libm::hypot(east, north);
        if chord == 0.0 {
            return Point::new(0.0, 0.0);
        }
        let c = libm::atan2(chord, along);
        let k = EARTH_RADIUS_M * c / chord;
        Point::new(k * east, k * north)
    }

    /// Inverse of [`Self::project`]; returns (lon, lat).
    pub fn unproject(&self, p: Point) -> (f64, f64) {
        let rho = p.norm();
        if rho == 0.0 {
            return (self.lon0, self.lat0);
        }
        let phi0 = self.lat0.to_radians();
        let c = rho / EARTH_RADIUS_M;
        let (sc, cc) = (libm::sin(c), libm::cos(c));
        let lat = libm::asin(cc * libm::sin(phi0) + p.y * sc * libm::cos(phi0) / rho);
        let dl = libm::atan2(p.x * sc, rho * libm::cos(phi0) * cc - p.y * libm::sin(phi0) * sc);
        (self.lon0 + dl.to_degrees(), lat.to_degrees())
    }
}

/// Great-circle distance in meters between two (lon, lat) pairs.
pub fn haversine(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lat2) = (a.1.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.0 - a.0).to_radians();
    let h = libm::pow(libm::sin(dlat / 2.0), 2.0)
        + libm::cos(lat1) * libm::cos(lat2) * libm::pow(libm::sin(dlon / 2.0), 2.0);
    2.0 * EARTH_RADIUS_M * libm::asin(libm::sqrt(h).min(1.0))
}

/// Coordinate system of incoming features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Crs {
    /// Already planar map units; used as is.
    #[default]
    Planar,
    /// Longitude/latitude degrees, projected about the data centroid.
    LonLat,
}

/// One input line feature.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineFeature {
    pub coords: Vec<Point>,
    pub name: Option<String>,
    pub id: Option<String>,
}

impl LineFeature {
    pub fn new(coords: Vec<Point>) -> Self {
        Self { coords, name: None, id: None }
    }

    pub fn named(coords: Vec<Point>, name: &str) -> Self {
        Self { coords, name: Some(name.into()), id: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    pub crs: Crs,
    /// Endpoints closer than this merge into one junction; 0 means exact match.
    pub snap_tolerance: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { crs: Crs::Planar, snap_tolerance: 0.0 }
    }
}

/// Why an input feature was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDiagnostic {
    pub feature_index: usize,
    pub source_id: Option<String>,
    pub reason: GeometryError,
}

impl fmt::Display for FeatureDiagnostic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "feature {}", self.feature_index)?;
        if let Some(id) = &self.source_id {
            write!(f, " (id {id})")?;
        }
        write!(f, " rejected: {}", self.reason)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkError {
    Empty,
    /// Every feature was rejected.
    NoValidFeatures { diagnostics: Vec<FeatureDiagnostic> },
    RoadSetMismatch,
    TooLarge,
}

impl fmt::Display for NetworkError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NetworkError::Empty => write!(f, "empty network: no input features"),
            NetworkError::NoValidFeatures { diagnostics } => {
                write!(f, "empty network: all {} features rejected", diagnostics.len())
            }
            NetworkError::RoadSetMismatch => write!(f, "road set was not derived from this network"),
            NetworkError::TooLarge => write!(f, "network exceeds 2^32 segments or junctions"),
        }
    }
}

impl core::error::Error for NetworkError {}

/// A loaded network plus the features that were dropped on the way in.
#[derive(Debug, Clone)]
pub struct Ingest {
    pub network: RoadNetwork,
    pub rejected: Vec<FeatureDiagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RoadNetwork {
    segments: Vec<Segment>,
    junctions: Vec<Junction>,
    crs_note: String,
    projection: Option<LocalProjection>,
    fingerprint: u64,
}

enum JunctionIndex {
    Exact(BTreeMap<(u64, u64), JunctionId>),
    Grid { cell: f64, cells: BTreeMap<(i64, i64), Vec<JunctionId>> },
}

impl JunctionIndex {
    fn new(tolerance: f64) -> Self {
        if tolerance > 0.0 {
            JunctionIndex::Grid { cell: tolerance, cells: BTreeMap::new() }
        } else {
            JunctionIndex::Exact(BTreeMap::new())
        }
    }

    fn key(p: Point) -> (u64, u64) {
        // +0.0 so that -0.0 and 0.0 share a key
        ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
    }

    fn cell_of(cell: f64, p: Point) -> (i64, i64) {
        (libm::floor(p.x / cell) as i64, libm::floor(p.y / cell) as i64)
    }

    fn find(&self, p: Point, junctions: &[Junction]) -> Option<JunctionId> {
        match self {
            JunctionIndex::Exact(map) => map.get(&Self::key(p)).copied(),
            JunctionIndex::Grid { cell, cells } => {
                let (cx, cy) = Self::cell_of(*cell, p);
                let mut best: Option<(f64, JunctionId)> = None;
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for &j in cells.get(&(cx + dx, cy + dy)).into_iter().flatten() {
                            let d = junctions[j.index()].location.distance(p);
                            if d <= *cell && best.is_none_or(|(bd, bj)| d < bd || (d == bd && j < bj)) {
                                best = Some((d, j));
                            }
                        }
                    }
                }
                best.map(|(_, j)| j)
            }
        }
    }

    fn insert(&mut self, p: Point, id: JunctionId) {
        match self {
            JunctionIndex::Exact(map) => {
                map.insert(Self::key(p), id);
            }
            JunctionIndex::Grid { cell, cells } => {
                cells.entry(Self::cell_of(*cell, p)).or_default().push(id);
            }
        }
    }
}

fn fnv1a(hash: &mut u64, bytes: &[u8]) {
    for &b in bytes {
        *hash ^= b as u64;
        *hash = hash.wrapping_mul(0x100_0000_01b3);
    }
}

/// Builds a network from line features: junctions at shared endpoints,
/// sequential ids in input order, optional projection of lon/lat input.
pub fn load_network(features: &[LineFeature], opts: &IngestOptions) -> Result<Ingest, NetworkError> {
    if features.is_empty() {
        return Err(NetworkError::Empty);
    }
    let (projection, crs_note) = match opts.crs {
        Crs::Planar => (None, String::from("planar input; no projection applied")),
        Crs::LonLat => {
            let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
            for p in features.iter().flat_map(|f| f.coords.iter()).filter(|p| p.is_finite()) {
                sx += p.x;
                sy += p.y;
                n += 1;
            }
            let n = n.max(1) as f64;
            let proj = LocalProjection { lon0: sx / n, lat0: sy / n };
            let note = alloc::format!(
                "lon/lat input projected to meters (azimuthal equidistant about lon {:.6}, lat {:.6})",
                proj.lon0,
                proj.lat0
            );
            (Some(proj), note)
        }
    };

    let mut segments: Vec<Segment> = Vec::new();
    let mut junctions: Vec<Junction> = Vec::new();
    let mut index = JunctionIndex::new(opts.snap_tolerance);
    let mut rejected = Vec::new();

    for (feature_index, feature) in features.iter().enumerate() {
        let reject = |reason| FeatureDiagnostic { feature_index, source_id: feature.id.clone(), reason };
        if let Some(i) = feature.coords.iter().position(|p| !p.is_finite()) {
            rejected.push(reject(GeometryError::NonFinite { index: i }));
            continue;
        }
        let mut pts: Vec<Point> = match projection {
            Some(proj) => feature.coords.iter().map(|p| proj.project(p.x, p.y)).collect(),
            None => feature.coords.clone(),
        };
        pts.dedup();
        if pts.len() < 2 {
            rejected.push(reject(GeometryError::TooFewPoints { count: pts.len() }));
            continue;
        }
        let (p0, pn) = (pts[0], pts[pts.len() - 1]);
        let start = index.find(p0, &junctions);
        let start_loc = start.map_or(p0, |j| junctions[j.index()].location);
        let end = index.find(pn, &junctions);
        let closes_on_new_start = start.is_none()
            && end.is_none()
            && (pn == p0 || (opts.snap_tolerance > 0.0 && pn.distance(p0) <= opts.snap_tolerance));
        let end_loc = match end {
            Some(j) => junctions[j.index()].location,
            None if closes_on_new_start => start_loc,
            None => pn,
        };
        let last = pts.len() - 1;
        pts[0] = start_loc;
        pts[last] = end_loc;
        pts.dedup();
        let geometry = match Polyline::new(pts) {
            Ok(g) => g,
            Err(e) => {
                rejected.push(reject(e));
                continue;
            }
        };
        if junctions.len() + 2 > u32::MAX as usize || segments.len() >= u32::MAX as usize {
            return Err(NetworkError::TooLarge);
        }
        let mut junction_for = |found: Option<JunctionId>, loc: Point, junctions: &mut Vec<Junction>| match found {
            Some(j) => j,
            None => {
                let id = JunctionId(junctions.len() as u32);
                junctions.push(Junction { id, location: loc, incident: Vec::new() });
                index.insert(loc, id);
                id
            }
        };
        let from = junction_for(start, start_loc, &mut junctions);
        let to = if closes_on_new_start { from } else { junction_for(end, end_loc, &mut junctions) };
        let id = SegmentId(segments.len() as u32);
        junctions[from.index()].incident.push((id, SegmentEnd::Start));
        junctions[to.index()].incident.push((id, SegmentEnd::End));
        let length = geometry.length();
        segments.push(Segment {
            id,
            geometry,
            name: feature.name.clone(),
            source_id: feature.id.clone(),
            from,
            to,
            length,
        });
    }

    if segments.is_empty() {
        return Err(NetworkError::NoValidFeatures { diagnostics: rejected });
    }
    Ok(Ingest { network: RoadNetwork::assemble(segments, junctions, crs_note, projection), rejected })
}

impl RoadNetwork {
    fn assemble(
        segments: Vec<Segment>,
        mut junctions: Vec<Junction>,
        crs_note: String,
        projection: Option<LocalProjection>,
    ) -> Self {
        for j in &mut junctions {
            j.incident.sort();
        }
        let mut fingerprint = 0xcbf2_9ce4_8422_2325u64;
        for s in &segments {
            fnv1a(&mut fingerprint, &s.from.0.to_le_bytes());
            fnv1a(&mut fingerprint, &s.to.0.to_le_bytes());
            for p in s.geometry.points() {
                fnv1a(&mut fingerprint, &p.x.to_bits().to_le_bytes());
                fnv1a(&mut fingerprint, &p.y.to_bits().to_le_bytes());
            }
        }
        Self { segments, junctions, crs_note, projection, fingerprint }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn junctions(&self) -> &[Junction] {
        &self.junctions
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id.index()]
    }

    pub fn junction(&self, id: JunctionId) -> &Junction {
        &self.junctions[id.index()]
    }

    pub fn get_segment(&self, id: SegmentId) -> Option<&Segment> {
        self.segments.get(id.index())
    }

    pub fn crs_note(&self) -> &str {
        &self.crs_note
    }

    pub fn projection(&self) -> Option<LocalProjection> {
        self.projection
    }

    /// Hash of topology and geometry, used to tie derived road sets to
    /// the network they came from.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Axis-aligned bounds as (min, max).
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.segments.iter().flat_map(|s| s.geometry.points()) {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.distance(hi)
    }

    /// The other endpoint of `segment` seen from `junction`.
    pub fn opposite(&self, segment: SegmentId, end: SegmentEnd) -> JunctionId {
        self.segment(segment).junction_at(end.opposite())
    }

    /// Component label per junction; labels are dense and ordered by the
    /// lowest junction id in each component.
    pub fn connected_components(&self) -> Vec<u32> {
        let mut label = alloc::vec![u32::MAX; self.junctions.len()];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.junctions.len() {
            if label[start] != u32::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(j) = stack.pop() {
                for &(s, end) in &self.junctions[j].incident {
                    let other = self.opposite(s, end).index();
                    if label[other] == u32::MAX {
                        label[other] = next;
                        stack.push(other);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().iter().copied().max().map_or(0, |m| m as usize + 1)
    }
}

/// Two segments crossing away from any junction they share.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub a: SegmentId,
    pub b: SegmentId,
    pub at: Point,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodingReport {
    pub crossings: Vec<Crossing>,
    /// Distinct junctions closer than the tolerance: (a, b, distance).
    pub close_junctions: Vec<(JunctionId, JunctionId, f64)>,
}

impl NodingReport {
    /// Routing needs a network without unnoded crossings.
    pub fn is_routable(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty() && self.close_junctions.is_empty()
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_edge(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Contact points between two edges: a single representative for a point
/// contact, or the overlap endpoints for collinear overlap.
fn edge_contacts(a0: Point, a1: Point, b0: Point, b1: Point) -> Vec<Point> {
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    let mut out = Vec::new();
    if d1 == 0.0 && d2 == 0.0 {
        // collinear: collect shared interval endpoints
        for p in [a0, a1] {
            if on_edge(b0, b1, p) {
                out.push(p);
            }
        }
        for p in [b0, b1] {
            if on_edge(a0, a1, p) && !out.contains(&p) {
                out.push(p);
            }
        }
        return out;
    }
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        let t = d1 / (d1 - d2);
        out.push(a0.lerp(a1, t));
        return out;
    }
    for (val, p, e0, e1) in [(d1, a0, b0, b1), (d2, a1, b0, b1), (d3, b0, a0, a1), (d4, b1, a0, a1)] {
        if val == 0.0 && on_edge(e0, e1, p) && !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn bbox(points: &[Point]) -> (Point, Point) {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Lists crossings without a junction and junctions closer than `tolerance`.
pub fn validate_noding(net: &RoadNetwork, tolerance: f64) -> NodingReport {
    let mut report = NodingReport::default();
    let boxes: Vec<(Point, Point)> = net.segments.iter().map(|s| bbox(s.geometry.points())).collect();
    let mut order: Vec<usize> = (0..net.segments.len()).collect();
    order.sort_by(|&a, &b| boxes[a].0.x.total_cmp(&boxes[b].0.x).then(a.cmp(&b)));

    let mut found = BTreeMap::new();
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j].0.x > boxes[i].1.x {
                break;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bj.0.y > bi.1.y || bi.0.y > bj.1.y {
                continue;
            }
            let (sa, sb) = (&net.segments[i], &net.segments[j]);
            let shared: Vec<Point> = [sa.from, sa.to]
                .into_iter()
                .filter(|jid| *jid == sb.from || *jid == sb.to)
                .map(|jid| net.junction(jid).location)
                .collect();
            'pair: for ea in sa.geometry.points().windows(2) {
                for eb in sb.geometry.points().windows(2) {
                    let contacts = edge_contacts(ea[0], ea[1], eb[0], eb[1]);
                    let overlap = contacts.len() >= 2;
                    if let Some(&p) = contacts.iter().find(|p| overlap || !shared.contains(p)) {
                        let key = (i.min(j), i.max(j));
                        found.entry(key).or_insert(p);
                        break 'pair;
                    }
                }
            }
        }
    }
    report.crossings = found
        .into_iter()
        .map(|((a, b), at)| Crossing { a: SegmentId(a as u32), b: SegmentId(b as u32), at })
        .collect();

    if tolerance > 0.0 {
        let mut js: Vec<&Junction> = net.junctions.iter().collect();
        js.sort_by(|a, b| a.location.x.total_cmp(&b.location.x).then(a.id.cmp(&b.id)));
        for (k, a) in js.iter().enumerate() {
            for b in &js[k + 1..] {
                if b.location.x - a.location.x >= tolerance {
                    break;
                }
                let d = a.location.distance(b.location);
                if d < tolerance {
                    report.close_junctions.push((a.id.min(b.id), a.id.max(b.id), d));
                }
            }
        }
        report.close_junctions.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    }
    report
}

/// Size of the network from the segment and road perspectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NetworkStats {
    pub arcs: usize,
    pub arcs_x: usize,
    pub roads_i: usize,
    pub roads_i_x: usize,
    pub roads_ii: usize,
    pub roads_ii_x: usize,
}

impl NetworkStats {
    /// Road count over segment count; how much smaller the road graph is.
    pub fn size_ratio(&self) -> f64 {
        if self.arcs == 0 {
            0.0
        } else {
            self.roads_i as f64 / self.arcs as f64
        }
    }
}

/// Number of unordered road pairs sharing at least one junction.
pub fn road_intersections(net: &RoadNetwork, rs: &RoadSet) -> usize {
    let mut pairs = BTreeSet::new();
    for j in &net.junctions {
        let mut roads: Vec<_> = j.incident.iter().map(|&(s, _)| rs.road_of(s)).collect();
        roads.sort();
        roads.dedup();
        for (k, &a) in roads.iter().enumerate() {
            for &b in &roads[k + 1..] {
                pairs.insert((a, b));
            }
        }
    }
    pairs.len()
}

pub fn network_stats(net: &RoadNetwork, roads_i: &RoadSet, roads_ii: &RoadSet) -> Result<NetworkStats, NetworkError> {
    for rs in [roads_i, roads_ii] {
        if !rs.derived_from(net) {
            return Err(NetworkError::RoadSetMismatch);
        }
    }
    Ok(NetworkStats {
        arcs: net.segments.len(),
        arcs_x: net.junctions.iter().filter(|j| j.degree() >= 2).count(),
        roads_i: roads_i.roads().len(),
        roads_i_x: road_intersections(net, roads_i),
        roads_ii: roads_ii.roads().len(),
        roads_ii_x: road_intersections(net, roads_ii),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::natural_roads::{build_natural_roads, default_split_params, split_natural_roads};

    fn line(pts: &[(f64, f64)]) -> LineFeature {
        LineFeature::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    fn load(features: &[LineFeature]) -> RoadNetwork {
        load_network(features, &IngestOptions::default()).unwrap().network
    }

    #[test]
    fn grid_counts() {
        let net = fixtures::grid(4, 4, 1.0);
        assert_eq!(net.segments().len(), 24);
        assert_eq!(net.junctions().len(), 16);
    }

    #[test]
    fn small_inputs() {
        let one = load(&[line(&[(0.0, 0.0), (1.0, 0.0)])]);
        assert_eq!((one.segments().len(), one.junctions().len()), (1, 2));

        let two = load(&[line(&[(0.0, 0.0), (1.0, 0.0)]), line(&[(1.0, 0.0), (1.0, 1.0)])]);
        assert_eq!((two.segments().len(), two.junctions().len()), (2, 3));
        let shared = two.junctions().iter().find(|j| j.location == Point::new(1.0, 0.0)).unwrap();
        assert_eq!(shared.degree(), 2);
    }

    #[test]
    fn empty_and_rejected_input() {
        assert_eq!(load_network(&[], &IngestOptions::default()).unwrap_err(), NetworkError::Empty);
        let err = load_network(&[line(&[(1.0, 1.0), (1.0, 1.0)])], &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, NetworkError::NoValidFeatures { ref diagnostics } if diagnostics.len() == 1));

        let ingest = load_network(
            &[line(&[(0.0, 0.0), (1.0, 0.0)]), line(&[(5.0, 5.0)])],
            &IngestOptions::default(),
        )
        .unwrap();
        assert_eq!(ingest.network.segments().len(), 1);
        assert_eq!(ingest.rejected.len(), 1);
        assert_eq!(ingest.rejected[0].feature_index, 1);
    }

    #[test]
    fn snapping_merges_near_endpoints() {
        let features = [line(&[(0.0, 0.0), (1.0, 0.0)]), line(&[(1.0005, 0.0), (2.0, 0.0)])];
        let exact = load(&features);
        assert_eq!(exact.junctions().len(), 4);
        let snapped = load_network(&features, &IngestOptions { snap_tolerance: 0.01, ..Default::default() })
            .unwrap()
            .network;
        assert_eq!(snapped.junctions().len(), 3);
        assert_eq!(snapped.segment(SegmentId(1)).geometry.first(), Point::new(1.0, 0.0));
    }

    #[test]
    fn handshake_holds() {
        for net in [fixtures::grid(4, 4, 1.0), fixtures::perturbed_grid(7, 7, 5.0, 3), fixtures::radial(3, 8, 10.0)] {
            let ends: usize = net.junctions().iter().map(|j| j.degree()).sum();
            assert_eq!(ends, 2 * net.segments().len());
            for j in net.junctions() {
                for &(s, end) in &j.incident {
                    assert_eq!(net.segment(s).junction_at(end), j.id);
                }
            }
        }
    }

    #[test]
    fn noding_findings() {
        assert!(validate_noding(&fixtures::grid(4, 4, 1.0), 1e-6).is_empty());

        let crossing = load(&[line(&[(0.0, 0.0), (2.0, 2.0)]), line(&[(0.0, 2.0), (2.0, 0.0)])]);
        let report = validate_noding(&crossing, 0.0);
        assert_eq!(report.crossings.len(), 1);
        assert_eq!(report.crossings[0].at, Point::new(1.0, 1.0));
        assert!(!report.is_routable());

        let near = load(&[line(&[(0.0, 0.0), (1.0, 0.0)]), line(&[(1.001, 0.0), (2.0, 0.0)])]);
        let report = validate_noding(&near, 0.01);
        assert!(report.crossings.is_empty());
        assert_eq!(report.close_junctions.len(), 1);

        // an endpoint resting on another segment's interior is unnoded too
        let tee = load(&[line(&[(0.0, 0.0), (2.0, 0.0)]), line(&[(1.0, 0.0), (1.0, 1.0)])]);
        assert_eq!(validate_noding(&tee, 0.0).crossings.len(), 1);
    }

    #[test]
    fn stats_on_grid_and_single_segment() {
        let net = fixtures::grid(4, 4, 1.0);
        let rs = build_natural_roads(&net, 45.0);
        let split = split_natural_roads(&net, &rs, &default_split_params(&net));
        let stats = network_stats(&net, &rs, &split).unwrap();
        assert_eq!(
            stats,
            NetworkStats { arcs: 24, arcs_x: 16, roads_i: 8, roads_i_x: 16, roads_ii: 8, roads_ii_x: 16 }
        );

        let one = load(&[line(&[(0.0, 0.0), (1.0, 0.0)])]);
        let rs1 = build_natural_roads(&one, 45.0);
        let stats = network_stats(&one, &rs1, &rs1).unwrap();
        assert_eq!((stats.arcs, stats.arcs_x, stats.roads_i, stats.roads_i_x), (1, 0, 1, 0));

        assert_eq!(network_stats(&one, &rs, &rs), Err(NetworkError::RoadSetMismatch));
    }

    #[test]
    fn ingest_is_deterministic() {
        let features = fixtures::perturbed_grid_features(6, 6, 5.0, 11);
        let a = load(&features);
        let b = load(&features);
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn projection_matches_haversine() {
        let base = (17.14, 60.67);
        let proj = LocalProjection { lon0: base.0 + 0.3, lat0: base.1 + 0.3 };
        let pts = [base, (base.0 + 0.6, base.1), (base.0, base.1 + 0.6), (base.0 + 0.55, base.1 + 0.4)];
        for a in pts {
            for b in pts {
                if a == b {
                    continue;
                }
                let planar = proj.project(a.0, a.1).distance(proj.project(b.0, b.1));
                let truth = haversine(a, b);
                assert!((planar - truth).abs() / truth < 0.005, "{planar} vs {truth}");
            }
        }
        let back = proj.unproject(proj.project(17.5, 60.9));
        assert!((back.0 - 17.5).abs() < 1e-9 && (back.1 - 60.9).abs() < 1e-9);
    }

    #[test]
    fn lonlat_ingest_projects_about_centroid() {
        let f = [line(&[(10.0, 50.0), (10.01, 50.0)]), line(&[(10.01, 50.0), (10.01, 50.01)])];
        let net = load_network(&f, &IngestOptions { crs: Crs::LonLat, snap_tolerance: 0.0 }).unwrap().network;
        let len = net.segment(SegmentId(0)).length;
        let truth = haversine((10.0, 50.0), (10.01, 50.0));
        assert!((len - truth).abs() / truth < 0.005);
        assert!(net.projection().is_some());
    }
}
