//! Route engines over a network and its road sets.
//!
//! * [`Mode::FewestTurn`] searches the unsplit road graph for the fewest
//!   road changes, then realizes each candidate road sequence and keeps the
//!   shortest.
//! * [`Mode::FewestTurnShortest`] runs the same search over split roads.
//! * [`Mode::Shortest`] is plain Dijkstra over junctions.
//! * [`Mode::Simplest`] minimizes (sharp turns, distance) over directed
//!   segment traversals.
//!
//! Endpoints are [`Anchor`]s: a segment plus an arc-length fraction. An
//! anchor at offset 0 or 1 sits on a junction and belongs to every road
//! through that junction.

mod engines;
mod realize;
pub mod topology;

use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::geometry::{deflection_angle, Point};
use crate::natural_roads::{RoadId, RoadSet};
use crate::network::{JunctionId, RoadNetwork, SegmentEnd, SegmentId};

pub use engines::{
    fewest_turn_and_shortest_route, fewest_turn_route, shortest_path, simplest_path, Router, DEFAULT_SEQUENCE_CAP,
};
pub use realize::{realize_route, Realized};
pub use topology::{
    enumerate_fewest_turn_sequences, shortest_topological_distance, Enumeration, TopologicalDistance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Mode {
    /// Shortest geometric distance.
    Shortest,
    /// Fewest sharp turns, then distance (baseline).
    Simplest,
    /// Fewest natural-road changes, then distance.
    FewestTurn,
    /// Fewest changes over split roads, then distance.
    FewestTurnShortest,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Shortest, Mode::Simplest, Mode::FewestTurn, Mode::FewestTurnShortest];

    /// Short tag as used on the command line and in reports.
    pub fn tag(self) -> &'static str {
        match self {
            Mode::Shortest => "ST",
            Mode::Simplest => "SP",
            Mode::FewestTurn => "FT",
            Mode::FewestTurnShortest => "FTS",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.tag().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A position on the network: a segment and an arc-length fraction of it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Anchor {
    pub segment: SegmentId,
    pub offset: f64,
}

impl Anchor {
    pub fn new(net: &RoadNetwork, segment: SegmentId, offset: f64) -> Result<Self, RouteError> {
        net.get_segment(segment).ok_or(RouteError::UnknownSegment(segment))?;
        if !(0.0..=1.0).contains(&offset) {
            return Err(RouteError::InvalidOffset);
        }
        Ok(Self { segment, offset })
    }

    /// Anchor on junction `j`: the lowest-id incident segment at the
    /// matching end.
    pub fn at_junction(net: &RoadNetwork, j: JunctionId) -> Self {
        let (segment, end) = net.junction(j).incident[0];
        Self { segment, offset: if end == SegmentEnd::Start { 0.0 } else { 1.0 } }
    }

    pub fn point(&self, net: &RoadNetwork) -> Point {
        net.segment(self.segment).geometry.point_at(self.offset)
    }
}

/// Anchor resolved against the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Location {
    Junction(JunctionId),
    OnSegment { segment: SegmentId, offset: f64 },
}

impl Location {
    pub(crate) fn resolve(net: &RoadNetwork, a: Anchor) -> Result<Location, RouteError> {
        let seg = net.get_segment(a.segment).ok_or(RouteError::UnknownSegment(a.segment))?;
        if !(0.0..=1.0).contains(&a.offset) {
            return Err(RouteError::InvalidOffset);
        }
        Ok(if a.offset == 0.0 {
            Location::Junction(seg.from)
        } else if a.offset == 1.0 {
            Location::Junction(seg.to)
        } else {
            Location::OnSegment { segment: a.segment, offset: a.offset }
        })
    }

    /// Roads of `rs` the location belongs to, ascending.
    pub(crate) fn roads(&self, net: &RoadNetwork, rs: &RoadSet) -> Vec<RoadId> {
        match *self {
            Location::Junction(j) => rs.roads_at(net, j),
            Location::OnSegment { segment, .. } => alloc::vec![rs.road_of(segment)],
        }
    }

    /// Ways to leave the location: (junction, cost, partial step).
    pub(crate) fn exits(&self, net: &RoadNetwork) -> Vec<(JunctionId, f64, Option<PathStep>)> {
        match *self {
            Location::Junction(j) => alloc::vec![(j, 0.0, None)],
            Location::OnSegment { segment, offset } => {
                let s = net.segment(segment);
                alloc::vec![
                    (s.from, offset * s.length, Some(PathStep::partial(segment, offset, 0.0))),
                    (s.to, (1.0 - offset) * s.length, Some(PathStep::partial(segment, offset, 1.0))),
                ]
            }
        }
    }

    /// Ways to arrive at the location: (junction, cost, partial step).
    pub(crate) fn entries(&self, net: &RoadNetwork) -> Vec<(JunctionId, f64, Option<PathStep>)> {
        match *self {
            Location::Junction(j) => alloc::vec![(j, 0.0, None)],
            Location::OnSegment { segment, offset } => {
                let s = net.segment(segment);
                alloc::vec![
                    (s.from, offset * s.length, Some(PathStep::partial(segment, 0.0, offset))),
                    (s.to, (1.0 - offset) * s.length, Some(PathStep::partial(segment, 1.0, offset))),
                ]
            }
        }
    }

    /// Direct walk when both locations are on the same segment.
    pub(crate) fn direct(&self, other: &Location, net: &RoadNetwork) -> Option<(f64, PathStep)> {
        match (*self, *other) {
            (
                Location::OnSegment { segment: a, offset: ta },
                Location::OnSegment { segment: b, offset: tb },
            ) if a == b => Some(((ta - tb).abs() * net.segment(a).length, PathStep::partial(a, ta, tb))),
            _ => None,
        }
    }
}

/// Traversal of (part of) one segment, between two arc-length fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PathStep {
    pub segment: SegmentId,
    /// Travel direction relative to the segment's own from -> to.
    pub forward: bool,
    pub from_offset: f64,
    pub to_offset: f64,
}

impl PathStep {
    pub fn full(segment: SegmentId, forward: bool) -> Self {
        let (from_offset, to_offset) = if forward { (0.0, 1.0) } else { (1.0, 0.0) };
        Self { segment, forward, from_offset, to_offset }
    }

    pub fn partial(segment: SegmentId, from_offset: f64, to_offset: f64) -> Self {
        Self { segment, forward: to_offset >= from_offset, from_offset, to_offset }
    }

    pub fn length(&self, net: &RoadNetwork) -> f64 {
        (self.to_offset - self.from_offset).abs() * net.segment(self.segment).length
    }

    pub fn entry_end(&self) -> SegmentEnd {
        if self.forward {
            SegmentEnd::Start
        } else {
            SegmentEnd::End
        }
    }

    pub fn exit_end(&self) -> SegmentEnd {
        self.entry_end().opposite()
    }

    pub fn points(&self, net: &RoadNetwork) -> Vec<Point> {
        net.segment(self.segment).geometry.slice(self.from_offset, self.to_offset)
    }
}

/// A computed route.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Route {
    pub mode: Mode,
    /// Roads in traversal order. Split roads for FTS, unsplit otherwise.
    pub road_sequence: Vec<RoadId>,
    pub path: Vec<PathStep>,
    pub distance: f64,
    /// Changes between roads of the mode's own road set (split roads for
    /// FTS, unsplit natural roads otherwise).
    pub turns_topological: u32,
    /// Changes between unsplit natural roads along the path.
    pub turns_perceptual: u32,
    pub origin: Anchor,
    pub destination: Anchor,
    /// The candidate enumeration hit its cap (FT/FTS only).
    pub truncated: bool,
}

impl Route {
    /// Realized geometry; consecutive steps share their junction point once.
    pub fn points(&self, net: &RoadNetwork) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for step in &self.path {
            for p in step.points(net) {
                if out.last() != Some(&p) {
                    out.push(p);
                }
            }
        }
        if out.len() == 1 {
            out.push(out[0]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteError {
    EmptyNetwork,
    UnknownSegment(SegmentId),
    UnknownRoad(RoadId),
    InvalidOffset,
    /// No path between the endpoints.
    Unreachable,
    /// The road sequence cannot be walked between the anchors.
    InfeasibleSequence,
    /// Every enumerated fewest-turn sequence was infeasible.
    NoFeasibleSequence { tried: usize },
    /// Consecutive roads in a sequence do not meet.
    NotAdjacent(RoadId, RoadId),
    /// A road set of the wrong kind, or from another network.
    RoadSetMismatch,
    UnmappedSegment(SegmentId),
}

impl fmt::Display for RouteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouteError::EmptyNetwork => write!(f, "empty network"),
            RouteError::UnknownSegment(s) => write!(f, "unknown segment {s}"),
            RouteError::UnknownRoad(r) => write!(f, "unknown road {r}"),
            RouteError::InvalidOffset => write!(f, "anchor offset outside [0, 1]"),
            RouteError::Unreachable => write!(f, "destination unreachable from origin"),
            RouteError::InfeasibleSequence => write!(f, "road sequence cannot be realized between the anchors"),
            RouteError::NoFeasibleSequence { tried } => {
                write!(f, "none of {tried} fewest-turn road sequences could be realized")
            }
            RouteError::NotAdjacent(a, b) => write!(f, "roads {a} and {b} do not intersect"),
            RouteError::RoadSetMismatch => write!(f, "road set does not match the network or mode"),
            RouteError::UnmappedSegment(s) => write!(f, "segment {s} has no road"),
        }
    }
}

impl core::error::Error for RouteError {}

/// What to locate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Query {
    Point(Point),
    Segment(SegmentId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    pub anchor: Anchor,
    pub road: RoadId,
    /// Distance from the query point to the network (0 for segment queries).
    pub distance: f64,
}

/// Nearest segment to a point, with its projected offset. Candidates within
/// 1e-9 of the best distance resolve to the lowest segment id.
pub fn locate(net: &RoadNetwork, rs: &RoadSet, query: Query) -> Result<Located, RouteError> {
    if net.segments().is_empty() {
        return Err(RouteError::EmptyNetwork);
    }
    let (anchor, distance) = match query {
        Query::Segment(s) => (Anchor::new(net, s, 0.5)?, 0.0),
        Query::Point(p) => {
            let mut best: Option<(f64, SegmentId, f64)> = None;
            for seg in net.segments() {
                let (d, t) = seg.geometry.project(p);
                if best.is_none_or(|(bd, _, _)| d < bd - 1e-9) {
                    best = Some((d, seg.id, t));
                }
            }
            let (d, segment, mut t) = best.expect("network is non-empty");
            if t < 1e-12 {
                t = 0.0;
            } else if t > 1.0 - 1e-12 {
                t = 1.0;
            }
            (Anchor { segment, offset: t }, d)
        }
    };
    let road = rs.try_road_of(anchor.segment).ok_or(RouteError::UnmappedSegment(anchor.segment))?;
    Ok(Located { anchor, road, distance })
}

/// Number of places where consecutive path steps belong to different roads.
pub fn count_turns(path: &[PathStep], segment_to_road: &[RoadId]) -> Result<u32, RouteError> {
    let mut turns = 0;
    let mut prev: Option<RoadId> = None;
    for step in path {
        let road = *segment_to_road.get(step.segment.index()).ok_or(RouteError::UnmappedSegment(step.segment))?;
        if prev.is_some_and(|p| p != road) {
            turns += 1;
        }
        prev = Some(road);
    }
    Ok(turns)
}

/// Number of junction transitions along a path whose deflection exceeds
/// `threshold_deg`.
pub fn deflection_turns(net: &RoadNetwork, path: &[PathStep], threshold_deg: f64) -> u32 {
    path.windows(2)
        .filter(|w| {
            let arrive = net.segment(w[0].segment).arriving_direction(w[0].exit_end());
            let depart = net.segment(w[1].segment).departing_direction(w[1].entry_end());
            deflection_angle(arrive, depart).unwrap_or(0.0) > threshold_deg
        })
        .count() as u32
}

/// Distinct consecutive roads visited by a path.
pub fn road_sequence_of(path: &[PathStep], rs: &RoadSet) -> Vec<RoadId> {
    let mut out: Vec<RoadId> = Vec::new();
    for step in path {
        let r = rs.road_of(step.segment);
        if out.last() != Some(&r) {
            out.push(r);
        }
    }
    out
}
