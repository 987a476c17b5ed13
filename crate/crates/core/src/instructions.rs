//! Hierarchical turn-by-turn directions: route, then natural roads, then
//! named runs within each road, then segments.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::geometry::signed_deflection;
use crate::natural_roads::{RoadId, RoadSet};
use crate::network::{RoadNetwork, SegmentId};
use crate::routing::{Mode, PathStep, Route};

/// Deflections below this many degrees read as "straight".
pub const STRAIGHT_TOLERANCE_DEG: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnDirection {
    Left,
    Right,
    Straight,
}

impl TurnDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            TurnDirection::Left => "left",
            TurnDirection::Right => "right",
            TurnDirection::Straight => "straight",
        }
    }

    /// Classifies a signed deflection (positive = counter-clockwise).
    pub fn from_signed(deg: f64) -> Self {
        if deg.abs() < STRAIGHT_TOLERANCE_DEG {
            TurnDirection::Straight
        } else if deg > 0.0 {
            TurnDirection::Left
        } else {
            TurnDirection::Right
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentEntry {
    pub segment: SegmentId,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedEntry {
    pub name: Option<String>,
    pub length: f64,
    pub segments: Vec<SegmentEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadEntry {
    pub road: RoadId,
    pub length: f64,
    /// Direction taken onto this road; `None` for the first road.
    pub turn: Option<TurnDirection>,
    pub named: Vec<NamedEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstructionDocument {
    pub mode: Mode,
    pub length: f64,
    pub roads: Vec<RoadEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstructionError {
    /// The route's steps do not group into its road sequence under this road set.
    RoadSetMismatch,
    UnknownSegment(SegmentId),
}

impl fmt::Display for InstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstructionError::RoadSetMismatch => write!(f, "route does not match the road set"),
            InstructionError::UnknownSegment(s) => write!(f, "unknown segment {s}"),
        }
    }
}

impl core::error::Error for InstructionError {}

fn turn_between(net: &RoadNetwork, prev: &PathStep, next: &PathStep) -> TurnDirection {
    let arrive = net.segment(prev.segment).arriving_direction(prev.exit_end());
    let depart = net.segment(next.segment).departing_direction(next.entry_end());
    TurnDirection::from_signed(signed_deflection(arrive, depart).unwrap_or(0.0))
}

pub fn route_instructions(route: &Route, rs: &RoadSet, net: &RoadNetwork) -> Result<InstructionDocument, InstructionError> {
    if !rs.derived_from(net) {
        return Err(InstructionError::RoadSetMismatch);
    }
    let mut roads: Vec<RoadEntry> = Vec::new();
    let mut prev: Option<&PathStep> = None;
    for step in &route.path {
        let seg = net.get_segment(step.segment).ok_or(InstructionError::UnknownSegment(step.segment))?;
        let road = rs.road_of(step.segment);
        let entry = SegmentEntry { segment: step.segment, length: step.length(net) };
        if roads.last().is_none_or(|r| r.road != road) {
            let turn = prev.map(|p| turn_between(net, p, step));
            roads.push(RoadEntry { road, length: 0.0, turn, named: Vec::new() });
        }
        let current = roads.last_mut().expect("pushed above");
        current.length += entry.length;
        match current.named.last_mut() {
            Some(n) if n.name == seg.name => {
                n.length += entry.length;
                n.segments.push(entry);
            }
            _ => current.named.push(NamedEntry { name: seg.name.clone(), length: entry.length, segments: alloc::vec![entry] }),
        }
        prev = Some(step);
    }
    if !roads.iter().map(|r| r.road).eq(route.road_sequence.iter().copied()) {
        return Err(InstructionError::RoadSetMismatch);
    }
    Ok(InstructionDocument { mode: route.mode, length: route.distance, roads })
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

impl InstructionDocument {
    pub fn turn_count(&self) -> usize {
        self.roads.len().saturating_sub(1)
    }

    /// Segment ids in document order.
    pub fn segments(&self) -> impl Iterator<Item = SegmentId> + '_ {
        self.roads.iter().flat_map(|r| r.named.iter().flat_map(|n| n.segments.iter().map(|s| s.segment)))
    }

    pub fn to_xml(&self) -> String {
        let mut x = String::new();
        x.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            x,
            "<route mode=\"{}\" length=\"{}\" turns=\"{}\">",
            self.mode.tag(),
            self.length,
            self.turn_count()
        );
        for r in &self.roads {
            let _ = write!(x, "  <naturalRoad id=\"{}\" length=\"{}\"", r.road, r.length);
            if let Some(t) = r.turn {
                let _ = write!(x, " turn=\"{}\"", t.as_str());
            }
            x.push_str(">\n");
            for n in &r.named {
                x.push_str("    <namedRoad");
                if let Some(name) = &n.name {
                    let _ = write!(x, " name=\"{}\"", escape(name));
                }
                let _ = writeln!(x, " length=\"{}\">", n.length);
                for s in &n.segments {
                    let _ = writeln!(x, "      <segment id=\"{}\" length=\"{}\"/>", s.segment, s.length);
                }
                x.push_str("    </namedRoad>\n");
            }
            x.push_str("  </naturalRoad>\n");
        }
        x.push_str("</route>\n");
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::natural_roads::build_natural_roads;
    use crate::routing::{Anchor, Router};
    use crate::{network, SplitParams, DEFAULT_JOIN_ANGLE_DEG};

    fn grid_router() -> Router {
        let net = fixtures::grid(4, 4, 1.0);
        Router::new(net, DEFAULT_JOIN_ANGLE_DEG, SplitParams::new(1.0, 0.2).unwrap())
    }

    #[test]
    fn turn_classification() {
        assert_eq!(TurnDirection::from_signed(90.0), TurnDirection::Left);
        assert_eq!(TurnDirection::from_signed(-90.0), TurnDirection::Right);
        assert_eq!(TurnDirection::from_signed(9.9), TurnDirection::Straight);
        assert_eq!(TurnDirection::from_signed(-10.0), TurnDirection::Right);
    }

    #[test]
    fn single_road_route_has_no_turn() {
        let router = grid_router();
        let net = router.network();
        let from = Anchor::new(net, network::SegmentId(0), 0.25).unwrap();
        let to = Anchor::new(net, network::SegmentId(2), 0.75).unwrap();
        let route = router.route(Mode::FewestTurn, from, to).unwrap();
        let doc = route_instructions(&route, router.roads_for(Mode::FewestTurn), net).unwrap();
        assert_eq!(doc.roads.len(), 1);
        assert_eq!(doc.roads[0].turn, None);
        let xml = doc.to_xml();
        assert_eq!(xml.matches("<naturalRoad").count(), 1);
        assert!(!xml.contains("turn=\""));
    }

    #[test]
    fn two_road_grid_route() {
        let router = grid_router();
        let net = router.network();
        let f = fixtures::grid_junction(net, 1.0, 0, 0);
        let t = fixtures::grid_junction(net, 1.0, 3, 3);
        let route = router.route(Mode::FewestTurn, Anchor::at_junction(net, f), Anchor::at_junction(net, t)).unwrap();
        let doc = route_instructions(&route, router.roads_for(Mode::FewestTurn), net).unwrap();
        assert_eq!(doc.roads.len(), 2);
        assert_eq!(doc.roads.iter().map(|r| r.road).collect::<Vec<_>>(), route.road_sequence);
        assert!(doc.roads[0].turn.is_none());
        assert!(matches!(doc.roads[1].turn, Some(TurnDirection::Left | TurnDirection::Right)));
        let xml = doc.to_xml();
        assert_eq!(xml.matches(" turn=\"").count(), 1);
        assert_eq!(xml, doc.to_xml());
    }

    #[test]
    fn lengths_and_segments_are_conserved() {
        for seed in 0..20 {
            let net = fixtures::random_network(seed, 30);
            let router = Router::new(net, DEFAULT_JOIN_ANGLE_DEG, SplitParams::new(2.0, 0.2).unwrap());
            let net = router.network();
            let n = net.segments().len() as u32;
            let from = Anchor::new(net, network::SegmentId(0), 0.3).unwrap();
            let to = Anchor::new(net, network::SegmentId(n - 1), 0.6).unwrap();
            for mode in Mode::ALL {
                let route = router.route(mode, from, to).unwrap();
                let doc = route_instructions(&route, router.roads_for(mode), net).unwrap();
                let ids: Vec<_> = doc.segments().collect();
                assert_eq!(ids, route.path.iter().map(|s| s.segment).collect::<Vec<_>>());
                // independent recomputation from raw geometry
                let oracle: f64 = route
                    .path
                    .iter()
                    .map(|s| {
                        let pts = net.segment(s.segment).geometry.slice(s.from_offset, s.to_offset);
                        pts.windows(2).map(|w| w[0].distance(w[1])).sum::<f64>()
                    })
                    .sum();
                let total: f64 = doc.roads.iter().flat_map(|r| &r.named).flat_map(|n| &n.segments).map(|s| s.length).sum();
                assert!((total - oracle).abs() <= 1e-6 * oracle.max(1.0), "{mode}: {total} vs {oracle}");
                assert!((total - route.distance).abs() <= 1e-6 * oracle.max(1.0));
            }
        }
    }

    #[test]
    fn mismatched_road_set_is_rejected() {
        let router = grid_router();
        let net = router.network();
        let from = Anchor::new(net, network::SegmentId(0), 0.5).unwrap();
        let to = Anchor::new(net, network::SegmentId(20), 0.5).unwrap();
        let route = router.route(Mode::Shortest, from, to).unwrap();
        let other = fixtures::grid(3, 3, 1.0);
        let rs = build_natural_roads(&other, 45.0);
        assert_eq!(route_instructions(&route, &rs, net), Err(InstructionError::RoadSetMismatch));
    }

    #[test]
    fn names_are_escaped() {
        assert_eq!(escape("A & <B> \"c\""), "A &amp; &lt;B&gt; &quot;c&quot;");
    }
}
