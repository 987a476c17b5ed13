use alloc::collections::BinaryHeap;
use alloc::vec::Vec;

use super::realize::{path_length, realize, stationary, unwind, Entry, Pred};
use super::topology::enumerate_between;
use super::{count_turns, road_sequence_of, Anchor, Location, Mode, PathStep, Route, RouteError};
use crate::connectivity::{build_connectivity_graph, RoadGraph};
use crate::geometry::SplitParams;
use crate::natural_roads::{build_natural_roads, join_deflection, split_natural_roads, RoadSet, RoadSetKind};
use crate::network::{JunctionId, RoadNetwork, SegmentEnd, SegmentId};

pub const DEFAULT_SEQUENCE_CAP: usize = 10_000;

// candidates closer than this in distance count as equal
const DISTANCE_TIE: f64 = 1e-9;

fn check_set(net: &RoadNetwork, rs: &RoadSet, kind: RoadSetKind) -> Result<(), RouteError> {
    if rs.kind() != kind || !rs.derived_from(net) {
        return Err(RouteError::RoadSetMismatch);
    }
    Ok(())
}

fn stationary_route(mode: Mode, rs: &RoadSet, from: Anchor, to: Anchor) -> Route {
    Route {
        mode,
        road_sequence: alloc::vec![rs.road_of(from.segment)],
        path: stationary(from),
        distance: 0.0,
        turns_topological: 0,
        turns_perceptual: 0,
        origin: from,
        destination: to,
        truncated: false,
    }
}

/// Fewest natural-road changes between the anchors, shortest among those.
pub fn fewest_turn_route(
    net: &RoadNetwork,
    rs_unsplit: &RoadSet,
    g: &RoadGraph,
    from: Anchor,
    to: Anchor,
    cap: usize,
) -> Result<Route, RouteError> {
    check_set(net, rs_unsplit, RoadSetKind::Unsplit)?;
    fewest_turn(Mode::FewestTurn, net, rs_unsplit, g, rs_unsplit, from, to, cap)
}

/// The fewest-turn search run over split roads. Perceptual turns are still
/// counted against `rs_unsplit`.
pub fn fewest_turn_and_shortest_route(
    net: &RoadNetwork,
    rs_split: &RoadSet,
    g_split: &RoadGraph,
    rs_unsplit: &RoadSet,
    from: Anchor,
    to: Anchor,
    cap: usize,
) -> Result<Route, RouteError> {
    check_set(net, rs_split, RoadSetKind::Split)?;
    check_set(net, rs_unsplit, RoadSetKind::Unsplit)?;
    fewest_turn(Mode::FewestTurnShortest, net, rs_split, g_split, rs_unsplit, from, to, cap)
}

#[allow(clippy::too_many_arguments)]
fn fewest_turn(
    mode: Mode,
    net: &RoadNetwork,
    rs: &RoadSet,
    g: &RoadGraph,
    perceptual: &RoadSet,
    from: Anchor,
    to: Anchor,
    cap: usize,
) -> Result<Route, RouteError> {
    if g.node_count() != rs.roads().len() || g.kind() != rs.kind() {
        return Err(RouteError::RoadSetMismatch);
    }
    let src = Location::resolve(net, from)?;
    let dst = Location::resolve(net, to)?;
    if src == dst {
        return Ok(stationary_route(mode, rs, from, to));
    }
    let (d, found) = enumerate_between(g, &src.roads(net, rs), &dst.roads(net, rs), cap)?;
    let mut best: Option<(f64, usize, Vec<PathStep>)> = None;
    for (i, seq) in found.sequences.iter().enumerate() {
        let Ok(r) = realize(net, rs, seq, src, dst, from) else {
            continue;
        };
        if best.as_ref().is_none_or(|(bd, _, _)| r.distance < bd - DISTANCE_TIE) {
            best = Some((r.distance, i, r.path));
        }
    }
    let (distance, i, path) = best.ok_or(RouteError::NoFeasibleSequence { tried: found.sequences.len() })?;
    let turns_perceptual = count_turns(&path, perceptual.segment_to_road())?;
    Ok(Route {
        mode,
        road_sequence: found.sequences[i].clone(),
        path,
        distance,
        turns_topological: d.0,
        turns_perceptual,
        origin: from,
        destination: to,
        truncated: found.truncated,
    })
}

/// Minimum-distance path over junctions.
pub fn shortest_path(net: &RoadNetwork, rs_unsplit: &RoadSet, from: Anchor, to: Anchor) -> Result<Route, RouteError> {
    check_set(net, rs_unsplit, RoadSetKind::Unsplit)?;
    let src = Location::resolve(net, from)?;
    let dst = Location::resolve(net, to)?;
    if src == dst {
        return Ok(stationary_route(Mode::Shortest, rs_unsplit, from, to));
    }
    let nj = net.junctions().len();
    let (source, sink) = (nj, nj + 1);
    let mut dist = alloc::vec![f64::INFINITY; nj + 2];
    let mut pred: Vec<Pred> = alloc::vec![None; nj + 2];
    let mut done = alloc::vec![false; nj + 2];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { cost: 0.0, node: source });
    if let Some((d, step)) = src.direct(&dst, net) {
        dist[sink] = d;
        pred[sink] = Some((source, Some(step)));
        heap.push(Entry { cost: d, node: sink });
    }
    let entries = dst.entries(net);

    while let Some(Entry { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == sink {
            break;
        }
        let mut relax = |to: usize, c: f64, step: Option<PathStep>, heap: &mut BinaryHeap<Entry<f64>>| {
            if !done[to] && c < dist[to] {
                dist[to] = c;
                pred[to] = Some((node, step));
                heap.push(Entry { cost: c, node: to });
            }
        };
        if node == source {
            for (j, c, step) in src.exits(net) {
                relax(j.index(), c, step, &mut heap);
            }
            continue;
        }
        for &(s, end) in &net.junction(JunctionId(node as u32)).incident {
            let seg = net.segment(s);
            let other = seg.junction_at(end.opposite());
            relax(other.index(), cost + seg.length, Some(PathStep::full(s, end == SegmentEnd::Start)), &mut heap);
        }
        for &(e, c, step) in &entries {
            if e.index() == node {
                relax(sink, cost + c, step, &mut heap);
            }
        }
    }
    if !done[sink] {
        return Err(RouteError::Unreachable);
    }
    let mut path = unwind(&pred, sink);
    if path.is_empty() {
        path = stationary(from);
    }
    baseline_route(Mode::Shortest, net, rs_unsplit, path, from, to)
}

fn baseline_route(
    mode: Mode,
    net: &RoadNetwork,
    rs: &RoadSet,
    path: Vec<PathStep>,
    from: Anchor,
    to: Anchor,
) -> Result<Route, RouteError> {
    let turns = count_turns(&path, rs.segment_to_road())?;
    Ok(Route {
        mode,
        road_sequence: road_sequence_of(&path, rs),
        distance: path_length(net, &path),
        turns_topological: turns,
        turns_perceptual: turns,
        path,
        origin: from,
        destination: to,
        truncated: false,
    })
}

/// Lexicographic (sharp turns, distance) minimum over directed segment
/// traversals. A transition is a sharp turn when its deflection exceeds the
/// road set's join threshold. Reversing onto the segment just travelled is
/// not allowed.
pub fn simplest_path(net: &RoadNetwork, rs_unsplit: &RoadSet, from: Anchor, to: Anchor) -> Result<Route, RouteError> {
    check_set(net, rs_unsplit, RoadSetKind::Unsplit)?;
    let src = Location::resolve(net, from)?;
    let dst = Location::resolve(net, to)?;
    if src == dst {
        return Ok(stationary_route(Mode::Simplest, rs_unsplit, from, to));
    }
    let threshold = rs_unsplit.threshold_deg();
    let turn = |arrive: (SegmentId, SegmentEnd), depart: (SegmentId, SegmentEnd)| {
        u32::from(join_deflection(net, arrive, depart) > threshold)
    };
    // state 2s + 1: segment s travelled forward (head at `to`); 2s: backward
    let ns = net.segments().len() * 2;
    let (source, sink) = (ns, ns + 1);
    let state = |s: SegmentId, forward: bool| s.index() * 2 + usize::from(forward);
    let mut cost = alloc::vec![(u32::MAX, f64::INFINITY); ns + 2];
    let mut pred: Vec<Pred> = alloc::vec![None; ns + 2];
    let mut done = alloc::vec![false; ns + 2];
    let mut heap = BinaryHeap::new();
    cost[source] = (0, 0.0);
    heap.push(Entry { cost: (0u32, 0.0), node: source });

    let better = |a: (u32, f64), b: (u32, f64)| a.0 < b.0 || (a.0 == b.0 && a.1 < b.1);
    if let Some((d, step)) = src.direct(&dst, net) {
        cost[sink] = (0, d);
        pred[sink] = Some((source, Some(step)));
        heap.push(Entry { cost: (0, d), node: sink });
    }

    while let Some(Entry { cost: c, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == sink {
            break;
        }
        let mut relax = |to: usize, nc: (u32, f64), step: Option<PathStep>, heap: &mut BinaryHeap<Entry<(u32, f64)>>| {
            if !done[to] && better(nc, cost[to]) {
                cost[to] = nc;
                pred[to] = Some((node, step));
                heap.push(Entry { cost: nc, node: to });
            }
        };
        if node == source {
            match src {
                Location::Junction(j) => {
                    for &(s, end) in &net.junction(j).incident {
                        let fwd = end == SegmentEnd::Start;
                        relax(state(s, fwd), (0, net.segment(s).length), Some(PathStep::full(s, fwd)), &mut heap);
                    }
                    if let Location::OnSegment { segment, offset } = dst {
                        let seg = net.segment(segment);
                        for (end, at, len) in [(SegmentEnd::Start, 0.0, offset), (SegmentEnd::End, 1.0, 1.0 - offset)] {
                            if seg.junction_at(end) == j {
                                relax(sink, (0, len * seg.length), Some(PathStep::partial(segment, at, offset)), &mut heap);
                            }
                        }
                    }
                }
                Location::OnSegment { segment, .. } => {
                    for (_, d, step) in src.exits(net) {
                        let step = step.expect("partial exit");
                        relax(state(segment, step.forward), (0, d), Some(step), &mut heap);
                    }
                }
            }
            continue;
        }
        let s = SegmentId((node / 2) as u32);
        let forward = node % 2 == 1;
        let seg = net.segment(s);
        let head_end = if forward { SegmentEnd::End } else { SegmentEnd::Start };
        let j = seg.junction_at(head_end);
        if dst == Location::Junction(j) {
            relax(sink, c, None, &mut heap);
        }
        for &(s2, end2) in &net.junction(j).incident {
            if s2 == s && end2 == head_end {
                continue;
            }
            let t = c.0 + turn((s, head_end), (s2, end2));
            let fwd2 = end2 == SegmentEnd::Start;
            relax(state(s2, fwd2), (t, c.1 + net.segment(s2).length), Some(PathStep::full(s2, fwd2)), &mut heap);
            if let Location::OnSegment { segment, offset } = dst {
                if segment == s2 {
                    let (at, len) = if fwd2 { (0.0, offset) } else { (1.0, 1.0 - offset) };
                    relax(sink, (t, c.1 + len * net.segment(s2).length), Some(PathStep::partial(s2, at, offset)), &mut heap);
                }
            }
        }
    }
    if !done[sink] {
        return Err(RouteError::Unreachable);
    }
    let mut path = unwind(&pred, sink);
    if path.is_empty() {
        path = stationary(from);
    }
    baseline_route(Mode::Simplest, net, rs_unsplit, path, from, to)
}

/// A network together with its road sets and connectivity graphs.
#[derive(Debug, Clone)]
pub struct Router {
    net: RoadNetwork,
    unsplit: RoadSet,
    split: RoadSet,
    g_unsplit: RoadGraph,
    g_split: RoadGraph,
    cap: usize,
}

impl Router {
    pub fn new(net: RoadNetwork, threshold_deg: f64, split: SplitParams) -> Self {
        let unsplit = build_natural_roads(&net, threshold_deg);
        let split = split_natural_roads(&net, &unsplit, &split);
        Self::from_parts(net, unsplit, split).expect("road sets built from this network")
    }

    /// Reassembles a router from prebuilt road sets; graphs are rebuilt.
    pub fn from_parts(net: RoadNetwork, unsplit: RoadSet, split: RoadSet) -> Result<Self, RouteError> {
        check_set(&net, &unsplit, RoadSetKind::Unsplit)?;
        check_set(&net, &split, RoadSetKind::Split)?;
        let g_unsplit = build_connectivity_graph(&unsplit, &net);
        let g_split = build_connectivity_graph(&split, &net);
        Ok(Self { net, unsplit, split, g_unsplit, g_split, cap: DEFAULT_SEQUENCE_CAP })
    }

    /// Reassembles a router from prebuilt road sets and graphs.
    pub fn from_components(
        net: RoadNetwork,
        unsplit: RoadSet,
        split: RoadSet,
        g_unsplit: RoadGraph,
        g_split: RoadGraph,
    ) -> Result<Self, RouteError> {
        check_set(&net, &unsplit, RoadSetKind::Unsplit)?;
        check_set(&net, &split, RoadSetKind::Split)?;
        for (rs, g) in [(&unsplit, &g_unsplit), (&split, &g_split)] {
            if g.kind() != rs.kind() || g.node_count() != rs.roads().len() {
                return Err(RouteError::RoadSetMismatch);
            }
        }
        Ok(Self { net, unsplit, split, g_unsplit, g_split, cap: DEFAULT_SEQUENCE_CAP })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.net
    }

    pub fn roads(&self, kind: RoadSetKind) -> &RoadSet {
        match kind {
            RoadSetKind::Unsplit => &self.unsplit,
            RoadSetKind::Split => &self.split,
        }
    }

    pub fn graph(&self, kind: RoadSetKind) -> &RoadGraph {
        match kind {
            RoadSetKind::Unsplit => &self.g_unsplit,
            RoadSetKind::Split => &self.g_split,
        }
    }

    /// Road set a mode's `road_sequence` refers to.
    pub fn roads_for(&self, mode: Mode) -> &RoadSet {
        match mode {
            Mode::FewestTurnShortest => &self.split,
            _ => &self.unsplit,
        }
    }

    pub fn route(&self, mode: Mode, from: Anchor, to: Anchor) -> Result<Route, RouteError> {
        let net = &self.net;
        match mode {
            Mode::Shortest => shortest_path(net, &self.unsplit, from, to),
            Mode::Simplest => simplest_path(net, &self.unsplit, from, to),
            Mode::FewestTurn => fewest_turn_route(net, &self.unsplit, &self.g_unsplit, from, to, self.cap),
            Mode::FewestTurnShortest => {
                fewest_turn_and_shortest_route(net, &self.split, &self.g_split, &self.unsplit, from, to, self.cap)
            }
        }
    }
}
