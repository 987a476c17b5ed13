//! Natural roads: segments joined across junctions by mutual best
//! continuation, optionally split again at sharp bends.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::geometry::{deflection_angle, max_offset_point, Point, Polyline, SplitParams};
use crate::network::{id_type, JunctionId, RoadNetwork, SegmentEnd, SegmentId};

id_type!(
    /// Index of a road within its [`RoadSet`].
    RoadId
);

/// One segment of a road chain, traversed forward (from -> to) or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChainLink {
    pub segment: SegmentId,
    pub forward: bool,
}

impl ChainLink {
    pub fn entry_end(self) -> SegmentEnd {
        if self.forward {
            SegmentEnd::Start
        } else {
            SegmentEnd::End
        }
    }

    pub fn exit_end(self) -> SegmentEnd {
        self.entry_end().opposite()
    }
}

/// Maximal run of chain links sharing a street name; `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NamedRun {
    pub name: Option<String>,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NaturalRoad {
    pub id: RoadId,
    pub chain: Vec<ChainLink>,
    /// `chain.len() + 1` junctions in traversal order; first == last for rings.
    pub junctions: Vec<JunctionId>,
    pub geometry: Polyline,
    pub named_runs: Vec<NamedRun>,
    /// For split roads, the unsplit road this piece came from.
    pub parent: Option<RoadId>,
}

impl NaturalRoad {
    pub fn is_ring(&self) -> bool {
        self.junctions.len() > 2 && self.junctions[0] == self.junctions[self.junctions.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = SegmentId> + '_ {
        self.chain.iter().map(|l| l.segment)
    }

    pub fn length(&self) -> f64 {
        self.geometry.length()
    }

    pub fn touches(&self, j: JunctionId) -> bool {
        self.junctions.contains(&j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum RoadSetKind {
    Unsplit,
    Split,
}

impl RoadSetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RoadSetKind::Unsplit => "unsplit",
            RoadSetKind::Split => "split",
        }
    }
}

/// A partition of a network's segments into natural roads.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RoadSet {
    kind: RoadSetKind,
    roads: Vec<NaturalRoad>,
    segment_to_road: Vec<RoadId>,
    threshold_deg: f64,
    split: Option<SplitParams>,
    network_fingerprint: u64,
}

impl RoadSet {
    pub fn kind(&self) -> RoadSetKind {
        self.kind
    }

    pub fn roads(&self) -> &[NaturalRoad] {
        &self.roads
    }

    pub fn road(&self, id: RoadId) -> &NaturalRoad {
        &self.roads[id.index()]
    }

    pub fn road_of(&self, segment: SegmentId) -> RoadId {
        self.segment_to_road[segment.index()]
    }

    pub fn try_road_of(&self, segment: SegmentId) -> Option<RoadId> {
        self.segment_to_road.get(segment.index()).copied()
    }

    pub fn segment_to_road(&self) -> &[RoadId] {
        &self.segment_to_road
    }

    pub fn threshold_deg(&self) -> f64 {
        self.threshold_deg
    }

    pub fn split_params(&self) -> Option<SplitParams> {
        self.split
    }

    pub fn derived_from(&self, net: &RoadNetwork) -> bool {
        self.network_fingerprint == net.fingerprint() && self.segment_to_road.len() == net.segments().len()
    }

    /// Roads passing through `j`, ascending and deduplicated.
    pub fn roads_at(&self, net: &RoadNetwork, j: JunctionId) -> Vec<RoadId> {
        let mut roads: Vec<RoadId> = net.junction(j).incident.iter().map(|&(s, _)| self.road_of(s)).collect();
        roads.sort();
        roads.dedup();
        roads
    }
}

/// Deflection when arriving through `arrive` and leaving through `depart`,
/// both given as segment ends at the same junction.
pub fn join_deflection(net: &RoadNetwork, arrive: (SegmentId, SegmentEnd), depart: (SegmentId, SegmentEnd)) -> f64 {
    let a = net.segment(arrive.0).arriving_direction(arrive.1);
    let d = net.segment(depart.0).departing_direction(depart.1);
    // polylines have no zero-length edges
    deflection_angle(a, d).unwrap_or(180.0)
}

fn end_slot(s: SegmentId, end: SegmentEnd) -> usize {
    s.index() * 2 + (end == SegmentEnd::End) as usize
}

/// Pairs segment ends at every junction: the globally smallest deflection
/// pair among still-unpaired ends is accepted first, up to the threshold.
fn best_fit_partners(net: &RoadNetwork, threshold_deg: f64) -> Vec<Option<(SegmentId, SegmentEnd)>> {
    let mut partner = alloc::vec![None; net.segments().len() * 2];
    let mut candidates: Vec<(f64, (SegmentId, SegmentEnd), (SegmentId, SegmentEnd))> = Vec::new();
    for j in net.junctions() {
        candidates.clear();
        let ends = &j.incident;
        for (a, &ea) in ends.iter().enumerate() {
            for &eb in &ends[a + 1..] {
                if ea.0 == eb.0 {
                    continue;
                }
                let defl = join_deflection(net, ea, eb);
                if defl <= threshold_deg {
                    candidates.push((defl, ea, eb));
                }
            }
        }
        candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        for &(_, ea, eb) in &candidates {
            let (sa, sb) = (end_slot(ea.0, ea.1), end_slot(eb.0, eb.1));
            if partner[sa].is_none() && partner[sb].is_none() {
                partner[sa] = Some(eb);
                partner[sb] = Some(ea);
            }
        }
    }
    partner
}

fn assemble_road(net: &RoadNetwork, id: RoadId, chain: Vec<ChainLink>, parent: Option<RoadId>) -> NaturalRoad {
    let mut junctions = Vec::with_capacity(chain.len() + 1);
    let mut points: Vec<Point> = Vec::new();
    for link in &chain {
        let seg = net.segment(link.segment);
        if junctions.is_empty() {
            junctions.push(seg.junction_at(link.entry_end()));
        }
        junctions.push(seg.junction_at(link.exit_end()));
        let pts = seg.geometry.points();
        let skip = usize::from(!points.is_empty());
        if link.forward {
            points.extend(pts.iter().skip(skip));
        } else {
            points.extend(pts.iter().rev().skip(skip));
        }
    }
    let geometry = Polyline::new(points).expect("chain of valid segments forms a valid polyline");
    let mut road = NaturalRoad { id, chain, junctions, geometry, named_runs: Vec::new(), parent };
    road.named_runs = group_named_runs(net, &road);
    road
}

/// Joins segments into natural roads under the every-best-fit rule.
pub fn build_natural_roads(net: &RoadNetwork, threshold_deg: f64) -> RoadSet {
    let partner = best_fit_partners(net, threshold_deg);
    let n = net.segments().len();
    let mut visited = alloc::vec![false; n];
    let mut roads = Vec::new();
    let mut segment_to_road = alloc::vec![RoadId(u32::MAX); n];

    for s in 0..n {
        if visited[s] {
            continue;
        }
        let origin = SegmentId(s as u32);
        // walk back to the head of the chain, or around a ring
        let mut head = ChainLink { segment: origin, forward: true };
        loop {
            match partner[end_slot(head.segment, head.entry_end())] {
                None => break,
                Some((p, _)) if p == origin => {
                    head = ChainLink { segment: origin, forward: true };
                    break;
                }
                Some((p, pe)) => head = ChainLink { segment: p, forward: pe == SegmentEnd::End },
            }
        }
        let mut chain = Vec::new();
        let mut link = head;
        loop {
            visited[link.segment.index()] = true;
            chain.push(link);
            match partner[end_slot(link.segment, link.exit_end())] {
                Some((p, pe)) if p != head.segment => {
                    link = ChainLink { segment: p, forward: pe == SegmentEnd::Start };
                }
                _ => break,
            }
        }
        let id = RoadId(roads.len() as u32);
        for l in &chain {
            segment_to_road[l.segment.index()] = id;
        }
        roads.push(assemble_road(net, id, chain, None));
    }

    RoadSet {
        kind: RoadSetKind::Unsplit,
        roads,
        segment_to_road,
        threshold_deg,
        split: None,
        network_fingerprint: net.fingerprint(),
    }
}

/// Default split thresholds: 5% of the bounding-box diagonal, ratio 0.2.
pub fn default_split_params(net: &RoadNetwork) -> SplitParams {
    let d = net.bbox_diagonal() * 0.05;
    SplitParams { distance: if d > 0.0 { d } else { 1.0 }, ratio: 0.2 }
}

/// Index of each junction of `road` within its geometry's point list.
fn junction_vertices(net: &RoadNetwork, road: &NaturalRoad) -> Vec<usize> {
    let mut out = Vec::with_capacity(road.junctions.len());
    out.push(0);
    let mut at = 0;
    for link in &road.chain {
        at += net.segment(link.segment).geometry.len() - 1;
        out.push(at);
    }
    out
}

/// Junction positions where a road is split, as indices into
/// `road.junctions`, ascending.
pub fn road_split_points(net: &RoadNetwork, road: &NaturalRoad, params: &SplitParams) -> Vec<usize> {
    let vertex_of = junction_vertices(net, road);
    let pts = road.geometry.points();
    let mut cumulative = Vec::with_capacity(pts.len());
    cumulative.push(0.0);
    for w in pts.windows(2) {
        cumulative.push(cumulative[cumulative.len() - 1] + w[0].distance(w[1]));
    }
    let mut out = Vec::new();
    split_junction_range(pts, &vertex_of, &cumulative, 0, road.junctions.len() - 1, params, &mut out);
    out
}

fn split_junction_range(
    pts: &[Point],
    vertex_of: &[usize],
    cumulative: &[f64],
    a: usize,
    b: usize,
    params: &SplitParams,
    out: &mut Vec<usize>,
) {
    if b < a + 2 {
        return;
    }
    let window = &pts[vertex_of[a]..=vertex_of[b]];
    let Some((rel, offset)) = max_offset_point(window) else {
        return;
    };
    if !params.triggers(offset, window[0].distance(window[window.len() - 1])) {
        return;
    }
    let v = vertex_of[a] + rel;
    // bracketing junctions: vertex_of[s] <= v <= vertex_of[s + 1]
    let s = (a..b).rfind(|&k| vertex_of[k] <= v).unwrap_or(a);
    let k = if vertex_of[s] == v {
        s
    } else {
        let before = cumulative[v] - cumulative[vertex_of[s]];
        let after = cumulative[vertex_of[s + 1]] - cumulative[v];
        if after < before {
            s + 1
        } else {
            s
        }
    };
    let k = if k == a {
        s + 1
    } else if k == b {
        s
    } else {
        k
    };
    if k <= a || k >= b {
        return;
    }
    split_junction_range(pts, vertex_of, cumulative, a, k, params, out);
    out.push(k);
    split_junction_range(pts, vertex_of, cumulative, k, b, params, out);
}

/// Splits every road at its critical bends. Split points are moved to the
/// nearest junction along the road so that pieces stay whole segment chains.
pub fn split_natural_roads(net: &RoadNetwork, rs: &RoadSet, params: &SplitParams) -> RoadSet {
    let mut roads = Vec::new();
    let mut segment_to_road = alloc::vec![RoadId(u32::MAX); net.segments().len()];
    for road in &rs.roads {
        let mut bounds = Vec::new();
        bounds.push(0);
        bounds.extend(road_split_points(net, road, params));
        bounds.push(road.chain.len());
        for w in bounds.windows(2) {
            let id = RoadId(roads.len() as u32);
            let chain = road.chain[w[0]..w[1]].to_vec();
            for l in &chain {
                segment_to_road[l.segment.index()] = id;
            }
            roads.push(assemble_road(net, id, chain, Some(road.id)));
        }
    }
    RoadSet {
        kind: RoadSetKind::Split,
        roads,
        segment_to_road,
        threshold_deg: rs.threshold_deg,
        split: Some(*params),
        network_fingerprint: rs.network_fingerprint,
    }
}

/// Run-length encodes the chain by segment name.
pub fn group_named_runs(net: &RoadNetwork, road: &NaturalRoad) -> Vec<NamedRun> {
    let mut runs: Vec<NamedRun> = Vec::new();
    for (i, link) in road.chain.iter().enumerate() {
        let name = &net.segment(link.segment).name;
        match runs.last_mut() {
            Some(run) if run.name == *name => run.end = i,
            _ => runs.push(NamedRun { name: name.clone(), start: i, end: i }),
        }
    }
    runs
}
