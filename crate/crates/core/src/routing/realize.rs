//! Geometric realization of a road sequence.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Anchor, Location, PathStep, RouteError};
use crate::natural_roads::{RoadId, RoadSet};
use crate::network::{JunctionId, RoadNetwork};

/// Min-heap entry ordered by (cost, node).
#[derive(Debug, Clone, Copy)]
pub(super) struct Entry<C> {
    pub cost: C,
    pub node: usize,
}

pub(super) trait Cost: Copy {
    fn cmp_cost(&self, other: &Self) -> Ordering;
}

impl Cost for f64 {
    fn cmp_cost(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl Cost for (u32, f64) {
    fn cmp_cost(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0).then(self.1.total_cmp(&other.1))
    }
}

impl<C: Cost> PartialEq for Entry<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<C: Cost> Eq for Entry<C> {}

impl<C: Cost> PartialOrd for Entry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Cost> Ord for Entry<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.cmp_cost(&self.cost).then(other.node.cmp(&self.node))
    }
}

/// Predecessor link: previous node and the step taken from it, if any.
pub(super) type Pred = Option<(usize, Option<PathStep>)>;

/// Walks predecessor links back from `node` and returns the steps in order.
pub(super) fn unwind(pred: &[Pred], mut node: usize) -> Vec<PathStep> {
    let mut steps = Vec::new();
    while let Some((prev, step)) = pred[node] {
        if let Some(s) = step {
            steps.push(s);
        }
        node = prev;
    }
    steps.reverse();
    steps
}

/// Zero-length path standing on an anchor.
pub(super) fn stationary(a: Anchor) -> Vec<PathStep> {
    alloc::vec![PathStep { segment: a.segment, forward: true, from_offset: a.offset, to_offset: a.offset }]
}

pub(super) fn path_length(net: &RoadNetwork, path: &[PathStep]) -> f64 {
    path.iter().map(|s| s.length(net)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realized {
    pub path: Vec<PathStep>,
    pub distance: f64,
}

/// Shortest walk from `from` to `to` that visits the roads of `sequence`
/// in order, changing road only at junctions the two roads share.
pub fn realize_route(
    net: &RoadNetwork,
    rs: &RoadSet,
    sequence: &[RoadId],
    from: Anchor,
    to: Anchor,
) -> Result<Realized, RouteError> {
    let src = Location::resolve(net, from)?;
    let dst = Location::resolve(net, to)?;
    realize(net, rs, sequence, src, dst, from)
}

pub(super) fn realize(
    net: &RoadNetwork,
    rs: &RoadSet,
    sequence: &[RoadId],
    src: Location,
    dst: Location,
    from: Anchor,
) -> Result<Realized, RouteError> {
    let (Some(&first), Some(&last)) = (sequence.first(), sequence.last()) else {
        return Err(RouteError::InfeasibleSequence);
    };
    for &r in sequence {
        if r.index() >= rs.roads().len() {
            return Err(RouteError::UnknownRoad(r));
        }
    }
    for w in sequence.windows(2) {
        if !rs.road(w[0]).junctions.iter().any(|j| rs.road(w[1]).touches(*j)) {
            return Err(RouteError::NotAdjacent(w[0], w[1]));
        }
    }
    if !src.roads(net, rs).contains(&first) || !dst.roads(net, rs).contains(&last) {
        return Err(RouteError::InfeasibleSequence);
    }

    // node numbering: each layer holds its road's distinct junctions
    let mut layer_junctions: Vec<Vec<JunctionId>> = Vec::with_capacity(sequence.len());
    let mut base = Vec::with_capacity(sequence.len() + 1);
    base.push(0usize);
    for &r in sequence {
        let mut js = rs.road(r).junctions.clone();
        js.sort();
        js.dedup();
        base.push(base[base.len() - 1] + js.len());
        layer_junctions.push(js);
    }
    let node_of = |layer: usize, j: JunctionId| -> Option<usize> {
        layer_junctions[layer].binary_search(&j).ok().map(|k| base[layer] + k)
    };
    let last_layer = sequence.len() - 1;
    let source = base[sequence.len()];
    let sink = source + 1;
    let n = sink + 1;

    let mut dist = alloc::vec![f64::INFINITY; n];
    let mut pred: Vec<Pred> = alloc::vec![None; n];
    let mut done = alloc::vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { cost: 0.0, node: source });

    if sequence.len() == 1 {
        if let Some((d, step)) = src.direct(&dst, net) {
            dist[sink] = d;
            pred[sink] = Some((source, Some(step)));
            heap.push(Entry { cost: d, node: sink });
        }
    }

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
                if let Some(v) = node_of(0, j) {
                    relax(v, c, step, &mut heap);
                }
            }
            continue;
        }
        let layer = base.partition_point(|&b| b <= node) - 1;
        let j = layer_junctions[layer][node - base[layer]];
        let road = rs.road(sequence[layer]);
        for (k, link) in road.chain.iter().enumerate() {
            let (a, b) = (road.junctions[k], road.junctions[k + 1]);
            let seg = net.segment(link.segment);
            if a == b {
                continue;
            }
            if a == j {
                relax(node_of(layer, b).unwrap(), cost + seg.length, Some(PathStep::full(link.segment, link.forward)), &mut heap);
            }
            if b == j {
                relax(node_of(layer, a).unwrap(), cost + seg.length, Some(PathStep::full(link.segment, !link.forward)), &mut heap);
            }
        }
        if layer < last_layer {
            if let Some(v) = node_of(layer + 1, j) {
                relax(v, cost, None, &mut heap);
            }
        } else {
            for (e, c, step) in dst.entries(net) {
                if e == j {
                    relax(sink, cost + c, step, &mut heap);
                }
            }
        }
    }

    if !done[sink] {
        return Err(RouteError::InfeasibleSequence);
    }
    let mut path = unwind(&pred, sink);
    if path.is_empty() {
        path = stationary(from);
    }
    let distance = path_length(net, &path);
    Ok(Realized { path, distance })
}
