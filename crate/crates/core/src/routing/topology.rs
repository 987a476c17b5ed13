//! Breadth-first distances and fewest-turn sequence enumeration on a
//! road connectivity graph.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::RouteError;
use crate::connectivity::RoadGraph;
use crate::natural_roads::RoadId;

/// Fewest road changes between two roads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TopologicalDistance(pub u32);

/// Fewest-turn road sequences, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Enumeration {
    pub sequences: Vec<Vec<RoadId>>,
    /// More sequences exist than the cap allowed.
    pub truncated: bool,
}

/// Breadth-first level of every road from a set of sources.
pub fn bfs_levels(g: &RoadGraph, sources: &[RoadId]) -> Vec<Option<u32>> {
    let mut level = alloc::vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if level[s.index()].is_none() {
            level[s.index()] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(r) = queue.pop_front() {
        let next = level[r.index()].map(|l| l + 1);
        for n in g.neighbors(r) {
            if level[n.index()].is_none() {
                level[n.index()] = next;
                queue.push_back(n);
            }
        }
    }
    level
}

pub fn shortest_topological_distance(g: &RoadGraph, start: RoadId, end: RoadId) -> Result<TopologicalDistance, RouteError> {
    check_road(g, start)?;
    check_road(g, end)?;
    bfs_levels(g, &[start])[end.index()].map(TopologicalDistance).ok_or(RouteError::Unreachable)
}

/// Every sequence `start -> end` of `d + 1` roads in which each step moves
/// one breadth-first level further from `start`. At most `cap` sequences
/// are returned.
pub fn enumerate_fewest_turn_sequences(
    g: &RoadGraph,
    start: RoadId,
    end: RoadId,
    d: TopologicalDistance,
    cap: usize,
) -> Enumeration {
    let forward = bfs_levels(g, &[start]);
    let backward = bfs_levels(g, &[end]);
    enumerate(g, &[start], &forward, &backward, d.0, cap)
}

/// Multi-source form: the fewest changes from any road in `starts` to any
/// road in `ends`, and every sequence achieving it.
pub(crate) fn enumerate_between(
    g: &RoadGraph,
    starts: &[RoadId],
    ends: &[RoadId],
    cap: usize,
) -> Result<(TopologicalDistance, Enumeration), RouteError> {
    let forward = bfs_levels(g, starts);
    let d = ends.iter().filter_map(|e| forward[e.index()]).min().ok_or(RouteError::Unreachable)?;
    let backward = bfs_levels(g, ends);
    Ok((TopologicalDistance(d), enumerate(g, starts, &forward, &backward, d, cap)))
}

fn check_road(g: &RoadGraph, r: RoadId) -> Result<(), RouteError> {
    if r.index() < g.node_count() {
        Ok(())
    } else {
        Err(RouteError::UnknownRoad(r))
    }
}

struct Search<'a> {
    g: &'a RoadGraph,
    forward: &'a [Option<u32>],
    backward: &'a [Option<u32>],
    d: u32,
    cap: usize,
    current: Vec<RoadId>,
    out: Enumeration,
}

impl Search<'_> {
    // true once the cap is hit
    fn visit(&mut self, road: RoadId) -> bool {
        let level = self.current.len() as u32;
        self.current.push(road);
        let stop = if level == self.d {
            if self.out.sequences.len() == self.cap {
                self.out.truncated = true;
                true
            } else {
                self.out.sequences.push(self.current.clone());
                false
            }
        } else {
            let mut stop = false;
            for n in self.g.neighbors(road) {
                if self.on_shortest(n, level + 1) && self.visit(n) {
                    stop = true;
                    break;
                }
            }
            stop
        };
        self.current.pop();
        stop
    }

    fn on_shortest(&self, r: RoadId, level: u32) -> bool {
        self.forward[r.index()] == Some(level) && self.backward[r.index()] == Some(self.d - level)
    }
}

fn enumerate(
    g: &RoadGraph,
    starts: &[RoadId],
    forward: &[Option<u32>],
    backward: &[Option<u32>],
    d: u32,
    cap: usize,
) -> Enumeration {
    let mut starts = starts.to_vec();
    starts.sort();
    starts.dedup();
    let mut search = Search { g, forward, backward, d, cap, current: Vec::new(), out: Enumeration::default() };
    for s in starts {
        if search.on_shortest(s, 0) && search.visit(s) {
            break;
        }
    }
    search.out
}
