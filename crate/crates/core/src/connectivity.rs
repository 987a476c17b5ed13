//! Unit-weight road connectivity graph: one node per natural road, one
//! link per pair of roads that share a junction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::natural_roads::{RoadId, RoadSet, RoadSetKind};
use crate::network::{JunctionId, RoadNetwork};

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RoadLink {
    pub neighbor: RoadId,
    /// Every junction the two roads share, ascending.
    pub junctions: Vec<JunctionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct RoadGraph {
    kind: RoadSetKind,
    adjacency: Vec<Vec<RoadLink>>,
    link_count: usize,
}

impl RoadGraph {
    pub fn kind(&self) -> RoadSetKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn link_count(&self) -> usize {
        self.link_count
    }

    /// Links of `road`, sorted by neighbor id.
    pub fn links(&self, road: RoadId) -> &[RoadLink] {
        &self.adjacency[road.index()]
    }

    pub fn neighbors(&self, road: RoadId) -> impl Iterator<Item = RoadId> + '_ {
        self.adjacency[road.index()].iter().map(|l| l.neighbor)
    }

    pub fn link(&self, a: RoadId, b: RoadId) -> Option<&RoadLink> {
        let links = &self.adjacency[a.index()];
        links.binary_search_by(|l| l.neighbor.cmp(&b)).ok().map(|i| &links[i])
    }

    pub fn are_adjacent(&self, a: RoadId, b: RoadId) -> bool {
        self.link(a, b).is_some()
    }

    /// Debug export: one `roadA roadB junction_count` line per link, `roadA < roadB`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, links) in self.adjacency.iter().enumerate() {
            for l in links.iter().filter(|l| l.neighbor.index() > a) {
                let _ = writeln!(out, "{} {} {}", a, l.neighbor, l.junctions.len());
            }
        }
        out
    }
}

pub fn build_connectivity_graph(rs: &RoadSet, net: &RoadNetwork) -> RoadGraph {
    let mut shared: BTreeMap<(RoadId, RoadId), Vec<JunctionId>> = BTreeMap::new();
    for j in net.junctions() {
        let roads = rs.roads_at(net, j.id);
        for (k, &a) in roads.iter().enumerate() {
            for &b in &roads[k + 1..] {
                shared.entry((a, b)).or_default().push(j.id);
            }
        }
    }
    let mut adjacency: Vec<Vec<RoadLink>> = alloc::vec![Vec::new(); rs.roads().len()];
    let link_count = shared.len();
    for ((a, b), junctions) in shared {
        adjacency[a.index()].push(RoadLink { neighbor: b, junctions: junctions.clone() });
        adjacency[b.index()].push(RoadLink { neighbor: a, junctions });
    }
    for links in &mut adjacency {
        links.sort_by_key(|l| l.neighbor);
    }
    RoadGraph { kind: rs.kind(), adjacency, link_count }
}
