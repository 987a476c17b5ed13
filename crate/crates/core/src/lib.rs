//! Fewest-turn route planning over the connectivity of natural roads.
//!
//! A road network is a set of polyline segments meeting at junctions.
//! Segments are joined into *natural roads* (chains with good continuity),
//! and routes are computed on the small unit-weight graph whose nodes are
//! roads and whose links are road-road intersections. Counting links on
//! that graph counts turns.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the CLI and
//! the HTTP service live in the `natroute` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod benchmark;
pub mod connectivity;
pub mod fixtures;
pub mod geometry;
pub mod instructions;
pub mod natural_roads;
pub mod network;
pub mod routing;

pub use connectivity::{build_connectivity_graph, RoadGraph, RoadLink};
pub use geometry::{Point, Polyline, SplitParams};
pub use natural_roads::{build_natural_roads, split_natural_roads, NaturalRoad, RoadId, RoadSet, RoadSetKind};
pub use network::{JunctionId, LineFeature, RoadNetwork, SegmentId};
pub use routing::{Anchor, Mode, Route, RouteError, Router};

/// Join threshold used when none is given.
pub const DEFAULT_JOIN_ANGLE_DEG: f64 = 45.0;
