//! Synthetic networks used by tests, the benchmark corpus and the CLI
//! `fixture` command.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, SplitParams};
use crate::network::{load_network, validate_noding, IngestOptions, JunctionId, LineFeature, RoadNetwork, SegmentId};
use crate::routing::Anchor;

fn ordinal(n: usize) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

fn build(features: &[LineFeature]) -> RoadNetwork {
    load_network(features, &IngestOptions::default()).expect("fixture features are valid").network
}

/// Features of a `rows` x `cols` junction grid. Horizontal streets are
/// numbered from 5th upward (bottom to top), vertical avenues from 1st
/// (left to right).
pub fn grid_features(rows: usize, cols: usize, spacing: f64) -> Vec<LineFeature> {
    let at = |r: usize, c: usize| Point::new(c as f64 * spacing, r as f64 * spacing);
    let mut out = Vec::new();
    for r in 0..rows {
        let name = format!("{} Street", ordinal(r + 5));
        for c in 0..cols.saturating_sub(1) {
            out.push(LineFeature::named(alloc::vec![at(r, c), at(r, c + 1)], &name));
        }
    }
    for c in 0..cols {
        let name = format!("{} Avenue", ordinal(c + 1));
        for r in 0..rows.saturating_sub(1) {
            out.push(LineFeature::named(alloc::vec![at(r, c), at(r + 1, c)], &name));
        }
    }
    out
}

/// The Manhattan-like example: `grid(4, 4, 1.0)` has 8 streets, 16
/// junctions and 24 segments.
pub fn grid(rows: usize, cols: usize, spacing: f64) -> RoadNetwork {
    build(&grid_features(rows, cols, spacing))
}

/// Junction id at grid position (`row`, `col`) of a [`grid`] network.
pub fn grid_junction(net: &RoadNetwork, spacing: f64, row: usize, col: usize) -> JunctionId {
    let p = Point::new(col as f64 * spacing, row as f64 * spacing);
    net.junctions().iter().find(|j| j.location == p).expect("grid position exists").id
}

/// Grid with jittered junctions; every third street and avenue bows out
/// into a long gentle bend.
pub fn perturbed_grid_features(rows: usize, cols: usize, spacing: f64, seed: u64) -> Vec<LineFeature> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = 0.12 * spacing;
    let bow = 0.55 * spacing;
    let mut pos = alloc::vec![Point::default(); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let mut p = Point::new(c as f64 * spacing, r as f64 * spacing);
            p.x += rng.gen_range(-jitter..=jitter);
            p.y += rng.gen_range(-jitter..=jitter);
            if c % 3 == 1 && rows > 1 {
                p.x += bow * libm::sin(PI * r as f64 / (rows - 1) as f64);
            }
            if r % 3 == 1 && cols > 1 {
                p.y += bow * libm::sin(PI * c as f64 / (cols - 1) as f64);
            }
            pos[r * cols + c] = p;
        }
    }
    let mut out = Vec::new();
    for r in 0..rows {
        let name = format!("Row {r}");
        for c in 0..cols.saturating_sub(1) {
            out.push(LineFeature::named(alloc::vec![pos[r * cols + c], pos[r * cols + c + 1]], &name));
        }
    }
    for c in 0..cols {
        let name = format!("Column {c}");
        for r in 0..rows.saturating_sub(1) {
            out.push(LineFeature::named(alloc::vec![pos[r * cols + c], pos[(r + 1) * cols + c]], &name));
        }
    }
    out
}

pub fn perturbed_grid(rows: usize, cols: usize, spacing: f64, seed: u64) -> RoadNetwork {
    build(&perturbed_grid_features(rows, cols, spacing, seed))
}

/// Concentric rings crossed by straight spokes through a shared center.
pub fn radial_features(rings: usize, spokes: usize, spacing: f64) -> Vec<LineFeature> {
    let polar = |radius: f64, angle: f64| Point::new(radius * libm::cos(angle), radius * libm::sin(angle));
    let angle = |i: usize| 2.0 * PI * i as f64 / spokes as f64;
    let mut out = Vec::new();
    for i in 0..spokes {
        let name = format!("Spoke {i}");
        out.push(LineFeature::named(alloc::vec![Point::new(0.0, 0.0), polar(spacing, angle(i))], &name));
        for k in 1..rings {
            out.push(LineFeature::named(
                alloc::vec![polar(k as f64 * spacing, angle(i)), polar((k + 1) as f64 * spacing, angle(i))],
                &name,
            ));
        }
    }
    for k in 1..=rings {
        let r = k as f64 * spacing;
        let name = format!("Ring {k}");
        for i in 0..spokes {
            let (a0, a1) = (angle(i), angle(i + 1));
            let mut pts: Vec<Point> = (0..=3).map(|s| polar(r, a0 + (a1 - a0) * s as f64 / 3.0)).collect();
            // end exactly on the spoke junctions
            pts[0] = polar(r, angle(i));
            pts[3] = polar(r, angle((i + 1) % spokes));
            out.push(LineFeature::named(pts, &name));
        }
    }
    out
}

pub fn radial(rings: usize, spokes: usize, spacing: f64) -> RoadNetwork {
    build(&radial_features(rings, spokes, spacing))
}

/// A route scenario: network, endpoints and split thresholds that expose
/// the effect of splitting.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: RoadNetwork,
    pub from: Anchor,
    pub to: Anchor,
    pub split: SplitParams,
}

/// A tall U-shaped road whose two feet are also joined by a straight
/// cross street. Both endpoints lie on the U, so staying on it costs no
/// turn but walks the whole bend.
pub fn bend_scenario() -> Scenario {
    let p = Point::new;
    let mut features = alloc::vec![
        LineFeature::named(alloc::vec![p(0.0, 0.0), p(0.0, 10.0)], "Bend Road"),
        LineFeature::named(alloc::vec![p(0.0, 10.0), p(0.0, 20.0)], "Bend Road"),
    ];
    let arc: Vec<Point> = (0..=6)
        .map(|i| {
            let a = PI - PI * i as f64 / 6.0;
            p(5.0 + 5.0 * libm::cos(a), 20.0 + 5.0 * libm::sin(a))
        })
        .map(|q| if q.y < 20.0 { p(q.x, 20.0) } else { q })
        .collect();
    for w in arc.windows(2) {
        features.push(LineFeature::named(alloc::vec![w[0], w[1]], "Bend Road"));
    }
    // pin the arc ends exactly onto the legs
    features[2].coords[0] = p(0.0, 20.0);
    let last = features.len() - 1;
    features[last].coords[1] = p(10.0, 20.0);
    features.push(LineFeature::named(alloc::vec![p(10.0, 20.0), p(10.0, 10.0)], "Bend Road"));
    features.push(LineFeature::named(alloc::vec![p(10.0, 10.0), p(10.0, 0.0)], "Bend Road"));
    features.push(LineFeature::named(alloc::vec![p(0.0, 0.0), p(10.0, 0.0)], "Cross Street"));
    let network = build(&features);
    let to_segment = SegmentId((features.len() - 2) as u32);
    Scenario {
        network,
        from: Anchor { segment: SegmentId(0), offset: 0.5 },
        to: Anchor { segment: to_segment, offset: 0.5 },
        split: SplitParams { distance: 3.0, ratio: 0.3 },
    }
}

/// Two roads meeting at a sharp angle, each bending once further out,
/// with a short connector between the bends.
pub fn sharp_angle_scenario() -> Scenario {
    let dir = |deg: f64| Point::new(libm::cos(deg.to_radians()), libm::sin(deg.to_radians()));
    let o = Point::new(0.0, 0.0);
    let p = dir(-20.0) * 10.0;
    let p_out = p + dir(20.0) * 5.0;
    let q = dir(20.0) * 10.0;
    let q_out = q + dir(-20.0) * 5.0;
    let features = alloc::vec![
        LineFeature::named(alloc::vec![o, p], "South Road"),
        LineFeature::named(alloc::vec![p, p_out], "South Road"),
        LineFeature::named(alloc::vec![o, q], "North Road"),
        LineFeature::named(alloc::vec![q, q_out], "North Road"),
        LineFeature::named(alloc::vec![p, q], "Link Lane"),
    ];
    Scenario {
        network: build(&features),
        from: Anchor { segment: SegmentId(1), offset: 0.5 },
        to: Anchor { segment: SegmentId(3), offset: 0.5 },
        split: SplitParams { distance: 2.0, ratio: 0.15 },
    }
}

/// A connected, noded network of at most `max_segments` segments: a
/// jittered grid with edges removed at random and some edges bent.
///
/// # Panics
/// When `max_segments < 8`, the fewest edges joining a 3x3 grid.
pub fn random_network(seed: u64, max_segments: usize) -> RoadNetwork {
    build(&random_network_features(seed, max_segments))
}

pub fn random_network_features(seed: u64, max_segments: usize) -> Vec<LineFeature> {
    assert!(max_segments >= 8, "random networks need at least 8 segments");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["Oak", "Elm", "Pine", "Birch"];
    loop {
        let rows = rng.gen_range(3..=5usize);
        let cols = rng.gen_range(3..=5usize);
        let spacing = 10.0;
        let pos: Vec<Point> = (0..rows * cols)
            .map(|i| {
                let (r, c) = (i / cols, i % cols);
                Point::new(
                    c as f64 * spacing + rng.gen_range(-2.5..2.5),
                    r as f64 * spacing + rng.gen_range(-2.5..2.5),
                )
            })
            .collect();
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((r * cols + c, r * cols + c + 1));
                }
                if r + 1 < rows {
                    edges.push((r * cols + c, (r + 1) * cols + c));
                }
            }
        }
        // drop edges while the junction graph stays connected
        let mut keep = alloc::vec![true; edges.len()];
        let mut order: Vec<usize> = (0..edges.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut kept = edges.len();
        for &e in &order {
            let must_drop = kept > max_segments;
            if !must_drop && !rng.gen_bool(0.3) {
                continue;
            }
            keep[e] = false;
            if connected(rows * cols, &edges, &keep) {
                kept -= 1;
            } else {
                keep[e] = true;
            }
        }
        if kept > max_segments {
            continue;
        }
        let mut features = Vec::new();
        for (e, &(a, b)) in edges.iter().enumerate() {
            if !keep[e] {
                continue;
            }
            let (pa, pb) = (pos[a], pos[b]);
            let mut coords = alloc::vec![pa];
            if rng.gen_bool(0.35) {
                let d = pb - pa;
                let normal = Point::new(-d.y, d.x) * (1.0 / d.norm());
                coords.push(pa.lerp(pb, rng.gen_range(0.3..0.7)) + normal * rng.gen_range(-2.0..2.0));
            }
            coords.push(pb);
            let name = if rng.gen_bool(0.8) { Some(String::from(names[rng.gen_range(0..names.len())])) } else { None };
            features.push(LineFeature { coords, name, id: None });
        }
        let net = build(&features);
        if validate_noding(&net, 0.0).is_routable() {
            return features;
        }
    }
}

fn connected(n: usize, edges: &[(usize, usize)], keep: &[bool]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for (e, &(a, b)) in edges.iter().enumerate() {
        if keep[e] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
    }
    components == 1
}
