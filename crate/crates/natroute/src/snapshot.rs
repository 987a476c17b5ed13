//! Versioned binary container for networks and engine snapshots.
//!
//! Layout (little endian): 8-byte magic `NATROUTE`, u16 version, u8 kind,
//! u32 section count, then per section a 4-byte tag, a u64 length and a
//! bincode payload. Readers skip sections they do not know.

use std::path::Path;

use natroute_core::natural_roads::{build_natural_roads, split_natural_roads};
use natroute_core::{build_connectivity_graph, RoadGraph, RoadNetwork, RoadSet, RoadSetKind, Router, SplitParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MAGIC: &[u8; 8] = b"NATROUTE";
pub const VERSION: u16 = 1;

const TAG_NETWORK: [u8; 4] = *b"NETW";
const TAG_PARAMS: [u8; 4] = *b"PARM";
const TAG_UNSPLIT: [u8; 4] = *b"RDSU";
const TAG_SPLIT: [u8; 4] = *b"RDSS";
const TAG_GRAPH_UNSPLIT: [u8; 4] = *b"GRFU";
const TAG_GRAPH_SPLIT: [u8; 4] = *b"GRFS";
const TAG_HASH: [u8; 4] = *b"HASH";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ContainerKind {
    Network = 1,
    Snapshot = 2,
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a natroute container")]
    BadMagic,
    #[error("unsupported container version {0}")]
    Version(u16),
    #[error("expected a {expected:?} container, found kind {found}")]
    WrongKind { expected: ContainerKind, found: u8 },
    #[error("truncated container")]
    Truncated,
    #[error("missing section {0}")]
    MissingSection(String),
    #[error("corrupt section {tag}: {message}")]
    Corrupt { tag: String, message: String },
    #[error("content hash mismatch")]
    HashMismatch,
    #[error("inconsistent snapshot: {0}")]
    Inconsistent(String),
}

/// Parameters the road sets were built with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    pub angle_deg: f64,
    pub split_distance: f64,
    pub split_ratio: f64,
}

impl BuildParams {
    pub fn split(&self) -> Result<SplitParams, SnapshotError> {
        SplitParams::new(self.split_distance, self.split_ratio)
            .map_err(|e| SnapshotError::Inconsistent(format!("split parameters: {e}")))
    }
}

fn encode<T: Serialize>(value: &T) -> Vec<u8> {
    bincode::serialize(value).expect("in-memory bincode encoding")
}

fn decode<T: for<'de> Deserialize<'de>>(tag: [u8; 4], bytes: &[u8]) -> Result<T, SnapshotError> {
    bincode::deserialize(bytes).map_err(|e| SnapshotError::Corrupt { tag: tag_name(tag), message: e.to_string() })
}

fn tag_name(tag: [u8; 4]) -> String {
    String::from_utf8_lossy(&tag).into_owned()
}

fn write_container(kind: ContainerKind, sections: &[([u8; 4], Vec<u8>)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind as u8);
    out.extend_from_slice(&(sections.len() as u32).to_le_bytes());
    for (tag, body) in sections {
        out.extend_from_slice(tag);
        out.extend_from_slice(&(body.len() as u64).to_le_bytes());
        out.extend_from_slice(body);
    }
    out
}

struct Sections<'a>(Vec<([u8; 4], &'a [u8])>);

impl<'a> Sections<'a> {
    fn get(&self, tag: [u8; 4]) -> Result<&'a [u8], SnapshotError> {
        self.0
            .iter()
            .find(|(t, _)| *t == tag)
            .map(|(_, b)| *b)
            .ok_or_else(|| SnapshotError::MissingSection(tag_name(tag)))
    }
}

fn take<'a>(bytes: &mut &'a [u8], n: usize) -> Result<&'a [u8], SnapshotError> {
    if bytes.len() < n {
        return Err(SnapshotError::Truncated);
    }
    let (head, rest) = bytes.split_at(n);
    *bytes = rest;
    Ok(head)
}

fn read_container(mut bytes: &[u8], expected: ContainerKind) -> Result<Sections<'_>, SnapshotError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    take(&mut bytes, MAGIC.len())?;
    let version = u16::from_le_bytes(take(&mut bytes, 2)?.try_into().unwrap());
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let kind = take(&mut bytes, 1)?[0];
    if kind != expected as u8 {
        return Err(SnapshotError::WrongKind { expected, found: kind });
    }
    let count = u32::from_le_bytes(take(&mut bytes, 4)?.try_into().unwrap());
    let mut sections = Vec::new();
    for _ in 0..count {
        let tag: [u8; 4] = take(&mut bytes, 4)?.try_into().unwrap();
        let len = u64::from_le_bytes(take(&mut bytes, 8)?.try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| SnapshotError::Truncated)?;
        sections.push((tag, take(&mut bytes, len)?));
    }
    Ok(Sections(sections))
}

pub fn network_to_bytes(net: &RoadNetwork) -> Vec<u8> {
    write_container(ContainerKind::Network, &[(TAG_NETWORK, encode(net))])
}

pub fn network_from_bytes(bytes: &[u8]) -> Result<RoadNetwork, SnapshotError> {
    let sections = read_container(bytes, ContainerKind::Network)?;
    decode(TAG_NETWORK, sections.get(TAG_NETWORK)?)
}

pub fn save_network(net: &RoadNetwork, path: &Path) -> Result<(), SnapshotError> {
    Ok(std::fs::write(path, network_to_bytes(net))?)
}

pub fn load_network_file(path: &Path) -> Result<RoadNetwork, SnapshotError> {
    network_from_bytes(&std::fs::read(path)?)
}

fn content_hash(network_bytes: &[u8], params_bytes: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"natroute-snapshot-v1");
    h.update((network_bytes.len() as u64).to_le_bytes());
    h.update(network_bytes);
    h.update(params_bytes);
    h.finalize().into()
}

/// A router plus the parameters it was built with and a content hash over
/// the network and those parameters.
#[derive(Debug, Clone)]
pub struct EngineSnapshot {
    router: Router,
    params: BuildParams,
    hash: [u8; 32],
}

impl EngineSnapshot {
    pub fn build(net: RoadNetwork, params: BuildParams) -> Result<Self, SnapshotError> {
        let split_params = params.split()?;
        if !(params.angle_deg.is_finite() && (0.0..=180.0).contains(&params.angle_deg)) {
            return Err(SnapshotError::Inconsistent(format!("angle {} outside 0..=180", params.angle_deg)));
        }
        let hash = content_hash(&encode(&net), &encode(&params));
        let unsplit = build_natural_roads(&net, params.angle_deg);
        let split = split_natural_roads(&net, &unsplit, &split_params);
        let g_unsplit = build_connectivity_graph(&unsplit, &net);
        let g_split = build_connectivity_graph(&split, &net);
        let router = Router::from_components(net, unsplit, split, g_unsplit, g_split)
            .map_err(|e| SnapshotError::Inconsistent(e.to_string()))?;
        Ok(Self { router, params, hash })
    }

    pub fn router(&self) -> &Router {
        &self.router
    }

    pub fn into_router(self) -> Router {
        self.router
    }

    pub fn network(&self) -> &RoadNetwork {
        self.router.network()
    }

    pub fn roads(&self, kind: RoadSetKind) -> &RoadSet {
        self.router.roads(kind)
    }

    pub fn graph(&self, kind: RoadSetKind) -> &RoadGraph {
        self.router.graph(kind)
    }

    pub fn params(&self) -> BuildParams {
        self.params
    }

    pub fn hash(&self) -> [u8; 32] {
        self.hash
    }

    pub fn hash_hex(&self) -> String {
        self.hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let r = &self.router;
        write_container(
            ContainerKind::Snapshot,
            &[
                (TAG_NETWORK, encode(r.network())),
                (TAG_PARAMS, encode(&self.params)),
                (TAG_UNSPLIT, encode(r.roads(RoadSetKind::Unsplit))),
                (TAG_SPLIT, encode(r.roads(RoadSetKind::Split))),
                (TAG_GRAPH_UNSPLIT, encode(r.graph(RoadSetKind::Unsplit))),
                (TAG_GRAPH_SPLIT, encode(r.graph(RoadSetKind::Split))),
                (TAG_HASH, self.hash.to_vec()),
            ],
        )
    }

    /// Loads without rebuilding; the stored hash must match the stored
    /// network and parameters.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let s = read_container(bytes, ContainerKind::Snapshot)?;
        let (net_bytes, params_bytes) = (s.get(TAG_NETWORK)?, s.get(TAG_PARAMS)?);
        let stored: [u8; 32] = s.get(TAG_HASH)?.try_into().map_err(|_| SnapshotError::HashMismatch)?;
        let hash = content_hash(net_bytes, params_bytes);
        if hash != stored {
            return Err(SnapshotError::HashMismatch);
        }
        let net: RoadNetwork = decode(TAG_NETWORK, net_bytes)?;
        let params: BuildParams = decode(TAG_PARAMS, params_bytes)?;
        let unsplit: RoadSet = decode(TAG_UNSPLIT, s.get(TAG_UNSPLIT)?)?;
        let split: RoadSet = decode(TAG_SPLIT, s.get(TAG_SPLIT)?)?;
        let g_unsplit: RoadGraph = decode(TAG_GRAPH_UNSPLIT, s.get(TAG_GRAPH_UNSPLIT)?)?;
        let g_split: RoadGraph = decode(TAG_GRAPH_SPLIT, s.get(TAG_GRAPH_SPLIT)?)?;
        if unsplit.threshold_deg() != params.angle_deg || split.split_params() != Some(params.split()?) {
            return Err(SnapshotError::Inconsistent("road sets do not match the stored parameters".into()));
        }
        let router = Router::from_components(net, unsplit, split, g_unsplit, g_split)
            .map_err(|e| SnapshotError::Inconsistent(e.to_string()))?;
        Ok(Self { router, params, hash })
    }

    pub fn save(&self, path: &Path) -> Result<(), SnapshotError> {
        Ok(std::fs::write(path, self.to_bytes())?)
    }

    pub fn load(path: &Path) -> Result<Self, SnapshotError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use natroute_core::fixtures;

    fn params() -> BuildParams {
        BuildParams { angle_deg: 45.0, split_distance: 1.0, split_ratio: 0.2 }
    }

    #[test]
    fn round_trip_preserves_everything() {
        let snap = EngineSnapshot::build(fixtures::grid(4, 4, 1.0), params()).unwrap();
        let back = EngineSnapshot::from_bytes(&snap.to_bytes()).unwrap();
        assert_eq!(back.hash(), snap.hash());
        assert_eq!(back.network(), snap.network());
        for kind in [RoadSetKind::Unsplit, RoadSetKind::Split] {
            assert_eq!(back.roads(kind), snap.roads(kind));
            assert_eq!(back.graph(kind), snap.graph(kind));
        }
        assert_eq!(back.to_bytes(), snap.to_bytes());
    }

    #[test]
    fn hash_covers_network_and_parameters() {
        let a = EngineSnapshot::build(fixtures::grid(4, 4, 1.0), params()).unwrap();
        let b = EngineSnapshot::build(fixtures::grid(4, 4, 1.0), BuildParams { angle_deg: 30.0, ..params() }).unwrap();
        let c = EngineSnapshot::build(fixtures::grid(4, 5, 1.0), params()).unwrap();
        let a2 = EngineSnapshot::build(fixtures::grid(4, 4, 1.0), params()).unwrap();
        assert_eq!(a.hash(), a2.hash());
        assert_ne!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash_hex().len(), 64);
    }

    #[test]
    fn rejects_damaged_containers() {
        let snap = EngineSnapshot::build(fixtures::grid(3, 3, 1.0), params()).unwrap();
        let bytes = snap.to_bytes();
        assert!(matches!(EngineSnapshot::from_bytes(b"NOTROUTE"), Err(SnapshotError::BadMagic)));
        assert!(matches!(EngineSnapshot::from_bytes(&bytes[..bytes.len() - 5]), Err(SnapshotError::Truncated)));
        let mut v = bytes.clone();
        v[8] = 9;
        assert!(matches!(EngineSnapshot::from_bytes(&v), Err(SnapshotError::Version(_))));
        // flip a byte inside the network section payload
        let mut v = bytes.clone();
        v[MAGIC.len() + 2 + 1 + 4 + 4 + 8 + 20] ^= 0x55;
        assert!(matches!(EngineSnapshot::from_bytes(&v), Err(SnapshotError::HashMismatch)));
        let net_file = network_to_bytes(snap.network());
        assert!(matches!(EngineSnapshot::from_bytes(&net_file), Err(SnapshotError::WrongKind { .. })));
        assert_eq!(&network_from_bytes(&net_file).unwrap(), snap.network());
    }
}
