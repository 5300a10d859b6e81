//! Graph species, validity rules and canonical forms.
//!
//! Four species of graphs are used:
//!
//! * `kontsevich` — directed graphs with aerial (type I) vertices drawn in the
//!   upper half plane and linearly ordered ground (type II) vertices on the
//!   real line. Every edge starts at an aerial vertex; tadpoles are forbidden;
//!   parallel edges are allowed (they canonicalize to zero).
//! * `shoikhet` — the disk analogue: ground vertices sit on the boundary
//!   circle in cyclic order, with slot 0 distinguished (it carries the first
//!   chain factor).
//! * `gc2` — undirected, connected, at-least-trivalent graphs without tadpoles
//!   or parallel edges; the species of the graph complex.
//! * `brane` — kontsevich graphs with at most one distinguished ground vertex.
//!
//! The *position* of an edge in the edge list is part of the data: it is the
//! edge ordering that orients every sign in the crate. Reordering edges
//! multiplies a graph by the parity of the permutation; see [`canon`].

mod canon;
mod wheel;

pub use canon::{canonicalize, CanonicalGraph, GraphKey};
pub use wheel::{wheel_family, WheelKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four graph species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Kontsevich,
    Shoikhet,
    Gc2,
    Brane,
}

impl Species {
    /// Directed species have aerial-only edge sources; gc2 is undirected.
    pub fn directed(self) -> bool {
        !matches!(self, Species::Gc2)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0},{1}) is a tadpole")]
    Tadpole(usize, usize),
    #[error("edge ({0},{1}) has a non-aerial source")]
    NonAerialSource(usize, usize),
    #[error("vertex index {0} out of range (graph has {1} vertices)")]
    IndexOutOfRange(usize, usize),
    #[error("gc2 graph has duplicate edge ({0},{1})")]
    DuplicateEdge(usize, usize),
    #[error("gc2 vertex {0} has valence {1} < 3")]
    ValenceTooLow(usize, usize),
    #[error("gc2 graph is disconnected")]
    Disconnected,
    #[error("gc2 graphs have no ground vertices")]
    GroundOnGc2,
    #[error("distinguished vertex only allowed on brane graphs")]
    DistinguishedSpecies,
    #[error("distinguished index {0} is not a ground vertex")]
    DistinguishedNotGround(usize),
}

/// A graph of one of the four species.
///
/// Aerial vertices are indexed `0..aerial`, ground vertices
/// `aerial..aerial+ground`. The edge list order is the edge ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Graph {
    pub species: Species,
    pub aerial: usize,
    pub ground: usize,
    pub distinguished: Option<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds and validates a graph. All species invariants are enforced here;
    /// every other constructor in the crate funnels through this.
    pub fn new(
        species: Species,
        aerial: usize,
        ground: usize,
        distinguished: Option<usize>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let n = aerial + ground;
        for &(s, t) in &edges {
            if s >= n {
                return Err(GraphError::IndexOutOfRange(s, n));
            }
            if t >= n {
                return Err(GraphError::IndexOutOfRange(t, n));
            }
            if s == t {
                return Err(GraphError::Tadpole(s, t));
            }
        }
        match species {
            Species::Kontsevich | Species::Shoikhet | Species::Brane => {
                for &(s, t) in &edges {
                    if s >= aerial {
                        return Err(GraphError::NonAerialSource(s, t));
                    }
                }
                if distinguished.is_some() && species != Species::Brane {
                    return Err(GraphError::DistinguishedSpecies);
                }
                if let Some(d) = distinguished {
                    if d < aerial || d >= n {
                        return Err(GraphError::DistinguishedNotGround(d));
                    }
                }
            }
            Species::Gc2 => {
                if ground > 0 {
                    return Err(GraphError::GroundOnGc2);
                }
                if distinguished.is_some() {
                    return Err(GraphError::DistinguishedSpecies);
                }
                // Undirected edges are stored with source < target.
                let edges: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(s, t)| (s.min(t), s.max(t)))
                    .collect();
                let mut seen = std::collections::BTreeSet::new();
                for &e in &edges {
                    if !seen.insert(e) {
                        return Err(GraphError::DuplicateEdge(e.0, e.1));
                    }
                }
                let mut valence = vec![0usize; n];
                for &(s, t) in &edges {
                    valence[s] += 1;
                    valence[t] += 1;
                }
                for (v, &d) in valence.iter().enumerate() {
                    if d < 3 {
                        return Err(GraphError::ValenceTooLow(v, d));
                    }
                }
                if !connected(n, &edges) {
                    return Err(GraphError::Disconnected);
                }
                return Ok(Graph {
                    species,
                    aerial,
                    ground,
                    distinguished,
                    edges,
                });
            }
        }
        Ok(Graph {
            species,
            aerial,
            ground,
            distinguished,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.aerial + self.ground
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_aerial(&self, v: usize) -> bool {
        v < self.aerial
    }

    /// Out-degree (for gc2: valence) of a vertex.
    pub fn out_degree(&self, v: usize) -> usize {
        if self.species == Species::Gc2 {
            return self.valence(v);
        }
        self.edges.iter().filter(|&&(s, _)| s == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        if self.species == Species::Gc2 {
            return self.valence(v);
        }
        self.edges.iter().filter(|&&(_, t)| t == v).count()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(s, t)| s == v || t == v)
            .count()
    }

    /// Edge indices with the given source, in edge order.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(s, _))| s == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Edge indices with the given target, in edge order.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(_, t))| t == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Serializes to the canonical JSON schema. Field order is fixed, so the
    /// output is byte-stable.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Graph, String> {
        let raw: Graph = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Graph::new(raw.species, raw.aerial, raw.ground, raw.distinguished, raw.edges)
            .map_err(|e| e.to_string())
    }
}

/// The order of the automorphism group: admissible vertex relabelings
/// (aerial ones for directed species, all for gc2) preserving the edge
/// multiset. Brute force; intended for graphs with few movable vertices.
pub fn automorphism_count(g: &Graph) -> usize {
    use itertools::Itertools;
    let movable: Vec<usize> = if g.species == Species::Gc2 {
        (0..g.vertex_count()).collect()
    } else {
        (0..g.aerial).collect()
    };
    assert!(movable.len() <= 9, "automorphism_count is desk-scale only");
    let normalize = |edges: &mut Vec<(usize, usize)>| {
        if g.species == Species::Gc2 {
            for e in edges.iter_mut() {
                *e = (e.0.min(e.1), e.0.max(e.1));
            }
        }
        edges.sort_unstable();
    };
    let mut reference: Vec<(usize, usize)> = g.edges.clone();
    normalize(&mut reference);
    let mut count = 0usize;
    for perm in movable.iter().copied().permutations(movable.len()) {
        let map = |v: usize| {
            movable
                .iter()
                .position(|&m| m == v)
                .map(|i| perm[i])
                .unwrap_or(v)
        };
        let mut edges: Vec<(usize, usize)> =
            g.edges.iter().map(|&(s, t)| (map(s), map(t))).collect();
        normalize(&mut edges);
        if edges == reference {
            count += 1;
        }
    }
    count
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in edges {
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// The one-aerial-vertex graph with a single edge to each of two ground
/// vertices; the smallest admissible kontsevich graph.
pub fn wedge_graph() -> Graph {
    Graph::new(Species::Kontsevich, 1, 2, None, vec![(0, 1), (0, 2)]).unwrap()
}
