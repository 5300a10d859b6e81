//! The graph complex of undirected, connected, at-least-trivalent graphs.
//!
//! Elements are finite rational combinations of canonical graphs. The degree
//! of a graph with `v` vertices and `e` edges is `2(v-1) - e`; the tetrahedron
//! and the odd wheels sit in degree 0. The differential contracts edges (the
//! homology-side convention: results with parallel edges are projected away),
//! which makes the tetrahedron and every odd wheel a cocycle; the bracket
//! inserts one graph into a vertex of the other. Orientation is the edge
//! ordering: a contraction moves the contracted edge to the front first, an
//! insertion term lists the outer block's edges before the inner block's, and
//! all remaining signs fall out of the edge-permutation parity computed during
//! canonicalization.

use crate::graph::{canonicalize, wheel_family, Graph, GraphError, GraphKey, Species, WheelKind};
use crate::rational::{format_rat, parse_rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gc2Error {
    #[error("expected a gc2 graph, got {0:?}")]
    WrongSpecies(Species),
    #[error("vector is not homogeneous of degree 0")]
    NotDegreeZero,
    #[error("vector is not closed under the differential")]
    NotClosed,
    #[error("invalid graph vector entry: {0}")]
    BadEntry(String),
}

/// A finite rational linear combination of canonical gc2 graphs.
///
/// Graphs with canonical sign 0 are never stored, and no stored coefficient is
/// zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphVector {
    terms: BTreeMap<GraphKey, Rat>,
}

impl GraphVector {
    pub fn new() -> GraphVector {
        GraphVector::default()
    }

    /// The vector `c * g`, folded to canonical form.
    pub fn single(g: &Graph, c: Rat) -> Result<GraphVector, Gc2Error> {
        let mut v = GraphVector::new();
        v.add_graph(g, c)?;
        Ok(v)
    }

    /// Adds `c` times the (labeled, edge-ordered) graph `g`.
    pub fn add_graph(&mut self, g: &Graph, c: Rat) -> Result<(), Gc2Error> {
        if g.species != Species::Gc2 {
            return Err(Gc2Error::WrongSpecies(g.species));
        }
        let canon = canonicalize(g);
        if canon.sign == 0 {
            return Ok(());
        }
        self.add_key(canon.key, c * Rat::from_integer(canon.sign.into()));
        Ok(())
    }

    fn add_key(&mut self, key: GraphKey, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GraphKey, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the isomorphism class of `g`, oriented by `g`'s own
    /// edge order (0 for degenerate graphs).
    pub fn coefficient_of(&self, g: &Graph) -> Rat {
        let canon = canonicalize(g);
        if canon.sign == 0 {
            return Rat::zero();
        }
        self.terms
            .get(&canon.key)
            .map(|c| c * Rat::from_integer(canon.sign.into()))
            .unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> GraphVector {
        if c.is_zero() {
            return GraphVector::new();
        }
        GraphVector {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &GraphVector) -> GraphVector {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_key(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &GraphVector) -> GraphVector {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    /// Serializes as a JSON array of `{"graph": ..., "coeff": "p/q"}` entries.
    pub fn to_json(&self) -> String {
        let entries: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let g = crate::graph::CanonicalGraph {
                    key: k.clone(),
                    sign: 1,
                }
                .representative();
                serde_json::json!({
                    "graph": serde_json::from_str::<serde_json::Value>(&g.to_json()).unwrap(),
                    "coeff": format_rat(c),
                })
            })
            .collect();
        serde_json::to_string_pretty(&entries).unwrap()
    }

    pub fn from_json(s: &str) -> Result<GraphVector, Gc2Error> {
        let entries: Vec<serde_json::Value> =
            serde_json::from_str(s).map_err(|e| Gc2Error::BadEntry(e.to_string()))?;
        let mut v = GraphVector::new();
        for entry in entries {
            let graph = entry
                .get("graph")
                .ok_or_else(|| Gc2Error::BadEntry("missing graph".into()))?;
            let coeff = entry
                .get("coeff")
                .and_then(|c| c.as_str())
                .ok_or_else(|| Gc2Error::BadEntry("missing coeff".into()))?;
            let g = Graph::from_json(&graph.to_string()).map_err(Gc2Error::BadEntry)?;
            let c = parse_rat(coeff).ok_or_else(|| Gc2Error::BadEntry(coeff.into()))?;
            v.add_graph(&g, c)?;
        }
        Ok(v)
    }
}

/// Degree of a gc2 graph: `2(#vertices - 1) - #edges`.
pub fn gc_degree(g: &Graph) -> Result<i64, Gc2Error> {
    if g.species != Species::Gc2 {
        return Err(Gc2Error::WrongSpecies(g.species));
    }
    Ok(2 * (g.vertex_count() as i64 - 1) - g.edge_count() as i64)
}

/// All degrees occurring in a vector (usually one).
pub fn vector_degrees(v: &GraphVector) -> Vec<i64> {
    let mut degs: Vec<i64> = v
        .terms()
        .map(|(k, _)| {
            let g = crate::graph::CanonicalGraph {
                key: k.clone(),
                sign: 1,
            }
            .representative();
            gc_degree(&g).expect("stored keys are gc2")
        })
        .collect();
    degs.sort_unstable();
    degs.dedup();
    degs
}

/// The differential: the alternating sum of edge contractions,
/// `d(G) = sum_i (-1)^i G/e_i`, with contractions that produce parallel edges
/// projected away (such graphs vanish by sign). It lowers the degree
/// `2(v-1) - e` by one, and the tetrahedron and all odd wheels are cocycles:
/// each of their contractions doubles an edge.
pub fn gc_differential(v: &GraphVector) -> GraphVector {
    let mut out = GraphVector::new();
    for (key, coeff) in v.terms() {
        let g = crate::graph::CanonicalGraph {
            key: key.clone(),
            sign: 1,
        }
        .representative();
        for (contracted, sign) in edge_contractions(&g) {
            out.add_graph(&contracted, coeff * Rat::from_integer(sign.into()))
                .expect("contraction stays gc2");
        }
    }
    out
}

/// All admissible single-edge contractions of `g`, with the orientation sign
/// from moving the contracted edge to the front of the edge order.
fn edge_contractions(g: &Graph) -> Vec<(Graph, i8)> {
    let mut out = Vec::new();
    for i in 0..g.edge_count() {
        let (a, b) = g.edges[i];
        // Merge b into a; indices above b shift down.
        let map = |x: usize| {
            let x = if x == b { a } else { x };
            if x > b {
                x - 1
            } else {
                x
            }
        };
        let edges: Vec<(usize, usize)> = g
            .edges
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &(s, t))| (map(s), map(t)))
            .collect();
        let sign = if i % 2 == 0 { 1 } else { -1 };
        match Graph::new(Species::Gc2, g.aerial - 1, 0, None, edges) {
            Ok(contracted) => out.push((contracted, sign)),
            Err(GraphError::DuplicateEdge(_, _)) => {}
            Err(e) => panic!("unexpected contraction failure: {e}"),
        }
    }
    out
}

/// The Lie bracket by vertex insertion:
/// `[a, b] = a o b - (-1)^{|a||b|} b o a`, where `a o b` inserts `b` into each
/// vertex of `a`, reconnecting the incident edges in all ways. Edge order of
/// an insertion term is `a`'s edges (reattached) followed by `b`'s.
pub fn gc_bracket(a: &GraphVector, b: &GraphVector) -> GraphVector {
    let mut out = GraphVector::new();
    for (ka, ca) in a.terms() {
        let ga = rep(ka);
        for (kb, cb) in b.terms() {
            let gb = rep(kb);
            let koszul = (gc_degree(&ga).unwrap() * gc_degree(&gb).unwrap()) % 2 != 0;
            let c = ca * cb;
            for ins in insertions(&ga, &gb) {
                out.add_graph(&ins, c.clone()).expect("insertion stays gc2");
            }
            let c_back = if koszul { c.clone() } else { -c.clone() };
            for ins in insertions(&gb, &ga) {
                out.add_graph(&ins, c_back.clone())
                    .expect("insertion stays gc2");
            }
        }
    }
    out
}

fn rep(key: &GraphKey) -> Graph {
    crate::graph::CanonicalGraph {
        key: key.clone(),
        sign: 1,
    }
    .representative()
}

/// All insertions of `inner` into vertices of `outer`. The replaced vertex's
/// incident edges are reattached to arbitrary vertices of `inner`.
fn insertions(outer: &Graph, inner: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    let nv_inner = inner.vertex_count();
    for v in 0..outer.vertex_count() {
        // Inner occupies v's slot plus fresh indices at the end.
        let mut inner_ids = Vec::with_capacity(nv_inner);
        inner_ids.push(v);
        for i in 0..nv_inner - 1 {
            inner_ids.push(outer.vertex_count() + i);
        }
        let incident: Vec<usize> = (0..outer.edge_count())
            .filter(|&e| outer.edges[e].0 == v || outer.edges[e].1 == v)
            .collect();
        let d = incident.len();
        let mut choice = vec![0usize; d];
        loop {
            let mut edges = Vec::with_capacity(outer.edge_count() + inner.edge_count());
            for (idx, &(s, t)) in outer.edges.iter().enumerate() {
                let (mut s, mut t) = (s, t);
                if let Some(p) = incident.iter().position(|&e| e == idx) {
                    if s == v {
                        s = inner_ids[choice[p]];
                    }
                    if t == v {
                        t = inner_ids[choice[p]];
                    }
                }
                edges.push((s, t));
            }
            for &(s, t) in &inner.edges {
                edges.push((inner_ids[s], inner_ids[t]));
            }
            let g = Graph::new(
                Species::Gc2,
                outer.vertex_count() + nv_inner - 1,
                0,
                None,
                edges,
            )
            .expect("insertion produces a valid gc2 graph");
            out.push(g);

            // Advance the mixed-radix counter over reattachment choices.
            let mut carry = 0;
            loop {
                if carry == d {
                    break;
                }
                choice[carry] += 1;
                if choice[carry] < nv_inner {
                    break;
                }
                choice[carry] = 0;
                carry += 1;
            }
            if carry == d {
                break;
            }
        }
    }
    out
}

/// Coefficient of the `n`-spoke wheel in `v` (0 when `n` is even: even wheels
/// canonicalize to sign 0).
pub fn wheel_coefficient(v: &GraphVector, n: usize) -> Rat {
    assert!(n >= 3, "wheel coefficients start at 3 spokes");
    let wheel = wheel_family(WheelKind::Gc2Wheel, n).expect("n >= 3");
    v.coefficient_of(&wheel)
}

/// Checks that `v` is a closed degree-0 element.
pub fn check_degree_zero_cocycle(v: &GraphVector) -> Result<(), Gc2Error> {
    if vector_degrees(v).iter().any(|&d| d != 0) {
        return Err(Gc2Error::NotDegreeZero);
    }
    if !gc_differential(v).is_zero() {
        return Err(Gc2Error::NotClosed);
    }
    Ok(())
}

/// The induced change of wheel weights under a degree-0 cocycle: for every
/// odd `j`, the spokes-in and spokes-out wheel weights shift by the
/// coefficient of the `j`-spoke wheel in `v`; the two-ground wheel weights
/// are untouched. In particular the difference of the duflo and curv
/// characteristic series is invariant.
pub fn act_on_wheel_weights(
    w: &crate::formality::WeightCollection,
    v: &GraphVector,
) -> Result<crate::formality::WeightCollection, ActError> {
    check_degree_zero_cocycle(v)?;
    let mut out = w.clone();
    let max_vertices = v
        .terms()
        .map(|(k, _)| {
            crate::graph::CanonicalGraph {
                key: k.clone(),
                sign: 1,
            }
            .representative()
            .vertex_count()
        })
        .max()
        .unwrap_or(0);
    let mut j = 3;
    while j + 1 <= max_vertices {
        let q = wheel_coefficient(v, j);
        if !q.is_zero() {
            for kind in [WheelKind::DufloI, WheelKind::CurvIII] {
                let g = wheel_family(kind, j).expect("j >= 3");
                let current = w.weight_of(&g)?;
                out.set_weight(&g, current + q.clone())?;
            }
        }
        j += 2;
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActError {
    #[error(transparent)]
    Gc2(#[from] Gc2Error),
    #[error(transparent)]
    Weight(#[from] crate::formality::WeightError),
}
