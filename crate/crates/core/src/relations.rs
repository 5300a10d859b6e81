//! Enumeration of relation contributors: which graphs can produce a given
//! target graph inside the compatibility relations, and through which
//! mechanism.
//!
//! For the interpolation relation on operator-side graphs the mechanisms are
//! the Schouten term (a vertex of the source splits into two joined by a new
//! edge; inverted by contracting an aerial-aerial edge of the target), the
//! Hochschild term (the source gains a bare outer ground vertex or one of its
//! ground vertices splits into two adjacent ones), and composition at a
//! ground vertex (the target decomposes into an outer and an inner block).
//! For the module relation there are additionally the chain mechanisms
//! connecting disk graphs with operator graphs: the cyclic chain boundary
//! (two cyclically adjacent boundary slots merge) and the insertion of an
//! operator-side graph into a boundary slot.
//!
//! A pair `(source, mechanism)` is reported only when the target's signed
//! multiplicity in the expanded mechanism is nonzero: sources whose canonical
//! sign vanishes carry no coefficient, and expansions may cancel internally.
//! Edge-order conventions: new edges first, outer block before inner block;
//! every remaining sign is the canonicalization parity.

use crate::graph::{canonicalize, CanonicalGraph, Graph, GraphKey, Species};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelationKind {
    CochainHomotopy,
    Module,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mechanism {
    HochschildAttach,
    SchoutenContract,
    GerstenhaberCompose,
    ChainBoundary,
}

impl Mechanism {
    pub fn label(self) -> &'static str {
        match self {
            Mechanism::HochschildAttach => "hochschild_attach",
            Mechanism::SchoutenContract => "schouten_contract",
            Mechanism::GerstenhaberCompose => "gerstenhaber_compose",
            Mechanism::ChainBoundary => "chain_boundary",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelationError {
    #[error("target has {0} vertices; contributor enumeration is limited to 12")]
    TooLarge(usize),
    #[error("relation {0:?} does not apply to species {1:?}")]
    WrongTargetSpecies(RelationKind, Species),
}

/// Enumerates all `(source, mechanism)` pairs whose relation term contains
/// the target with nonzero coefficient, deduplicated by canonical key and
/// returned in canonical order.
pub fn relation_contributors(
    target: &Graph,
    relation: RelationKind,
) -> Result<Vec<(Graph, Mechanism)>, RelationError> {
    if target.vertex_count() > 12 {
        return Err(RelationError::TooLarge(target.vertex_count()));
    }
    match (relation, target.species) {
        (RelationKind::CochainHomotopy, Species::Kontsevich) => {}
        (RelationKind::Module, Species::Shoikhet) => {}
        (kind, species) => return Err(RelationError::WrongTargetSpecies(kind, species)),
    }
    let target_canon = canonicalize(target);
    let mut found: BTreeSet<(GraphKey, Mechanism)> = BTreeSet::new();

    // Schouten term: candidates from contracting aerial-aerial edges.
    for source in contraction_candidates(target) {
        let canon = canonicalize(&source);
        if canon.sign == 0 || found.contains(&(canon.key.clone(), Mechanism::SchoutenContract)) {
            continue;
        }
        let expansion = split_expansion(&canon.representative());
        if multiplicity(&expansion, &target_canon) != 0 {
            found.insert((canon.key, Mechanism::SchoutenContract));
        }
    }

    match relation {
        RelationKind::CochainHomotopy => {
            // Hochschild term.
            for source in ground_merge_candidates(target)
                .into_iter()
                .chain(isolated_end_ground_candidates(target))
            {
                if !h_type(&source) {
                    continue;
                }
                let canon = canonicalize(&source);
                if canon.sign == 0
                    || found.contains(&(canon.key.clone(), Mechanism::HochschildAttach))
                {
                    continue;
                }
                let expansion = dh_expansion(&canon.representative());
                if multiplicity(&expansion, &target_canon) != 0 {
                    found.insert((canon.key, Mechanism::HochschildAttach));
                }
            }
            // Composition at a ground vertex: group decompositions by the
            // (homotopy-side, operator-side) pair and expand each pair once.
            let mut pairs: BTreeMap<(GraphKey, GraphKey), (Graph, Graph, bool)> = BTreeMap::new();
            for (outer, inner) in compose_decompositions(target) {
                let co = canonicalize(&outer);
                let ci = canonicalize(&inner);
                if co.sign == 0 || ci.sign == 0 {
                    continue;
                }
                // Exactly one side can carry the homotopy edge count.
                let (h_side_outer, ok) = match (h_type(&outer), u_type(&inner)) {
                    (true, true) => (true, true),
                    _ => (false, u_type(&outer) && h_type(&inner)),
                };
                if !ok && !h_side_outer {
                    continue;
                }
                pairs
                    .entry((co.key.clone(), ci.key.clone()))
                    .or_insert((co.representative(), ci.representative(), h_side_outer));
            }
            for ((outer_key, inner_key), (outer, inner, h_side_outer)) in pairs {
                let expansion = compose_expansion(&outer, &inner);
                if multiplicity(&expansion, &target_canon) != 0 {
                    let h_key = if h_side_outer { outer_key } else { inner_key };
                    found.insert((h_key, Mechanism::GerstenhaberCompose));
                }
            }
        }
        RelationKind::Module => {
            // Cyclic chain boundary: merge two cyclically adjacent slots.
            for source in slot_merge_candidates(target) {
                let canon = canonicalize(&source);
                if canon.sign == 0
                    || found.contains(&(canon.key.clone(), Mechanism::ChainBoundary))
                {
                    continue;
                }
                let expansion = boundary_expansion(&canon.representative());
                if multiplicity(&expansion, &target_canon) != 0 {
                    found.insert((canon.key, Mechanism::ChainBoundary));
                }
            }
            // Operator block consumed by the chain action. The reported
            // source is the operator-side (kontsevich) graph.
            let mut pairs: BTreeMap<(GraphKey, GraphKey), (Graph, Graph)> = BTreeMap::new();
            for (outer, block) in module_decompositions(target) {
                if !u_type(&block) {
                    continue;
                }
                let co = canonicalize(&outer);
                let cb = canonicalize(&block);
                if co.sign == 0 || cb.sign == 0 {
                    continue;
                }
                pairs
                    .entry((co.key.clone(), cb.key.clone()))
                    .or_insert((co.representative(), cb.representative()));
            }
            for ((_, block_key), (outer, block)) in pairs {
                let expansion = module_insert_expansion(&outer, &block);
                if multiplicity(&expansion, &target_canon) != 0 {
                    found.insert((block_key, Mechanism::ChainBoundary));
                }
            }
            // Action of a field on the output form: an isolated aerial
            // vertex detaches.
            for source in isolated_aerial_candidates(target) {
                let canon = canonicalize(&source);
                if canon.sign != 0 {
                    found.insert((canon.key, Mechanism::GerstenhaberCompose));
                }
            }
        }
    }

    Ok(found
        .into_iter()
        .map(|(key, mech)| {
            (
                CanonicalGraph { key, sign: 1 }.representative(),
                mech,
            )
        })
        .collect())
}

/// `#edges = 2k + m - 2`: the count of operator-side morphism components.
pub fn u_type(g: &Graph) -> bool {
    g.edge_count() as i64 == 2 * g.aerial as i64 + g.ground as i64 - 2
}

/// `#edges = 2k + m - 1`: the homotopy-shifted count.
pub fn h_type(g: &Graph) -> bool {
    g.edge_count() as i64 == 2 * g.aerial as i64 + g.ground as i64 - 1
}

/// Signed multiplicity of the target inside an expansion.
fn multiplicity(expansion: &[(Graph, i64)], target: &CanonicalGraph) -> i64 {
    let mut acc = 0i64;
    for (g, coeff) in expansion {
        let canon = canonicalize(g);
        if canon.key == target.key {
            acc += coeff * canon.sign as i64;
        }
    }
    acc * target.sign as i64
}

/// Contract each aerial-aerial edge of the target (skipping contractions that
/// would close a tadpole).
fn contraction_candidates(target: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    for (i, &(a, b)) in target.edges.iter().enumerate() {
        if !target.is_aerial(a) || !target.is_aerial(b) {
            continue;
        }
        // A reverse edge would become a tadpole.
        if target.edges.iter().any(|&(s, t)| s == b && t == a) {
            continue;
        }
        let map = |x: usize| {
            let x = if x == b { a } else { x };
            if x > b {
                x - 1
            } else {
                x
            }
        };
        let edges: Vec<(usize, usize)> = target
            .edges
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &(s, t))| (map(s), map(t)))
            .collect();
        let distinguished = target.distinguished.map(|d| map(d));
        if let Ok(g) = Graph::new(
            target.species,
            target.aerial - 1,
            target.ground,
            distinguished,
            edges,
        ) {
            out.push(g);
        }
    }
    out
}

/// The Schouten expansion of a source: every aerial vertex splits into two
/// joined by a new edge (both directions), incident edges distributed over
/// the halves in all ways. The new edge is placed first.
fn split_expansion(source: &Graph) -> Vec<(Graph, i64)> {
    let mut out = Vec::new();
    let new_aerial = source.aerial;
    // Shift ground indices up by one to make room for the new aerial vertex.
    let shift = |x: usize| if x >= source.aerial { x + 1 } else { x };
    for v in 0..source.aerial {
        let incident: Vec<usize> = (0..source.edge_count())
            .filter(|&e| source.edges[e].0 == v || source.edges[e].1 == v)
            .collect();
        let d = incident.len();
        for dir in 0..2 {
            for mask in 0u32..(1 << d) {
                let mut edges = Vec::with_capacity(source.edge_count() + 1);
                edges.push(if dir == 0 {
                    (v, new_aerial)
                } else {
                    (new_aerial, v)
                });
                for (idx, &(s, t)) in source.edges.iter().enumerate() {
                    let (mut s, mut t) = (shift(s), shift(t));
                    if let Some(p) = incident.iter().position(|&e| e == idx) {
                        if mask >> p & 1 == 1 {
                            if source.edges[idx].0 == v {
                                s = new_aerial;
                            }
                            if source.edges[idx].1 == v {
                                t = new_aerial;
                            }
                        }
                    }
                    edges.push((s, t));
                }
                let distinguished = source.distinguished.map(shift);
                if let Ok(g) = Graph::new(
                    source.species,
                    source.aerial + 1,
                    source.ground,
                    distinguished,
                    edges,
                ) {
                    out.push((g, 1));
                }
            }
        }
    }
    out
}

/// Merge each adjacent pair of ground vertices of the target.
fn ground_merge_candidates(target: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    for i in 0..target.ground.saturating_sub(1) {
        let lo = target.aerial + i;
        let hi = lo + 1;
        let map = |x: usize| {
            let x = if x == hi { lo } else { x };
            if x > hi {
                x - 1
            } else {
                x
            }
        };
        let edges: Vec<(usize, usize)> =
            target.edges.iter().map(|&(s, t)| (map(s), map(t))).collect();
        if let Ok(g) = Graph::new(
            target.species,
            target.aerial,
            target.ground - 1,
            target.distinguished.map(map),
            edges,
        ) {
            out.push(g);
        }
    }
    out
}

/// Remove an isolated first or last ground vertex of the target.
fn isolated_end_ground_candidates(target: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    if target.ground == 0 {
        return out;
    }
    for end in [target.aerial, target.aerial + target.ground - 1] {
        if target.in_degree(end) > 0 || target.distinguished == Some(end) {
            continue;
        }
        let map = |x: usize| if x > end { x - 1 } else { x };
        let edges: Vec<(usize, usize)> =
            target.edges.iter().map(|&(s, t)| (map(s), map(t))).collect();
        if let Ok(g) = Graph::new(
            target.species,
            target.aerial,
            target.ground - 1,
            target.distinguished.map(map),
            edges,
        ) {
            out.push(g);
        }
    }
    out
}

/// The Hochschild expansion of a source with `m` ground vertices: a bare
/// slot in front (+), each slot split into two adjacent slots with its
/// in-edges distributed (sign `(-1)^{i+1}`), a bare slot at the end
/// (`(-1)^{m+1}`). Edge order is unchanged.
fn dh_expansion(source: &Graph) -> Vec<(Graph, i64)> {
    let mut out = Vec::new();
    let m = source.ground;

    // Bare slot in front.
    let shift_front = |x: usize| if x >= source.aerial { x + 1 } else { x };
    let edges: Vec<(usize, usize)> = source
        .edges
        .iter()
        .map(|&(s, t)| (shift_front(s), shift_front(t)))
        .collect();
    if let Ok(g) = Graph::new(
        source.species,
        source.aerial,
        m + 1,
        source.distinguished.map(shift_front),
        edges,
    ) {
        out.push((g, 1));
    }

    // Splits of slot i into (i, i+1).
    for i in 0..m {
        let slot = source.aerial + i;
        let in_edges = source.in_edges(slot);
        let d = in_edges.len();
        let sign = if i % 2 == 0 { -1 } else { 1 };
        for mask in 0u32..(1 << d) {
            let edges: Vec<(usize, usize)> = source
                .edges
                .iter()
                .enumerate()
                .map(|(idx, &(s, t))| {
                    let s2 = if s > slot { s + 1 } else { s };
                    let mut t2 = if t > slot { t + 1 } else { t };
                    if t == slot {
                        if let Some(p) = in_edges.iter().position(|&e| e == idx) {
                            if mask >> p & 1 == 1 {
                                t2 = slot + 1;
                            }
                        }
                    }
                    (s2, t2)
                })
                .collect();
            let dist = source.distinguished.map(|x| if x > slot { x + 1 } else { x });
            if let Ok(g) = Graph::new(source.species, source.aerial, m + 1, dist, edges) {
                out.push((g, sign));
            }
        }
    }

    // Bare slot at the end.
    let sign = if (m + 1) % 2 == 0 { 1 } else { -1 };
    if let Ok(g) = Graph::new(
        source.species,
        source.aerial,
        m + 1,
        source.distinguished,
        source.edges.clone(),
    ) {
        out.push((g, sign));
    }
    out
}

/// All splittings of the target into an outer graph (the block collapsed to
/// one ground slot) and an inner block: subsets of aerial vertices whose
/// out-edges stay inside the block, together with a ground interval.
fn compose_decompositions(target: &Graph) -> Vec<(Graph, Graph)> {
    let mut out = Vec::new();
    let k = target.aerial;
    let m = target.ground;
    for mask in 1u32..(1 << k) - 1 {
        let block: Vec<usize> = (0..k).filter(|&v| mask >> v & 1 == 1).collect();
        // Ground targets hit from inside the block.
        let mut ground_hits: Vec<usize> = Vec::new();
        let mut aerial_ok = true;
        for &(s, t) in &target.edges {
            if block.contains(&s) {
                if t >= k {
                    ground_hits.push(t - k);
                } else if !block.contains(&t) {
                    aerial_ok = false;
                    break;
                }
            }
        }
        if !aerial_ok {
            continue;
        }
        let lo_hit = ground_hits.iter().min().copied();
        let hi_hit = ground_hits.iter().max().copied();
        // Candidate intervals: empty ones at every position when nothing is
        // hit, otherwise all intervals containing the hit range.
        let mut intervals: Vec<(usize, usize)> = Vec::new(); // (start, len)
        match (lo_hit, hi_hit) {
            (None, None) => {
                for pos in 0..=m {
                    intervals.push((pos, 0));
                }
            }
            (Some(lo), Some(hi)) => {
                for start in 0..=lo {
                    for end in hi..m {
                        intervals.push((start, end - start + 1));
                    }
                }
            }
            _ => unreachable!(),
        }
        for (start, len) in intervals {
            if let Some(pair) = build_compose_pair(target, &block, start, len) {
                out.push(pair);
            }
        }
    }
    out
}

/// Builds (outer, inner) for a block and slot interval, or None if the inner
/// graph would be invalid.
fn build_compose_pair(
    target: &Graph,
    block: &[usize],
    start: usize,
    len: usize,
) -> Option<(Graph, Graph)> {
    let k = target.aerial;
    let outer_aerial: Vec<usize> = (0..k).filter(|v| !block.contains(v)).collect();
    // Inner graph: block aerial + interval slots.
    let inner_index = |v: usize| -> Option<usize> {
        if v < k {
            block.iter().position(|&b| b == v)
        } else {
            let slot = v - k;
            if slot >= start && slot < start + len {
                Some(block.len() + (slot - start))
            } else {
                None
            }
        }
    };
    let mut inner_edges = Vec::new();
    for &(s, t) in &target.edges {
        if let Some(si) = inner_index(s) {
            if si < block.len() {
                // Source inside the block: the whole edge belongs inside.
                let ti = inner_index(t)?;
                inner_edges.push((si, ti));
            }
        }
    }
    let inner = Graph::new(
        Species::Kontsevich,
        block.len(),
        len,
        None,
        inner_edges,
    )
    .ok()?;

    // Outer graph: remaining aerial vertices, slots with the interval
    // replaced by a single slot; edges into the block or interval point at
    // the new slot.
    let outer_k = outer_aerial.len();
    let new_slot = outer_k + start;
    let outer_index = |v: usize| -> usize {
        if v < k {
            match outer_aerial.iter().position(|&a| a == v) {
                Some(p) => p,
                None => usize::MAX, // block member: becomes the new slot
            }
        } else {
            let slot = v - k;
            if slot < start {
                outer_k + slot
            } else if slot < start + len {
                usize::MAX
            } else {
                outer_k + slot - len + 1
            }
        }
    };
    let mut outer_edges = Vec::new();
    for &(s, t) in &target.edges {
        let si = outer_index(s);
        if si == usize::MAX {
            continue; // edge owned by the inner block
        }
        let ti = outer_index(t);
        let ti = if ti == usize::MAX { new_slot } else { ti };
        outer_edges.push((si, ti));
    }
    let outer = Graph::new(
        Species::Kontsevich,
        outer_k,
        target.ground - len + 1,
        None,
        outer_edges,
    )
    .ok()?;
    Some((outer, inner))
}

/// The composition expansion `outer ∘ inner`: the inner block plugs into
/// each slot of the outer graph, the slot's in-edges landing on arbitrary
/// inner vertices. Edge order: outer edges then inner edges; slot `i` enters
/// with the Gerstenhaber sign `(-1)^{i (m_inner - 1)}`.
fn compose_expansion(outer: &Graph, inner: &Graph) -> Vec<(Graph, i64)> {
    let mut out = Vec::new();
    let ka = outer.aerial;
    let kb = inner.aerial;
    let ma = outer.ground;
    let mb = inner.ground;
    for slot in 0..ma {
        let sign = if (slot * (mb + 1)) % 2 == 0 { 1 } else { -1 };
        let slot_vertex = ka + slot;
        let in_edges = outer.in_edges(slot_vertex);
        let d = in_edges.len();
        // Composite layout: outer aerial, inner aerial, then slots:
        // outer slots < slot, inner slots, outer slots > slot.
        let comp_ground = ma + mb - 1;
        let outer_map = |v: usize| -> usize {
            if v < ka {
                v
            } else {
                let s = v - ka;
                if s < slot {
                    ka + kb + s
                } else {
                    // s > slot after redistribution
                    ka + kb + s + mb - 1
                }
            }
        };
        let inner_map = |v: usize| -> usize {
            if v < kb {
                ka + v
            } else {
                ka + kb + slot + (v - kb)
            }
        };
        let nv_inner = kb + mb;
        let mut choice = vec![0usize; d];
        loop {
            let mut edges = Vec::with_capacity(outer.edge_count() + inner.edge_count());
            let mut valid = true;
            for (idx, &(s, t)) in outer.edges.iter().enumerate() {
                let s2 = outer_map(s);
                let t2 = if t == slot_vertex {
                    match in_edges.iter().position(|&e| e == idx) {
                        Some(p) => inner_map(choice[p]),
                        None => {
                            valid = false;
                            break;
                        }
                    }
                } else {
                    outer_map(t)
                };
                edges.push((s2, t2));
            }
            if valid {
                for &(s, t) in &inner.edges {
                    edges.push((inner_map(s), inner_map(t)));
                }
                if let Ok(g) = Graph::new(
                    Species::Kontsevich,
                    ka + kb,
                    comp_ground,
                    None,
                    edges,
                ) {
                    out.push((g, sign));
                }
            }

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

/// Merge each cyclically adjacent pair of boundary slots of a disk target.
fn slot_merge_candidates(target: &Graph) -> Vec<Graph> {
    let slots = target.ground;
    if slots < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..slots {
        // Merge slot pair (i, i+1 mod slots) into one.
        let a = target.aerial + i;
        let b = target.aerial + (i + 1) % slots;
        let (keep, drop) = (a.min(b), a.max(b));
        let map = |x: usize| {
            let x = if x == drop { keep } else { x };
            if x > drop {
                x - 1
            } else {
                x
            }
        };
        let edges: Vec<(usize, usize)> =
            target.edges.iter().map(|&(s, t)| (map(s), map(t))).collect();
        if let Ok(g) = Graph::new(target.species, target.aerial, slots - 1, None, edges) {
            out.push(g);
        }
    }
    out
}

/// The cyclic boundary expansion of a disk source: each slot splits into two
/// adjacent slots with in-edges distributed, including the wrap where slot 0
/// splits into a final slot and slot 0, with alternating signs.
fn boundary_expansion(source: &Graph) -> Vec<(Graph, i64)> {
    let mut out = Vec::new();
    let slots = source.ground;
    // Non-wrap splits of slot i, signs (-1)^i.
    for i in 0..slots {
        let slot = source.aerial + i;
        let in_edges = source.in_edges(slot);
        let d = in_edges.len();
        let sign = if i % 2 == 0 { 1 } else { -1 };
        for mask in 0u32..(1 << d) {
            let edges: Vec<(usize, usize)> = source
                .edges
                .iter()
                .enumerate()
                .map(|(idx, &(s, t))| {
                    let s2 = if s > slot { s + 1 } else { s };
                    let mut t2 = if t > slot { t + 1 } else { t };
                    if t == slot {
                        if let Some(p) = in_edges.iter().position(|&e| e == idx) {
                            if mask >> p & 1 == 1 {
                                t2 = slot + 1;
                            }
                        }
                    }
                    (s2, t2)
                })
                .collect();
            if let Ok(g) = Graph::new(source.species, source.aerial, slots + 1, None, edges) {
                out.push((g, sign));
            }
        }
    }
    // Wrap: slot 0 splits into (new last slot, slot 0), sign (-1)^{slots}.
    let slot0 = source.aerial;
    let in_edges = source.in_edges(slot0);
    let d = in_edges.len();
    let sign = if slots % 2 == 0 { 1 } else { -1 };
    for mask in 0u32..(1 << d) {
        let last = source.aerial + slots;
        let edges: Vec<(usize, usize)> = source
            .edges
            .iter()
            .enumerate()
            .map(|(idx, &(s, t))| {
                let mut t2 = t;
                if t == slot0 {
                    if let Some(p) = in_edges.iter().position(|&e| e == idx) {
                        if mask >> p & 1 == 1 {
                            t2 = last;
                        }
                    }
                }
                (s, t2)
            })
            .collect();
        if let Ok(g) = Graph::new(source.species, source.aerial, slots + 1, None, edges) {
            out.push((g, sign));
        }
    }
    out
}

/// Decompositions of a disk target into an outer disk graph and a consumed
/// operator block: out-closed aerial subsets together with the cyclic run of
/// boundary slots they capture.
fn module_decompositions(target: &Graph) -> Vec<(Graph, Graph)> {
    let mut out = Vec::new();
    let k = target.aerial;
    let slots = target.ground;
    let full = (1u32 << k) - 1;
    for mask in 1u32..=full {
        let block: Vec<usize> = (0..k).filter(|&v| mask >> v & 1 == 1).collect();
        let mut ground_hits: BTreeSet<usize> = BTreeSet::new();
        let mut aerial_ok = true;
        for &(s, t) in &target.edges {
            if block.contains(&s) {
                if t >= k {
                    ground_hits.insert(t - k);
                } else if !block.contains(&t) {
                    aerial_ok = false;
                    break;
                }
            }
        }
        if !aerial_ok {
            continue;
        }
        if ground_hits.is_empty() {
            // Function block attaching at any slot; leave at least one
            // aerial vertex outside unless the outer graph still has slots.
            if block.len() == k && slots == 0 {
                continue;
            }
            for s in 0..slots {
                if let Some(pair) = build_module_pair(target, &block, s, 0) {
                    out.push(pair);
                }
            }
        } else {
            // Runs of slots covering the hits, cyclically.
            for start in 0..slots {
                for len in 1..=slots {
                    let covered: BTreeSet<usize> =
                        (0..len).map(|o| (start + o) % slots).collect();
                    if ground_hits.iter().all(|h| covered.contains(h)) {
                        if let Some(pair) = build_module_pair(target, &block, start, len) {
                            out.push(pair);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Builds (outer disk graph, inner operator graph) for a block and a cyclic
/// slot run. `len == 0` means a function block attached at slot `start`.
fn build_module_pair(
    target: &Graph,
    block: &[usize],
    start: usize,
    len: usize,
) -> Option<(Graph, Graph)> {
    let k = target.aerial;
    let slots = target.ground;
    if len >= slots && len > 0 && slots == 0 {
        return None;
    }
    let run: Vec<usize> = (0..len).map(|o| (start + o) % slots.max(1)).collect();
    let outer_aerial: Vec<usize> = (0..k).filter(|v| !block.contains(v)).collect();
    if len == slots && len > 0 && outer_aerial.is_empty() {
        return None;
    }

    // Inner operator graph.
    let inner_index = |v: usize| -> Option<usize> {
        if v < k {
            block.iter().position(|&b| b == v)
        } else {
            run.iter()
                .position(|&s| s == v - k)
                .map(|p| block.len() + p)
        }
    };
    let mut inner_edges = Vec::new();
    for &(s, t) in &target.edges {
        if let Some(si) = inner_index(s) {
            if si < block.len() {
                let ti = inner_index(t)?;
                inner_edges.push((si, ti));
            }
        }
    }
    let inner = Graph::new(Species::Kontsevich, block.len(), len, None, inner_edges).ok()?;

    // Outer disk graph: the run collapses into the attachment slot (len = 0
    // keeps the slot as is; len >= 1 replaces the run by one slot at the
    // run's start, i.e. the output chain factor).
    let outer_k = outer_aerial.len();
    let kept_slots: Vec<usize> = if len == 0 {
        (0..slots).collect()
    } else {
        let mut kept: Vec<usize> = (0..slots).filter(|s| !run.contains(s)).collect();
        // The output factor takes the run's start position in cyclic order.
        kept.push(start);
        kept.sort_unstable();
        kept
    };
    let replacement_slot = if len == 0 { start } else { start };
    let outer_index = |v: usize| -> Option<usize> {
        if v < k {
            outer_aerial.iter().position(|&a| a == v)
        } else {
            let s = v - k;
            let s = if len > 0 && run.contains(&s) {
                replacement_slot
            } else {
                s
            };
            kept_slots
                .iter()
                .position(|&x| x == s)
                .map(|p| outer_k + p)
        }
    };
    let mut outer_edges = Vec::new();
    for &(s, t) in &target.edges {
        if block.contains(&s) {
            continue; // edge owned by the block
        }
        let si = outer_index(s)?;
        let ti = if t < k && block.contains(&t) {
            outer_index(k + replacement_slot)?
        } else {
            outer_index(t)?
        };
        outer_edges.push((si, ti));
    }
    let outer = Graph::new(
        Species::Shoikhet,
        outer_k,
        kept_slots.len(),
        None,
        outer_edges,
    )
    .ok()?;
    Some((outer, inner))
}

/// The chain-action expansion: the operator block is consumed at each slot of
/// the outer graph. A block without boundary slots multiplies into the slot
/// (in-edges may stay); a block with slots replaces the slot by its own run.
/// Edge order: outer edges then block edges; slot `s` carries `(-1)^s`.
fn module_insert_expansion(outer: &Graph, block: &Graph) -> Vec<(Graph, i64)> {
    let mut out = Vec::new();
    let ka = outer.aerial;
    let kb = block.aerial;
    let ma = outer.ground;
    let mb = block.ground;
    for slot in 0..ma {
        let sign = if slot % 2 == 0 { 1 } else { -1 };
        let slot_vertex = ka + slot;
        let in_edges = outer.in_edges(slot_vertex);
        let d = in_edges.len();
        let comp_ground = if mb == 0 { ma } else { ma + mb - 1 };
        let outer_map = |v: usize| -> usize {
            if v < ka {
                v
            } else {
                let s = v - ka;
                if mb == 0 || s <= slot {
                    ka + kb + s
                } else {
                    ka + kb + s + mb - 1
                }
            }
        };
        let block_map = |v: usize| -> usize {
            if v < kb {
                ka + v
            } else {
                ka + kb + slot + (v - kb)
            }
        };
        // Targets an in-edge of the slot can land on: block aerial vertices,
        // the slot itself when the block multiplies into it, or the block's
        // own slots when it replaces it.
        let mut landing: Vec<usize> = (0..kb).map(|v| ka + v).collect();
        if mb == 0 {
            landing.push(outer_map(slot_vertex));
        } else {
            for q in 0..mb {
                landing.push(ka + kb + slot + q);
            }
        }
        let mut choice = vec![0usize; d];
        loop {
            let mut edges = Vec::with_capacity(outer.edge_count() + block.edge_count());
            for (idx, &(s, t)) in outer.edges.iter().enumerate() {
                let s2 = outer_map(s);
                let t2 = if t == slot_vertex {
                    match in_edges.iter().position(|&e| e == idx) {
                        Some(p) => landing[choice[p]],
                        None => outer_map(t),
                    }
                } else {
                    outer_map(t)
                };
                edges.push((s2, t2));
            }
            for &(s, t) in &block.edges {
                edges.push((block_map(s), block_map(t)));
            }
            // When the block replaces the slot, the composite drops it.
            let composite = if mb == 0 {
                Graph::new(Species::Shoikhet, ka + kb, comp_ground, None, edges)
            } else {
                // Remove the replaced slot: indices above it shift down.
                let removed = ka + kb + slot + mb;
                let fix = |x: usize| if x > removed { x - 1 } else { x };
                debug_assert!(edges.iter().all(|&(s, t)| s != removed && t != removed));
                let edges: Vec<(usize, usize)> =
                    edges.iter().map(|&(s, t)| (fix(s), fix(t))).collect();
                Graph::new(Species::Shoikhet, ka + kb, comp_ground, None, edges)
            };
            if let Ok(g) = composite {
                out.push((g, sign));
            }

            let mut carry = 0;
            loop {
                if carry == d {
                    break;
                }
                choice[carry] += 1;
                if choice[carry] < landing.len() {
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

/// Sources obtained by deleting an isolated aerial vertex.
fn isolated_aerial_candidates(target: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    for v in 0..target.aerial {
        if target.valence(v) > 0 {
            continue;
        }
        let map = |x: usize| if x > v { x - 1 } else { x };
        let edges: Vec<(usize, usize)> =
            target.edges.iter().map(|&(s, t)| (map(s), map(t))).collect();
        if let Ok(g) = Graph::new(
            target.species,
            target.aerial - 1,
            target.ground,
            target.distinguished.map(map),
            edges,
        ) {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{wheel_family, WheelKind};

    fn keys(list: &[(Graph, Mechanism)]) -> Vec<(GraphKey, Mechanism)> {
        list.iter()
            .map(|(g, m)| (canonicalize(g).key, *m))
            .collect()
    }

    #[test]
    fn spokes_in_wheel_has_unique_homotopy_source() {
        for j in 2..=5 {
            let target = wheel_family(WheelKind::DufloI, j).unwrap();
            let found = relation_contributors(&target, RelationKind::CochainHomotopy).unwrap();
            let base = wheel_family(WheelKind::HomotopyBase, j).unwrap();
            assert_eq!(
                keys(&found),
                vec![(canonicalize(&base).key, Mechanism::GerstenhaberCompose)],
                "j = {j}"
            );
        }
    }

    #[test]
    fn two_ground_wheel_has_unique_homotopy_source() {
        for j in 2..=5 {
            let target = wheel_family(WheelKind::DufloII, j).unwrap();
            let found = relation_contributors(&target, RelationKind::CochainHomotopy).unwrap();
            let base = wheel_family(WheelKind::HomotopyBase, j).unwrap();
            assert_eq!(
                keys(&found),
                vec![(canonicalize(&base).key, Mechanism::HochschildAttach)],
                "j = {j}"
            );
        }
    }

    #[test]
    fn spokes_out_wheel_has_no_contributors() {
        for j in 2..=5 {
            let target = wheel_family(WheelKind::CurvIII, j).unwrap();
            let found = relation_contributors(&target, RelationKind::CochainHomotopy).unwrap();
            assert!(found.is_empty(), "j = {j}: {found:?}");
        }
    }

    #[test]
    fn module_target_sources() {
        for j in 2..=4 {
            let target = wheel_family(WheelKind::ModuleTarget, j).unwrap();
            let found = relation_contributors(&target, RelationKind::Module).unwrap();
            let curv = canonicalize(&wheel_family(WheelKind::CurvIII, j).unwrap()).key;
            let chain = canonicalize(&wheel_family(WheelKind::ChainWheel, j).unwrap()).key;
            let mut expected = vec![
                (curv, Mechanism::ChainBoundary),
                (chain, Mechanism::SchoutenContract),
            ];
            expected.sort();
            assert_eq!(keys(&found), expected, "j = {j}");
        }
    }

    #[test]
    fn contributors_independent_of_labeling() {
        // Relabel the rim of the target and permute its edges; the
        // contributor list is unchanged.
        let target = wheel_family(WheelKind::DufloII, 3).unwrap();
        let mut edges = target.edges.clone();
        edges.rotate_left(2);
        let perm = [2usize, 0, 1, 3, 4];
        let edges: Vec<(usize, usize)> =
            edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
        let relabeled = Graph::new(Species::Kontsevich, 3, 2, None, edges).unwrap();
        let a = relation_contributors(&target, RelationKind::CochainHomotopy).unwrap();
        let b = relation_contributors(&relabeled, RelationKind::CochainHomotopy).unwrap();
        assert_eq!(keys(&a), keys(&b));
    }

    #[test]
    fn oversized_target_rejected() {
        let target = wheel_family(WheelKind::DufloI, 12).unwrap();
        assert_eq!(
            relation_contributors(&target, RelationKind::CochainHomotopy).unwrap_err(),
            RelationError::TooLarge(13)
        );
    }

    #[test]
    fn species_mismatch_rejected() {
        let t = wheel_family(WheelKind::Tetrahedron, 0).unwrap();
        assert!(matches!(
            relation_contributors(&t, RelationKind::CochainHomotopy),
            Err(RelationError::WrongTargetSpecies(_, Species::Gc2))
        ));
    }
}
