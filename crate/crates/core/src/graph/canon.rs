//! Canonical forms with orientation signs.
//!
//! For each isomorphism class we fix one representative graph together with an
//! ordering of its edges; [`canonicalize`] finds that representative and the
//! parity of the edge permutation carrying the input's edge order onto the
//! representative's. Admissible relabelings permute aerial vertices only
//! (all vertices for gc2): ground vertices are linearly ordered for
//! kontsevich/brane graphs and cyclically ordered with slot 0 distinguished
//! for shoikhet graphs, so they stay fixed.
//!
//! A graph whose automorphism group induces an odd permutation of the edges is
//! zero as an element of any of the complexes; such graphs get sign 0. In
//! particular any directed graph with parallel edges has sign 0 (swapping the
//! two copies is an odd automorphism).
//!
//! The search is individualization–refinement: vertex colors are refined to a
//! fixpoint, the first non-singleton color class is split on every choice of
//! vertex, and the minimal serialized labeling over all leaves is the key.

use super::{Graph, Species};

/// Species-tagged byte string uniquely identifying an isomorphism class.
pub type GraphKey = Vec<u8>;

/// A canonical form: the key of the representative and the sign relating the
/// input to it (+1, -1, or 0 for graphs killed by an odd automorphism).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalGraph {
    pub key: GraphKey,
    pub sign: i8,
}

impl CanonicalGraph {
    /// Decodes the representative graph stored in the key.
    pub fn representative(&self) -> Graph {
        decode_key(&self.key)
    }
}

/// Computes the canonical form of a valid graph.
pub fn canonicalize(g: &Graph) -> CanonicalGraph {
    // Parallel edges force sign 0 regardless of the rest of the structure,
    // but the key must still identify the class.
    let mut search = Search::new(g);
    search.run();
    let key = encode_key(g, &search.best_edges.clone().expect("search visits a leaf"));
    let sign = if search.parallel || (search.even_seen && search.odd_seen) {
        0
    } else if search.odd_seen {
        -1
    } else {
        1
    };
    CanonicalGraph { key, sign }
}

struct Search<'a> {
    g: &'a Graph,
    movable: Vec<usize>,
    fixed_label: Vec<Option<usize>>,
    best_edges: Option<Vec<(usize, usize)>>,
    even_seen: bool,
    odd_seen: bool,
    parallel: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.vertex_count();
        let movable: Vec<usize> = if g.species == Species::Gc2 {
            (0..n).collect()
        } else {
            (0..g.aerial).collect()
        };
        // Ground vertices keep their own indices.
        let mut fixed_label = vec![None; n];
        for v in g.aerial..n {
            fixed_label[v] = Some(v);
        }
        Search {
            g,
            movable,
            fixed_label,
            best_edges: None,
            even_seen: false,
            odd_seen: false,
            parallel: false,
        }
    }

    fn run(&mut self) {
        let colors = self.initial_colors();
        self.descend(colors, 0);
    }

    /// Structure-derived starting colors: degrees plus the pattern of edges
    /// into the (labeled) ground vertices.
    fn initial_colors(&self) -> Vec<u64> {
        let g = self.g;
        let n = g.vertex_count();
        let mut colors = vec![0u64; n];
        for v in 0..n {
            if let Some(l) = self.fixed_label[v] {
                // Fixed vertices get unique colors below any movable color.
                colors[v] = l as u64;
                continue;
            }
            let mut h = Fnv::new();
            h.write(1_000_000 + g.out_degree(v) as u64);
            h.write(g.in_degree(v) as u64);
            let mut ground_pattern: Vec<u64> = g
                .edges
                .iter()
                .filter_map(|&(s, t)| {
                    if s == v && self.fixed_label[t].is_some() {
                        Some(2 * t as u64)
                    } else if t == v && self.fixed_label[s].is_some() {
                        Some(2 * s as u64 + 1)
                    } else {
                        None
                    }
                })
                .collect();
            ground_pattern.sort_unstable();
            for x in ground_pattern {
                h.write(x);
            }
            colors[v] = h.finish() | (1 << 63);
        }
        colors
    }

    fn refine(&self, colors: &mut Vec<u64>) {
        let g = self.g;
        let n = g.vertex_count();
        // The stored endpoint order of a gc2 edge is a labeling artifact, so
        // undirected neighborhoods must ignore it.
        let dir_tag = if g.species == Species::Gc2 { 0u64 } else { 1u64 };
        loop {
            let mut next = vec![0u64; n];
            for v in 0..n {
                let mut h = Fnv::new();
                h.write(colors[v]);
                let mut neigh: Vec<u64> = g
                    .edges
                    .iter()
                    .flat_map(|&(s, t)| {
                        let mut out = Vec::new();
                        if s == v {
                            out.push(colors[t].wrapping_mul(2));
                        }
                        if t == v {
                            out.push(colors[s].wrapping_mul(2).wrapping_add(dir_tag));
                        }
                        out
                    })
                    .collect();
                neigh.sort_unstable();
                for x in neigh {
                    h.write(x);
                }
                next[v] = h.finish() | (colors[v] & (1 << 63));
            }
            // Preserve fixed labels exactly.
            for v in 0..n {
                if self.fixed_label[v].is_some() {
                    next[v] = colors[v];
                }
            }
            if class_count(&next) == class_count(colors) {
                return;
            }
            *colors = next;
        }
    }

    fn descend(&mut self, mut colors: Vec<u64>, depth: u64) {
        self.refine(&mut colors);
        // First non-singleton class among movable vertices, by color value.
        let mut cells: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
        for &v in &self.movable {
            cells.entry(colors[v]).or_default().push(v);
        }
        let split = cells.into_iter().find(|(_, vs)| vs.len() > 1);
        match split {
            None => self.leaf(&colors),
            Some((_, vs)) => {
                for v in vs {
                    let mut c2 = colors.clone();
                    // Individualize with a depth-unique mark: one vertex is
                    // singled out per level, so marks never collide, and the
                    // mark value only depends on the (invariant) tree depth.
                    c2[v] = (1 << 62) | depth;
                    self.descend(c2, depth + 1);
                }
            }
        }
    }

    fn leaf(&mut self, colors: &[u64]) {
        let g = self.g;
        // Movable vertices relabeled by color order; fixed keep their labels.
        let mut order: Vec<usize> = self.movable.clone();
        order.sort_by_key(|&v| colors[v]);
        let n = g.vertex_count();
        let mut relabel = vec![usize::MAX; n];
        for (new, &v) in order.iter().enumerate() {
            relabel[v] = new;
        }
        for v in 0..n {
            if let Some(l) = self.fixed_label[v] {
                relabel[v] = l;
            }
        }
        let mut edges: Vec<(usize, usize)> = g
            .edges
            .iter()
            .map(|&(s, t)| {
                let (s, t) = (relabel[s], relabel[t]);
                if g.species == Species::Gc2 {
                    (s.min(t), s.max(t))
                } else {
                    (s, t)
                }
            })
            .collect();
        let parity = sort_parity(&mut edges);
        let parallel = edges.windows(2).any(|w| w[0] == w[1]);

        let better = match &self.best_edges {
            None => true,
            Some(best) => edges < *best,
        };
        if better {
            self.best_edges = Some(edges.clone());
            self.even_seen = false;
            self.odd_seen = false;
            self.parallel = false;
        }
        if self.best_edges.as_ref() == Some(&edges) {
            self.parallel |= parallel;
            match parity {
                0 => self.even_seen = true,
                _ => self.odd_seen = true,
            }
        }
    }
}

/// Sorts the edge list and returns the permutation parity (0 even, 1 odd).
/// Parity among equal elements is irrelevant here: duplicates are flagged
/// separately and force sign 0.
fn sort_parity(edges: &mut Vec<(usize, usize)>) -> u8 {
    let mut indexed: Vec<(usize, usize, usize)> =
        edges.iter().enumerate().map(|(i, &(s, t))| (s, t, i)).collect();
    indexed.sort_unstable();
    let perm: Vec<usize> = indexed.iter().map(|&(_, _, i)| i).collect();
    *edges = indexed.into_iter().map(|(s, t, _)| (s, t)).collect();
    permutation_parity(&perm)
}

/// Parity of a permutation given as a vector of images (0 even, 1 odd).
pub fn permutation_parity(perm: &[usize]) -> u8 {
    let mut seen = vec![false; perm.len()];
    let mut parity = 0u8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm[v];
            len += 1;
        }
        parity ^= ((len + 1) & 1) as u8;
    }
    parity
}

fn class_count(colors: &[u64]) -> usize {
    let mut set: Vec<u64> = colors.to_vec();
    set.sort_unstable();
    set.dedup();
    set.len()
}

fn encode_key(g: &Graph, edges: &[(usize, usize)]) -> GraphKey {
    let mut key = Vec::with_capacity(8 + 4 * edges.len());
    key.push(match g.species {
        Species::Kontsevich => b'k',
        Species::Shoikhet => b's',
        Species::Gc2 => b'g',
        Species::Brane => b'b',
    });
    push_u16(&mut key, g.aerial);
    push_u16(&mut key, g.ground);
    push_u16(&mut key, g.distinguished.map(|d| d + 1).unwrap_or(0));
    push_u16(&mut key, edges.len());
    for &(s, t) in edges {
        push_u16(&mut key, s);
        push_u16(&mut key, t);
    }
    key
}

fn decode_key(key: &[u8]) -> Graph {
    let species = match key[0] {
        b'k' => Species::Kontsevich,
        b's' => Species::Shoikhet,
        b'g' => Species::Gc2,
        b'b' => Species::Brane,
        other => panic!("corrupt graph key tag {other}"),
    };
    let aerial = read_u16(key, 1);
    let ground = read_u16(key, 3);
    let dist = read_u16(key, 5);
    let count = read_u16(key, 7);
    let mut edges = Vec::with_capacity(count);
    for i in 0..count {
        let s = read_u16(key, 9 + 4 * i);
        let t = read_u16(key, 11 + 4 * i);
        edges.push((s, t));
    }
    let distinguished = if dist == 0 { None } else { Some(dist - 1) };
    Graph::new(species, aerial, ground, distinguished, edges).expect("canonical key decodes")
}

fn push_u16(buf: &mut Vec<u8>, v: usize) {
    debug_assert!(v < usize::from(u16::MAX));
    buf.extend_from_slice(&(v as u16).to_be_bytes());
}

fn read_u16(buf: &[u8], at: usize) -> usize {
    u16::from_be_bytes([buf[at], buf[at + 1]]) as usize
}

/// FNV-1a, used only to make structure-derived colors comparable. Collisions
/// merely enlarge color classes; they never change a canonical key.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }
    fn write(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
    fn finish(&self) -> u64 {
        // Keep the top two bits free for individualization marks.
        self.0 & ((1 << 62) - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{wedge_graph, Graph, Species};
    use super::*;
    use itertools::Itertools;

    fn tetrahedron() -> Graph {
        Graph::new(
            Species::Gc2,
            4,
            0,
            None,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap()
    }

    #[test]
    fn wedge_edge_swap_flips_sign() {
        let g = wedge_graph();
        let c = canonicalize(&g);
        assert_eq!(c.sign, 1);
        let swapped =
            Graph::new(Species::Kontsevich, 1, 2, None, vec![(0, 2), (0, 1)]).unwrap();
        let c2 = canonicalize(&swapped);
        assert_eq!(c2.key, c.key);
        assert_eq!(c2.sign, -1);
    }

    #[test]
    fn tetrahedron_relabelings_share_key() {
        let t = tetrahedron();
        let c = canonicalize(&t);
        for perm in (0..4).permutations(4) {
            let edges: Vec<(usize, usize)> =
                t.edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
            let g = Graph::new(Species::Gc2, 4, 0, None, edges).unwrap();
            let cg = canonicalize(&g);
            assert_eq!(cg.key, c.key);
            assert!(cg.sign == 1 || cg.sign == -1);
        }
    }

    #[test]
    fn idempotent_on_representative() {
        let t = tetrahedron();
        let c = canonicalize(&t);
        let rep = c.representative();
        let c2 = canonicalize(&rep);
        assert_eq!(c2.key, c.key);
        assert_eq!(c2.sign, 1);
    }

    #[test]
    fn parallel_edges_sign_zero() {
        let g = Graph::new(Species::Kontsevich, 2, 0, None, vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(canonicalize(&g).sign, 0);
    }

    #[test]
    fn ground_order_distinguishes_kontsevich_graphs() {
        // One edge to the first vs. the second of two ground vertices.
        let a = Graph::new(Species::Kontsevich, 1, 2, None, vec![(0, 1)]).unwrap();
        let b = Graph::new(Species::Kontsevich, 1, 2, None, vec![(0, 2)]).unwrap();
        assert_ne!(canonicalize(&a).key, canonicalize(&b).key);
    }

    #[test]
    fn distinguished_vertex_distinguishes_brane_graphs() {
        let a = Graph::new(Species::Brane, 0, 2, Some(0), vec![]).unwrap();
        let b = Graph::new(Species::Brane, 0, 2, Some(1), vec![]).unwrap();
        assert_ne!(canonicalize(&a).key, canonicalize(&b).key);
    }
}
