//! Weight collections, star products built from them, and the wheel-weight
//! characteristic series.
//!
//! A weight collection is the assignment of one exact rational per canonical
//! graph, total below a vertex bound (absent keys below the bound mean
//! weight zero). The star product of two polynomials against a bivector is
//!
//! `f ⋆ g = fg + sum_{k=1..order} (hbar^k / k!) sum_G c_G D_G(pi,..,pi)(f, g)`
//!
//! with the inner sum over graphs with `k` aerial and two ground vertices,
//! *counted with vertex labelings*: an isomorphism class enters with
//! multiplicity `k!/|Aut|`, the number of ways its aerial vertices receive
//! the `k` bivector slots. Holding one weight per canonical graph and
//! evaluating the canonical representative keeps the pairing `c_G D_G`
//! orientation-consistent. The normalization (wedge weight 1/2, the labeled
//! sum, `hbar^k/k!`) makes the constant-coefficient case the usual
//! exponential product and is pinned against the weight-integral oracle by
//! the second-order associativity check; see CONVENTIONS.md.

use crate::graph::{canonicalize, wheel_family, CanonicalGraph, Graph, GraphKey, Species, WheelKind};
use crate::grapheval::{evaluate_kontsevich_operator, EvalError};
use crate::poly::Poly;
use crate::polyvec::{schouten_bracket, FieldError, PolyVectorField};
use crate::rational::{format_rat, parse_rat, Rat};
use crate::series::TruncatedSeries;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("graph with {0} vertices is beyond the collection bound {1} and has no stored weight")]
    BeyondBound(usize, usize),
    #[error("cannot store a weight on a graph with canonical sign 0")]
    DegenerateGraph,
    #[error("normalization violated: {0}")]
    Normalization(String),
    #[error("bad weight table entry: {0}")]
    BadEntry(String),
    #[error("bivector expected, got a degree-{0} field")]
    NotBivector(usize),
    #[error("collection bound {0} cannot cover graphs of order {1}")]
    InsufficientBound(usize, usize),
    #[error("the bivector is not Poisson: [pi, pi] != 0")]
    NotPoisson,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A map from canonical graphs to exact rational weights, total for graphs
/// with at most `max_size` vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCollection {
    weights: BTreeMap<GraphKey, Rat>,
    max_size: usize,
}

impl WeightCollection {
    pub fn new(max_size: usize) -> WeightCollection {
        WeightCollection {
            weights: BTreeMap::new(),
            max_size,
        }
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn entries(&self) -> impl Iterator<Item = (&GraphKey, &Rat)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Sets the weight of the class of `g`, oriented by `g`'s edge order.
    pub fn set_weight(&mut self, g: &Graph, w: Rat) -> Result<(), WeightError> {
        let canon = canonicalize(g);
        if canon.sign == 0 {
            return if w.is_zero() {
                Ok(())
            } else {
                Err(WeightError::DegenerateGraph)
            };
        }
        let stored = w * Rat::from_integer(canon.sign.into());
        if stored.is_zero() {
            self.weights.remove(&canon.key);
        } else {
            self.weights.insert(canon.key, stored);
        }
        Ok(())
    }

    /// The weight of `g`, oriented by `g`'s edge order. Degenerate graphs
    /// weigh zero; absent graphs weigh zero below the bound and are an error
    /// above it.
    pub fn weight_of(&self, g: &Graph) -> Result<Rat, WeightError> {
        let canon = canonicalize(g);
        if canon.sign == 0 {
            return Ok(Rat::zero());
        }
        match self.weights.get(&canon.key) {
            Some(w) => Ok(w * Rat::from_integer(canon.sign.into())),
            None if g.vertex_count() <= self.max_size => Ok(Rat::zero()),
            None => Err(WeightError::BeyondBound(g.vertex_count(), self.max_size)),
        }
    }

    /// Checks the stored normalization invariants: the wedge graph weighs 1/2
    /// when present, and the two edgeless two-ground brane graphs (one for
    /// each position of the distinguished vertex) weigh 1 when present.
    pub fn validate_normalization(&self) -> Result<(), WeightError> {
        let wedge = crate::graph::wedge_graph();
        let key = canonicalize(&wedge).key;
        if let Some(w) = self.weights.get(&key) {
            if *w != Rat::new(1.into(), 2.into()) {
                return Err(WeightError::Normalization(format!(
                    "wedge graph weighs {}, expected 1/2",
                    format_rat(w)
                )));
            }
        }
        for dist in [0usize, 1] {
            let g = Graph::new(Species::Brane, 0, 2, Some(dist), vec![]).unwrap();
            let key = canonicalize(&g).key;
            if let Some(w) = self.weights.get(&key) {
                if *w != Rat::from_integer(1.into()) {
                    return Err(WeightError::Normalization(format!(
                        "brane normalization graph (distinguished slot {dist}) weighs {}, expected 1",
                        format_rat(w)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serializes as a JSON array of `{"graph": ..., "weight": "p/q"}`.
    pub fn to_json(&self) -> String {
        let entries: Vec<serde_json::Value> = self
            .weights
            .iter()
            .map(|(k, w)| {
                let g = CanonicalGraph {
                    key: k.clone(),
                    sign: 1,
                }
                .representative();
                serde_json::json!({
                    "graph": serde_json::from_str::<serde_json::Value>(&g.to_json()).unwrap(),
                    "weight": format_rat(w),
                })
            })
            .collect();
        serde_json::to_string_pretty(&entries).unwrap()
    }

    pub fn from_json(s: &str, max_size: Option<usize>) -> Result<WeightCollection, WeightError> {
        let entries: Vec<serde_json::Value> =
            serde_json::from_str(s).map_err(|e| WeightError::BadEntry(e.to_string()))?;
        let mut parsed: Vec<(Graph, Rat)> = Vec::with_capacity(entries.len());
        for entry in entries {
            let graph = entry
                .get("graph")
                .ok_or_else(|| WeightError::BadEntry("missing graph".into()))?;
            let weight = entry
                .get("weight")
                .and_then(|w| w.as_str())
                .ok_or_else(|| WeightError::BadEntry("missing weight".into()))?;
            let g = Graph::from_json(&graph.to_string()).map_err(WeightError::BadEntry)?;
            let w = parse_rat(weight).ok_or_else(|| WeightError::BadEntry(weight.into()))?;
            parsed.push((g, w));
        }
        let bound = max_size.unwrap_or_else(|| {
            parsed.iter().map(|(g, _)| g.vertex_count()).max().unwrap_or(2)
        });
        let mut out = WeightCollection::new(bound);
        for (g, w) in parsed {
            out.set_weight(&g, w)?;
        }
        out.validate_normalization()?;
        Ok(out)
    }
}

/// The reference collection for constant bivectors: weight `(1/2)^k` on the
/// `k`-fold wedge graph for `k <= order`, zero elsewhere.
pub fn moyal_weights(order: usize) -> Result<WeightCollection, WeightError> {
    if order < 1 {
        return Err(WeightError::InsufficientBound(0, 1));
    }
    let mut w = WeightCollection::new(order + 2);
    let mut value = Rat::from_integer(1.into());
    let half = Rat::new(1.into(), 2.into());
    for k in 1..=order {
        value = &value * &half;
        w.set_weight(&multi_wedge_graph(k), value.clone())?;
    }
    Ok(w)
}

/// The `k`-fold wedge: `k` aerial vertices, each with one edge to each of two
/// ground vertices.
pub fn multi_wedge_graph(k: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * k);
    for i in 0..k {
        edges.push((i, k));
        edges.push((i, k + 1));
    }
    Graph::new(Species::Kontsevich, k, 2, None, edges).unwrap()
}

/// A polynomial in `hbar` with polynomial coefficients: entry `k` is the
/// coefficient of `hbar^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HbarSeries {
    n: usize,
    coeffs: Vec<Poly>,
}

impl HbarSeries {
    pub fn zero(n: usize, order: usize) -> HbarSeries {
        HbarSeries {
            n,
            coeffs: vec![Poly::zero(n); order + 1],
        }
    }

    pub fn from_poly(p: Poly, order: usize) -> HbarSeries {
        let mut s = HbarSeries::zero(p.dimension(), order);
        s.coeffs[0] = p;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Poly {
        &self.coeffs[k]
    }

    pub fn add_at(&mut self, k: usize, p: &Poly) {
        if k < self.coeffs.len() {
            self.coeffs[k] = &self.coeffs[k] + p;
        }
    }

    pub fn sub(&self, other: &HbarSeries) -> HbarSeries {
        assert_eq!(self.order(), other.order());
        HbarSeries {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn render(&self, vars: &[&str]) -> String {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, p)| format!("h^{k} * ({})", p.render(vars)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A star product: the graph operators of a weight collection evaluated on a
/// fixed bivector, truncated at `hbar^order`.
pub struct StarProduct {
    n: usize,
    order: usize,
    // ops[k] lists (c_G / k!, D_G(pi,..,pi)) for the k-aerial graphs.
    ops: Vec<Vec<(Rat, crate::diffop::PolyDiffOperator)>>,
}

impl StarProduct {
    /// Builds the product for a degree-2 field. The collection must be total
    /// for graphs with up to `order + 2` vertices.
    pub fn new(
        w: &WeightCollection,
        pi: &PolyVectorField,
        order: usize,
    ) -> Result<StarProduct, WeightError> {
        if pi.degree() != 2 {
            return Err(WeightError::NotBivector(pi.degree()));
        }
        if w.max_size() < order + 2 {
            return Err(WeightError::InsufficientBound(w.max_size(), order));
        }
        let n = pi.dimension();
        let mut ops: Vec<Vec<(Rat, crate::diffop::PolyDiffOperator)>> =
            (0..=order).map(|_| Vec::new()).collect();
        for (key, weight) in w.entries() {
            let g = CanonicalGraph {
                key: key.clone(),
                sign: 1,
            }
            .representative();
            if g.species != Species::Kontsevich || g.ground != 2 {
                continue;
            }
            let k = g.aerial;
            if k == 0 || k > order {
                continue;
            }
            // Only graphs where every vertex emits exactly two edges act on
            // copies of a bivector.
            if (0..k).any(|v| g.out_degree(v) != 2) {
                continue;
            }
            let fields: Vec<PolyVectorField> = vec![pi.clone(); k];
            let op = evaluate_kontsevich_operator(&g, &fields, n)?;
            if op.is_zero() {
                continue;
            }
            // hbar^k/k! times the k!/|Aut| vertex labelings of the class.
            let aut = crate::graph::automorphism_count(&g);
            let c = weight / Rat::from_integer((aut as i64).into());
            ops[k].push((c, op));
        }
        Ok(StarProduct { n, order, ops })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `f ⋆ g` for plain polynomials.
    pub fn apply(&self, f: &Poly, g: &Poly) -> HbarSeries {
        let mut out = HbarSeries::zero(self.n, self.order);
        out.add_at(0, &(f * g));
        for k in 1..=self.order {
            for (c, op) in &self.ops[k] {
                let term = op
                    .apply(&[f.clone(), g.clone()])
                    .expect("arity-2 operator on two arguments");
                out.add_at(k, &term.scale(c));
            }
        }
        out
    }

    /// `a ⋆ b` extended bilinearly over `hbar` powers, truncated at the
    /// product's order.
    pub fn apply_series(&self, a: &HbarSeries, b: &HbarSeries) -> HbarSeries {
        let mut out = HbarSeries::zero(self.n, self.order);
        for i in 0..=a.order().min(self.order) {
            if a.coeff(i).is_zero() {
                continue;
            }
            for j in 0..=b.order().min(self.order - i) {
                if b.coeff(j).is_zero() {
                    continue;
                }
                let prod = self.apply(a.coeff(i), b.coeff(j));
                for k in 0..=self.order - i - j {
                    out.add_at(i + j + k, prod.coeff(k));
                }
            }
        }
        out
    }
}

/// `f ⋆ g` for a weight collection, bivector and truncation order.
pub fn star_product(
    w: &WeightCollection,
    pi: &PolyVectorField,
    order: usize,
    f: &Poly,
    g: &Poly,
) -> Result<HbarSeries, WeightError> {
    Ok(StarProduct::new(w, pi, order)?.apply(f, g))
}

/// `(f ⋆ g) ⋆ h - f ⋆ (g ⋆ h)` truncated at `hbar^order`. The bivector must
/// be Poisson, otherwise no associativity is expected and the call errors.
pub fn associativity_residual(
    w: &WeightCollection,
    pi: &PolyVectorField,
    order: usize,
    f: &Poly,
    g: &Poly,
    h: &Poly,
) -> Result<HbarSeries, WeightError> {
    if !schouten_bracket(pi, pi)?.is_zero() {
        return Err(WeightError::NotPoisson);
    }
    let star = StarProduct::new(w, pi, order)?;
    Ok(associativity_residual_of(&star, f, g, h))
}

/// The residual for an already-built star product (no Poisson re-check).
pub fn associativity_residual_of(star: &StarProduct, f: &Poly, g: &Poly, h: &Poly) -> HbarSeries {
    let order = star.order();
    let n = star.n;
    let fg = star.apply(f, g);
    let gh = star.apply(g, h);
    let left = star.apply_series(&fg, &HbarSeries::from_poly(h.clone(), order));
    let right = star.apply_series(&HbarSeries::from_poly(f.clone(), order), &gh);
    let _ = n;
    left.sub(&right)
}

/// The five wheel-indexed characteristic-function kinds extracted from
/// weight collections (the associator kind lives in [`crate::series`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharKind {
    Duflo,
    Curv,
    Chain,
    Brane,
}

impl CharKind {
    pub const ALL: [CharKind; 4] = [
        CharKind::Duflo,
        CharKind::Curv,
        CharKind::Chain,
        CharKind::Brane,
    ];
}

/// Reads the characteristic series of `w`:
/// duflo `(c_I - c_II)/j`, curv `c_III/j`, chain `c_chain/j`,
/// brane `(c_I + c_bar)/j`, for `2 <= j <= order`.
pub fn extract_characteristic(
    w: &WeightCollection,
    kind: CharKind,
    order: usize,
) -> Result<TruncatedSeries, WeightError> {
    assert!(order >= 2);
    let mut s = TruncatedSeries::zero_exact(order);
    for j in 2..=order {
        let jr = Rat::from_integer((j as i64).into());
        let lambda = match kind {
            CharKind::Duflo => {
                let c1 = w.weight_of(&wheel_family(WheelKind::DufloI, j).unwrap())?;
                let c2 = w.weight_of(&wheel_family(WheelKind::DufloII, j).unwrap())?;
                (c1 - c2) / jr
            }
            CharKind::Curv => {
                let c3 = w.weight_of(&wheel_family(WheelKind::CurvIII, j).unwrap())?;
                c3 / jr
            }
            CharKind::Chain => {
                let c = w.weight_of(&wheel_family(WheelKind::ChainWheel, j).unwrap())?;
                c / jr
            }
            CharKind::Brane => {
                let c1 = w.weight_of(&wheel_family(WheelKind::DufloI, j).unwrap())?;
                let cb = w.weight_of(&wheel_family(WheelKind::BraneWheel, j).unwrap())?;
                (c1 + cb) / jr
            }
        };
        s.set_exact(j, lambda);
    }
    Ok(s)
}
