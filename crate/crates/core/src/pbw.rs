//! Star products on symmetric algebras of Lie algebras: the symmetrization
//! isomorphism onto the enveloping algebra, the pulled-back associative
//! product, cyclic trace operators, and the exponential correction that makes
//! symmetrization multiplicative on invariants.

use crate::poly::Poly;
use crate::rational::{factorial, Rat};
use crate::series::bernoulli;
use itertools::Itertools;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("structure constants are not antisymmetric at ({0},{1})")]
    NotAntisymmetric(usize, usize),
    #[error("Jacobi identity fails at ({0},{1},{2})")]
    JacobiFails(usize, usize, usize),
    #[error("polynomial is not invariant under the coadjoint action of generator {0}")]
    NotInvariant(usize),
    #[error("dimension mismatch")]
    Dimension,
}

/// A finite-dimensional Lie algebra given by structure constants
/// `[e_a, e_b] = sum_c f[a][b][c] e_c`, validated on construction.
///
/// Carries an internally synchronized straightening cache; results are
/// independent of call order.
#[derive(Debug, Default)]
pub struct LieAlgebra {
    dim: usize,
    f: Vec<Rat>, // f[(a*dim + b)*dim + c]
    straighten_cache: std::sync::Mutex<std::collections::HashMap<Vec<u8>, UeaElement>>,
}

impl Clone for LieAlgebra {
    fn clone(&self) -> LieAlgebra {
        LieAlgebra {
            dim: self.dim,
            f: self.f.clone(),
            straighten_cache: Default::default(),
        }
    }
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &LieAlgebra) -> bool {
        self.dim == other.dim && self.f == other.f
    }
}

impl Eq for LieAlgebra {}

impl LieAlgebra {
    pub fn new(dim: usize, brackets: &[(usize, usize, Vec<Rat>)]) -> Result<LieAlgebra, LieError> {
        let mut f = vec![Rat::zero(); dim * dim * dim];
        for (a, b, coeffs) in brackets {
            if *a >= dim || *b >= dim || coeffs.len() != dim {
                return Err(LieError::Dimension);
            }
            for (c, v) in coeffs.iter().enumerate() {
                f[(a * dim + b) * dim + c] = v.clone();
                f[(b * dim + a) * dim + c] = -v.clone();
            }
        }
        let alg = LieAlgebra {
            dim,
            f,
            straighten_cache: Default::default(),
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<(), LieError> {
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if self.sc(a, b, c) != -self.sc(b, a, c) {
                        return Err(LieError::NotAntisymmetric(a, b));
                    }
                }
            }
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for x in 0..d {
                        let mut acc = Rat::zero();
                        for e in 0..d {
                            acc += self.sc(a, b, e) * self.sc(e, c, x)
                                + self.sc(b, c, e) * self.sc(e, a, x)
                                + self.sc(c, a, e) * self.sc(e, b, x);
                        }
                        if !acc.is_zero() {
                            return Err(LieError::JacobiFails(a, b, c));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Structure constant `f^{ab}_c`.
    pub fn sc(&self, a: usize, b: usize, c: usize) -> Rat {
        self.f[(a * self.dim + b) * self.dim + c].clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The matrix of `ad e_a` acting on the basis: `(ad_a)_{c,b} = f^{ab}_c`.
    fn ad_matrix(&self, a: usize) -> Vec<Vec<Rat>> {
        let d = self.dim;
        (0..d)
            .map(|c| (0..d).map(|b| self.sc(a, b, c)).collect())
            .collect()
    }

    // Built-in test algebras.

    pub fn abelian(dim: usize) -> LieAlgebra {
        LieAlgebra::new(dim, &[]).unwrap()
    }

    /// Heisenberg: [x, y] = z.
    pub fn heisenberg() -> LieAlgebra {
        let one = Rat::from_integer(1.into());
        LieAlgebra::new(
            3,
            &[(0, 1, vec![Rat::zero(), Rat::zero(), one])],
        )
        .unwrap()
    }

    /// sl2 with basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
    pub fn sl2() -> LieAlgebra {
        let r = |v: i64| Rat::from_integer(v.into());
        LieAlgebra::new(
            3,
            &[
                (0, 1, vec![r(0), r(2), r(0)]),
                (0, 2, vec![r(0), r(0), r(-2)]),
                (1, 2, vec![r(1), r(0), r(0)]),
            ],
        )
        .unwrap()
    }

    /// so3: [e1,e2] = e3 and cyclic.
    pub fn so3() -> LieAlgebra {
        let r = |v: i64| Rat::from_integer(v.into());
        LieAlgebra::new(
            3,
            &[
                (0, 1, vec![r(0), r(0), r(1)]),
                (1, 2, vec![r(1), r(0), r(0)]),
                (2, 0, vec![r(0), r(1), r(0)]),
            ],
        )
        .unwrap()
    }

    /// The 2-dimensional non-unimodular algebra [x, y] = y.
    pub fn nonunimodular2() -> LieAlgebra {
        let r = |v: i64| Rat::from_integer(v.into());
        LieAlgebra::new(2, &[(0, 1, vec![r(0), r(1)])]).unwrap()
    }

    /// Loads from the JSON schema
    /// `{"dim": d, "brackets": [[a, b, [coeff per c]], ...]}` with 1-based
    /// generator indices.
    pub fn from_json(s: &str) -> Result<LieAlgebra, String> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        let dim = v
            .get("dim")
            .and_then(|d| d.as_u64())
            .ok_or("missing dim")? as usize;
        let mut brackets = Vec::new();
        for entry in v
            .get("brackets")
            .and_then(|b| b.as_array())
            .ok_or("missing brackets")?
        {
            let row = entry.as_array().ok_or("bad bracket entry")?;
            if row.len() != 3 {
                return Err("bracket entries are [a, b, coeffs]".into());
            }
            let a = row[0].as_u64().ok_or("bad index")? as usize;
            let b = row[1].as_u64().ok_or("bad index")? as usize;
            if a == 0 || b == 0 || a > dim || b > dim {
                return Err("generator indices are 1-based".into());
            }
            let coeffs: Result<Vec<Rat>, String> = row[2]
                .as_array()
                .ok_or("bad coefficient list")?
                .iter()
                .map(|c| {
                    c.as_str()
                        .and_then(crate::rational::parse_rat)
                        .or_else(|| c.as_i64().map(|i| Rat::from_integer(i.into())))
                        .ok_or_else(|| "bad coefficient".to_string())
                })
                .collect();
            brackets.push((a - 1, b - 1, coeffs?));
        }
        LieAlgebra::new(dim, &brackets).map_err(|e| e.to_string())
    }
}

/// An element of the enveloping algebra in the ordered monomial basis
/// `e_1^{a_1} ... e_d^{a_d}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UeaElement {
    dim: usize,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl UeaElement {
    pub fn zero(dim: usize) -> UeaElement {
        UeaElement {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rat)> {
        self.terms.iter()
    }

    fn add_term(&mut self, exps: Vec<u16>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
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

    pub fn add(&self, other: &UeaElement) -> UeaElement {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &UeaElement) -> UeaElement {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> UeaElement {
        if c.is_zero() {
            return UeaElement::zero(self.dim);
        }
        UeaElement {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Product in the enveloping algebra: straighten the concatenation of
    /// ordered generator words.
    pub fn mul(&self, other: &UeaElement, alg: &LieAlgebra) -> UeaElement {
        let mut out = UeaElement::zero(self.dim);
        for (ea, ca) in &self.terms {
            let wa = exps_to_word(ea);
            for (eb, cb) in &other.terms {
                let mut word = wa.clone();
                word.extend(exps_to_word(eb));
                let straightened = straighten(&word, alg);
                for (e, c) in &straightened.terms {
                    out.add_term(e.clone(), c * &(ca * cb));
                }
            }
        }
        out
    }

    /// The top-filtration symbol: the terms of maximal total degree, as a
    /// polynomial.
    fn top_symbol(&self) -> Poly {
        let top = self
            .terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum::<usize>())
            .max()
            .unwrap_or(0);
        let mut p = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e.iter().map(|&x| x as usize).sum::<usize>() == top {
                p.add_term(e.clone(), c.clone());
            }
        }
        p
    }

    pub fn render(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut s = crate::rational::format_rat(c);
                for (i, &m) in e.iter().enumerate() {
                    if m == 0 {
                        continue;
                    }
                    s.push('*');
                    s.push_str(names.get(i).copied().unwrap_or("?"));
                    if m > 1 {
                        s.push_str(&format!("^{m}"));
                    }
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn exps_to_word(exps: &[u16]) -> Vec<u8> {
    let mut word = Vec::new();
    for (g, &m) in exps.iter().enumerate() {
        for _ in 0..m {
            word.push(g as u8);
        }
    }
    word
}

/// Rewrites an arbitrary generator word in the ordered basis by moving
/// descents with `e_a e_b = e_b e_a + [e_a, e_b]`, memoized per algebra.
fn straighten(word: &[u8], alg: &LieAlgebra) -> UeaElement {
    let d = alg.dim();
    // Fast path: already ordered.
    let descent = match word.windows(2).position(|w| w[0] > w[1]) {
        None => {
            let mut exps = vec![0u16; d];
            for &g in word {
                exps[g as usize] += 1;
            }
            let mut out = UeaElement::zero(d);
            out.add_term(exps, Rat::from_integer(1.into()));
            return out;
        }
        Some(i) => i,
    };
    if let Some(hit) = alg.straighten_cache.lock().unwrap().get(word) {
        return hit.clone();
    }
    let i = descent;
    let (a, b) = (word[i] as usize, word[i + 1] as usize);
    let mut swapped = word.to_vec();
    swapped.swap(i, i + 1);
    let mut out = straighten(&swapped, alg);
    // Bracket terms.
    for c in 0..d {
        let coeff = alg.sc(a, b, c);
        if coeff.is_zero() {
            continue;
        }
        let mut shorter: Vec<u8> = Vec::with_capacity(word.len() - 1);
        shorter.extend_from_slice(&word[..i]);
        shorter.push(c as u8);
        shorter.extend_from_slice(&word[i + 2..]);
        let sub = straighten(&shorter, alg);
        out = out.add(&sub.scale(&coeff));
    }
    alg.straighten_cache
        .lock()
        .unwrap()
        .insert(word.to_vec(), out.clone());
    out
}

/// The symmetrization map: `x_{i_1} .. x_{i_k}` goes to the average of all
/// `k!` orderings of `e_{i_1} .. e_{i_k}`, straightened.
pub fn pbw_symmetrize(alg: &LieAlgebra, p: &Poly) -> UeaElement {
    assert_eq!(p.dimension(), alg.dim());
    let mut out = UeaElement::zero(alg.dim());
    for (exps, coeff) in p.terms() {
        let word = exps_to_word(exps);
        let k = word.len();
        let norm = coeff / Rat::from_integer(factorial(k));
        for perm in word.iter().copied().permutations(k) {
            let s = straighten(&perm, alg);
            out = out.add(&s.scale(&norm));
        }
    }
    out
}

/// The inverse of symmetrization, by downward induction on the filtration.
pub fn pbw_symmetrize_inv(alg: &LieAlgebra, u: &UeaElement) -> Poly {
    let mut rest = u.clone();
    let mut out = Poly::zero(alg.dim());
    while !rest.is_zero() {
        let top = rest.top_symbol();
        out = &out + &top;
        rest = rest.sub(&pbw_symmetrize(alg, &top));
    }
    out
}

/// The pulled-back product on the symmetric algebra.
pub fn star_pbw(alg: &LieAlgebra, p: &Poly, q: &Poly) -> Poly {
    let up = pbw_symmetrize(alg, p);
    let uq = pbw_symmetrize(alg, q);
    pbw_symmetrize_inv(alg, &up.mul(&uq, alg))
}

/// A constant-coefficient differential operator on the symmetric algebra.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConstCoeffOperator {
    dim: usize,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl ConstCoeffOperator {
    pub fn zero(dim: usize) -> ConstCoeffOperator {
        ConstCoeffOperator {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, multi: Vec<u16>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(multi) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rat)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rat) -> ConstCoeffOperator {
        if c.is_zero() {
            return ConstCoeffOperator::zero(self.dim);
        }
        ConstCoeffOperator {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &ConstCoeffOperator) -> ConstCoeffOperator {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (multi, c) in &self.terms {
            out = &out + &p.diff_multi(multi).scale(c);
        }
        out
    }
}

/// The cyclic trace operator
/// `tr(ad^j) = sum tr(ad_{e_{k_1}} ... ad_{e_{k_j}}) d_{k_1} ... d_{k_j}`.
pub fn trace_power_operator(alg: &LieAlgebra, j: usize) -> ConstCoeffOperator {
    assert!(j >= 2);
    let d = alg.dim();
    let ads: Vec<Vec<Vec<Rat>>> = (0..d).map(|a| alg.ad_matrix(a)).collect();
    let mut out = ConstCoeffOperator::zero(d);
    let mut ks = vec![0usize; j];
    loop {
        // tr(ad_{k_1} ad_{k_2} ... ad_{k_j})
        let mut prod = ads[ks[0]].clone();
        for &k in &ks[1..] {
            prod = mat_mul(&prod, &ads[k]);
        }
        let mut tr = Rat::zero();
        for i in 0..d {
            tr += prod[i][i].clone();
        }
        if !tr.is_zero() {
            let mut multi = vec![0u16; d];
            for &k in &ks {
                multi[k] += 1;
            }
            out.add_term(multi, tr);
        }

        let mut carry = 0;
        loop {
            if carry == j {
                return out;
            }
            ks[carry] += 1;
            if ks[carry] < d {
                break;
            }
            ks[carry] = 0;
            carry += 1;
        }
    }
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let mut out = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Rat::zero();
            for k in 0..n {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    continue;
                }
                acc += &a[i][k] * &b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Which reading of the correction coefficients to use; the plain reading is
/// the default, the per-order one divides each coefficient by its order and
/// is kept for comparison runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoeffNormalization {
    #[default]
    Plain,
    PerOrder,
}

/// The standard correction coefficients `c_{2k} = B_{2k} / (4k (2k)!)` for
/// even orders up to `maxdeg` (odd orders vanish).
pub fn duflo_coefficients(maxdeg: usize, norm: CoeffNormalization) -> Vec<(usize, Rat)> {
    let mut out = Vec::new();
    let mut k = 1;
    while 2 * k <= maxdeg {
        let j = 2 * k;
        let mut c = bernoulli(j)
            / (Rat::from_integer((2 * j as i64).into()) * Rat::from_integer(factorial(j)));
        if norm == CoeffNormalization::PerOrder {
            c /= Rat::from_integer((j as i64).into());
        }
        out.push((j, c));
        k += 1;
    }
    out
}

/// The operator `exp(sum_j c_j tr(ad^j))`, exact on polynomials of bounded
/// degree (each trace operator lowers the degree by at least two).
pub struct CorrectionOperator {
    generator: ConstCoeffOperator,
}

impl CorrectionOperator {
    pub fn new(alg: &LieAlgebra, coeffs: &[(usize, Rat)]) -> CorrectionOperator {
        let mut generator = ConstCoeffOperator::zero(alg.dim());
        for (j, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            generator = generator.add(&trace_power_operator(alg, *j).scale(c));
        }
        CorrectionOperator { generator }
    }

    pub fn identity(dim: usize) -> CorrectionOperator {
        CorrectionOperator {
            generator: ConstCoeffOperator::zero(dim),
        }
    }

    /// Applies the exponential: the generator is nilpotent on polynomials.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = p.clone();
        let mut term = p.clone();
        let mut m = 1i64;
        loop {
            term = self.generator.apply(&term);
            if term.is_zero() {
                return out;
            }
            let inv = Rat::new(1.into(), factorial(m as usize));
            out = &out + &term.scale(&inv);
            m += 1;
        }
    }
}

/// Coadjoint invariance check: for each generator `a`, the derivation
/// `sum_{b,c} f^{ab}_c x_c d/dx_b` must kill `p`.
pub fn check_invariant(alg: &LieAlgebra, p: &Poly) -> Result<(), LieError> {
    let d = alg.dim();
    for a in 0..d {
        let mut acc = Poly::zero(d);
        for b in 0..d {
            let dp = p.diff(b);
            if dp.is_zero() {
                continue;
            }
            for c in 0..d {
                let coeff = alg.sc(a, b, c);
                if coeff.is_zero() {
                    continue;
                }
                acc = &acc + &(&Poly::var(d, c).scale(&coeff) * &dp);
            }
        }
        if !acc.is_zero() {
            return Err(LieError::NotInvariant(a));
        }
    }
    Ok(())
}

/// The multiplicativity residual
/// `phi(Psi p) phi(Psi q) - phi(Psi (p q))` in the enveloping algebra, for
/// invariant `p`, `q`.
pub fn duflo_multiplicativity_residual(
    alg: &LieAlgebra,
    p: &Poly,
    q: &Poly,
    coeffs: &[(usize, Rat)],
) -> Result<UeaElement, LieError> {
    check_invariant(alg, p)?;
    check_invariant(alg, q)?;
    let psi = CorrectionOperator::new(alg, coeffs);
    let up = pbw_symmetrize(alg, &psi.apply(p));
    let uq = pbw_symmetrize(alg, &psi.apply(q));
    let upq = pbw_symmetrize(alg, &psi.apply(&(p * q)));
    Ok(up.mul(&uq, alg).sub(&upq))
}

/// The quadratic Casimir `h^2/2 + 2ef` of [`LieAlgebra::sl2`].
pub fn sl2_casimir() -> Poly {
    let h = Poly::var(3, 0);
    let e = Poly::var(3, 1);
    let f = Poly::var(3, 2);
    let mut p = (&h * &h).scale(&Rat::new(1.into(), 2.into()));
    p = &p + &(&e * &f).scale(&Rat::from_integer(2.into()));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    #[test]
    fn algebra_validation() {
        assert!(LieAlgebra::sl2().dim() == 3);
        // Breaking Jacobi: [x,y] = x, [y,z] = y, [x,z] = 0 fails.
        let r = |v: i64| Rat::from_integer(v.into());
        let bad = LieAlgebra::new(
            3,
            &[
                (0, 1, vec![r(1), r(0), r(0)]),
                (1, 2, vec![r(0), r(1), r(0)]),
            ],
        );
        assert!(matches!(bad, Err(LieError::JacobiFails(_, _, _))));
    }

    #[test]
    fn abelian_symmetrization_is_identity_on_monomials() {
        let alg = LieAlgebra::abelian(3);
        let p = {
            let x = Poly::var(3, 0);
            let y = Poly::var(3, 1);
            &(&x * &x) * &y
        };
        let u = pbw_symmetrize(&alg, &p);
        assert_eq!(pbw_symmetrize_inv(&alg, &u), p);
        let q = Poly::var(3, 2);
        assert_eq!(star_pbw(&alg, &p, &q), &p * &q);
    }

    #[test]
    fn heisenberg_straightening() {
        // phi(xy) = XY - Z/2 in the ordered basis... rather: symmetrizing xy
        // gives (XY + YX)/2 = XY - Z/2.
        let alg = LieAlgebra::heisenberg();
        let xy = &Poly::var(3, 0) * &Poly::var(3, 1);
        let u = pbw_symmetrize(&alg, &xy);
        let mut expected = UeaElement::zero(3);
        expected.add_term(vec![1, 1, 0], rint(1));
        expected.add_term(vec![0, 0, 1], rat(-1, 2));
        assert_eq!(u, expected);
    }

    #[test]
    fn heisenberg_star() {
        // x * y = xy + z/2
        let alg = LieAlgebra::heisenberg();
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let z = Poly::var(3, 2);
        let s = star_pbw(&alg, &x, &y);
        assert_eq!(s, &(&x * &y) + &z.scale(&rat(1, 2)));
    }

    #[test]
    fn sl2_star() {
        // h * e = he + e
        let alg = LieAlgebra::sl2();
        let h = Poly::var(3, 0);
        let e = Poly::var(3, 1);
        let s = star_pbw(&alg, &h, &e);
        assert_eq!(s, &(&h * &e) + &e);
    }

    #[test]
    fn generator_commutators_recover_brackets() {
        for alg in [
            LieAlgebra::heisenberg(),
            LieAlgebra::sl2(),
            LieAlgebra::so3(),
            LieAlgebra::nonunimodular2(),
        ] {
            let d = alg.dim();
            for a in 0..d {
                for b in 0..d {
                    let xa = Poly::var(d, a);
                    let xb = Poly::var(d, b);
                    let comm = &star_pbw(&alg, &xa, &xb) - &star_pbw(&alg, &xb, &xa);
                    let mut expected = Poly::zero(d);
                    for c in 0..d {
                        expected = &expected + &Poly::var(d, c).scale(&alg.sc(a, b, c));
                    }
                    assert_eq!(comm, expected);
                }
            }
        }
    }

    #[test]
    fn star_pbw_associativity_degree_three() {
        // Fixed pseudo-random cubic polynomials over sl2 and heisenberg.
        for alg in [LieAlgebra::sl2(), LieAlgebra::heisenberg()] {
            let d = alg.dim();
            let mut seeds = 7i64;
            let mut rand_poly = || {
                let mut p = Poly::zero(d);
                for _ in 0..4 {
                    seeds = seeds.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let e0 = ((seeds >> 33) & 1) as u16;
                    let e1 = ((seeds >> 35) & 1) as u16;
                    let e2 = ((seeds >> 37) & 1) as u16;
                    let c = ((seeds >> 40) % 5) + 1;
                    let mut exps = vec![e0, e1, e2];
                    exps.truncate(d);
                    while exps.len() < d {
                        exps.push(0);
                    }
                    p.add_term(exps, rint(c));
                }
                p
            };
            for _ in 0..3 {
                let p = rand_poly();
                let q = rand_poly();
                let r = rand_poly();
                let left = star_pbw(&alg, &star_pbw(&alg, &p, &q), &r);
                let right = star_pbw(&alg, &p, &star_pbw(&alg, &q, &r));
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn symmetrize_round_trips() {
        let alg = LieAlgebra::sl2();
        // All monomials of degree <= 5 in three generators.
        for total in 0..=5u16 {
            for a in 0..=total {
                for b in 0..=total - a {
                    let c = total - a - b;
                    let mut p = Poly::zero(3);
                    p.add_term(vec![a, b, c], rint(1));
                    let u = pbw_symmetrize(&alg, &p);
                    assert_eq!(pbw_symmetrize_inv(&alg, &u), p);
                }
            }
        }
    }

    #[test]
    fn first_order_term_is_half_the_linear_bracket() {
        // star_pbw(p, q) - p q has top part (1/2){p, q} under the linear
        // bracket sum f^{ab}_c x_c d_a p d_b q.
        for alg in [LieAlgebra::sl2(), LieAlgebra::heisenberg()] {
            let d = alg.dim();
            let p = {
                let mut p = Poly::zero(d);
                p.add_term(vec![2, 1, 0][..d.min(3)].to_vec(), rint(3));
                p
            };
            let q = {
                let mut q = Poly::zero(d);
                q.add_term(vec![0, 1, 1][..d.min(3)].to_vec(), rint(2));
                q
            };
            let deviation = &star_pbw(&alg, &p, &q) - &(&p * &q);
            let top_degree = p.total_degree() + q.total_degree() - 1;
            let top = deviation.homogeneous_part(top_degree);
            let mut kk = Poly::zero(d);
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let f = alg.sc(a, b, c);
                        if f.is_zero() {
                            continue;
                        }
                        let term = &(&Poly::var(d, c) * &p.diff(a)) * &q.diff(b);
                        kk = &kk + &term.scale(&f);
                    }
                }
            }
            assert_eq!(top, kk.scale(&rat(1, 2)));
        }
    }

    #[test]
    fn sl2_killing_contraction() {
        let op = trace_power_operator(&LieAlgebra::sl2(), 2);
        // 8 d_h^2 + 8 d_e d_f
        let mut expected = ConstCoeffOperator::zero(3);
        expected.add_term(vec![2, 0, 0], rint(8));
        expected.add_term(vec![0, 1, 1], rint(8));
        assert_eq!(op, expected);
    }

    #[test]
    fn nilpotent_and_abelian_traces_vanish() {
        for j in 2..=4 {
            assert!(trace_power_operator(&LieAlgebra::heisenberg(), j).is_zero());
            assert!(trace_power_operator(&LieAlgebra::abelian(3), j).is_zero());
        }
    }

    #[test]
    fn odd_traces_vanish_for_sl2_and_so3() {
        for alg in [LieAlgebra::sl2(), LieAlgebra::so3()] {
            for j in [3, 5] {
                assert!(trace_power_operator(&alg, j).is_zero());
            }
        }
    }

    #[test]
    fn correction_operator_inverts() {
        let alg = LieAlgebra::sl2();
        let coeffs = duflo_coefficients(4, CoeffNormalization::Plain);
        let neg: Vec<(usize, Rat)> = coeffs.iter().map(|(j, c)| (*j, -c.clone())).collect();
        let psi = CorrectionOperator::new(&alg, &coeffs);
        let psi_inv = CorrectionOperator::new(&alg, &neg);
        let p = {
            let c = sl2_casimir();
            &c * &c
        };
        assert_eq!(psi_inv.apply(&psi.apply(&p)), p);
    }

    #[test]
    fn casimir_correction_constant() {
        // (1/48)(8*1 + 8*2) = 1/2 added to the Casimir.
        let alg = LieAlgebra::sl2();
        let coeffs = duflo_coefficients(2, CoeffNormalization::Plain);
        assert_eq!(coeffs, vec![(2, rat(1, 48))]);
        let psi = CorrectionOperator::new(&alg, &coeffs);
        let corrected = psi.apply(&sl2_casimir());
        let expected = &sl2_casimir() + &Poly::constant(3, rat(1, 2));
        assert_eq!(corrected, expected);
    }

    #[test]
    fn casimir_invariance() {
        assert!(check_invariant(&LieAlgebra::sl2(), &sl2_casimir()).is_ok());
        let h = Poly::var(3, 0);
        assert!(matches!(
            check_invariant(&LieAlgebra::sl2(), &h),
            Err(LieError::NotInvariant(_))
        ));
    }

    #[test]
    fn duflo_multiplicativity_on_sl2_casimir() {
        let alg = LieAlgebra::sl2();
        let cas = sl2_casimir();
        let coeffs = duflo_coefficients(4, CoeffNormalization::Plain);
        let corrected = duflo_multiplicativity_residual(&alg, &cas, &cas, &coeffs).unwrap();
        assert!(
            corrected.is_zero(),
            "corrected residual: {}",
            corrected.render(&["H", "E", "F"])
        );
        // Plain symmetrization fails on the same input.
        let plain = duflo_multiplicativity_residual(&alg, &cas, &cas, &[]).unwrap();
        assert!(!plain.is_zero());
    }

    #[test]
    fn abelian_and_heisenberg_residuals_vanish() {
        let abelian = LieAlgebra::abelian(2);
        let p = {
            let x = Poly::var(2, 0);
            let y = Poly::var(2, 1);
            &(&x * &x) + &(&x * &y)
        };
        for coeffs in [Vec::new(), duflo_coefficients(4, CoeffNormalization::Plain)] {
            assert!(duflo_multiplicativity_residual(&abelian, &p, &p, &coeffs)
                .unwrap()
                .is_zero());
        }
        // Heisenberg invariants are polynomials in the center.
        let heis = LieAlgebra::heisenberg();
        let z = Poly::var(3, 2);
        let z2 = &z * &z;
        for coeffs in [Vec::new(), duflo_coefficients(4, CoeffNormalization::Plain)] {
            assert!(duflo_multiplicativity_residual(&heis, &z2, &z, &coeffs)
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn json_parse() {
        let alg = LieAlgebra::from_json(
            r#"{"dim": 3, "brackets": [[1, 2, ["0", "0", "1"]]]}"#,
        )
        .unwrap();
        assert_eq!(alg, LieAlgebra::heisenberg());
        assert!(LieAlgebra::from_json(r#"{"dim": 2, "brackets": [[0, 1, ["1", "0"]]]}"#).is_err());
    }
}
