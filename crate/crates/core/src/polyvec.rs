//! Polynomial polyvector fields and the Schouten-Nijenhuis bracket.
//!
//! A degree-`d` field is stored on strictly increasing direction tuples; the
//! fully antisymmetric tensor is recovered on demand. The bracket is
//! `[a, b] = a • b - (-1)^{(p-1)(q-1)} b • a` with
//! `a • b = sum_i (d a / d xi_i) (d b / d x_i)` in the odd-coordinate
//! description: directions act as odd generators, polynomial coefficients as
//! even ones. On vector fields this is the Lie bracket; a bivector `pi` is
//! Poisson exactly when `[pi, pi] = 0`.

use crate::poly::Poly;
use crate::rational::Rat;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("direction tuple {0:?} is not strictly increasing in dimension {1}")]
    BadDirections(Vec<u8>, usize),
    #[error("coefficient dimension mismatch")]
    CoeffDimension,
}

/// A polynomial polyvector field of fixed degree on `R^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<u8>, Poly>,
}

impl PolyVectorField {
    pub fn zero(n: usize, degree: usize) -> PolyVectorField {
        PolyVectorField {
            n,
            degree,
            comps: BTreeMap::new(),
        }
    }

    /// A degree-0 field is a plain polynomial.
    pub fn from_function(p: Poly) -> PolyVectorField {
        let mut f = PolyVectorField::zero(p.dimension(), 0);
        f.add_component(vec![], p).unwrap();
        f
    }

    /// Adds `p` on the strictly increasing direction tuple `dirs` (0-based).
    pub fn add_component(&mut self, dirs: Vec<u8>, p: Poly) -> Result<(), FieldError> {
        if dirs.len() != self.degree
            || dirs.windows(2).any(|w| w[0] >= w[1])
            || dirs.iter().any(|&d| d as usize >= self.n)
        {
            return Err(FieldError::BadDirections(dirs, self.n));
        }
        if p.dimension() != self.n {
            return Err(FieldError::CoeffDimension);
        }
        if p.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.comps.entry(dirs) {
            Entry::Vacant(slot) => {
                slot.insert(p);
            }
            Entry::Occupied(mut slot) => {
                let sum = &*slot.get() + &p;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<u8>, &Poly)> {
        self.comps.iter()
    }

    /// The antisymmetric tensor component for an arbitrary tuple of distinct
    /// directions: the stored coefficient times the sorting sign. Zero on
    /// repeated directions.
    pub fn component_full(&self, dirs: &[u8]) -> Poly {
        let mut sorted: Vec<u8> = dirs.to_vec();
        let sign = sort_sign(&mut sorted);
        if sign == 0 {
            return Poly::zero(self.n);
        }
        match self.comps.get(&sorted) {
            None => Poly::zero(self.n),
            Some(p) => {
                if sign > 0 {
                    p.clone()
                } else {
                    -p
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> PolyVectorField {
        if c.is_zero() {
            return PolyVectorField::zero(self.n, self.degree);
        }
        PolyVectorField {
            n: self.n,
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .map(|(d, p)| (d.clone(), p.scale(c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &PolyVectorField) -> Result<PolyVectorField, FieldError> {
        if self.n != other.n {
            return Err(FieldError::DimensionMismatch(self.n, other.n));
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in field sum");
        let mut out = self.clone();
        for (d, p) in &other.comps {
            out.add_component(d.clone(), p.clone())?;
        }
        Ok(out)
    }

    /// Derivative of the odd coordinate `xi_i` from the left: removes `i`
    /// from every tuple containing it, with the position sign.
    fn xi_derivative(&self, i: u8) -> PolyVectorField {
        let mut out = PolyVectorField::zero(self.n, self.degree.saturating_sub(1));
        for (dirs, p) in &self.comps {
            if let Some(pos) = dirs.iter().position(|&d| d == i) {
                let mut rest = dirs.clone();
                rest.remove(pos);
                let c = if pos % 2 == 0 { p.clone() } else { -p };
                out.add_component(rest, c).unwrap();
            }
        }
        out
    }

    fn x_derivative(&self, i: usize) -> PolyVectorField {
        let mut out = PolyVectorField::zero(self.n, self.degree);
        for (dirs, p) in &self.comps {
            out.add_component(dirs.clone(), p.diff(i)).unwrap();
        }
        out
    }

    /// Wedge product (odd-coordinate multiplication).
    pub fn wedge(&self, other: &PolyVectorField) -> Result<PolyVectorField, FieldError> {
        if self.n != other.n {
            return Err(FieldError::DimensionMismatch(self.n, other.n));
        }
        let mut out = PolyVectorField::zero(self.n, self.degree + other.degree);
        for (da, pa) in &self.comps {
            for (db, pb) in &other.comps {
                let mut dirs: Vec<u8> = da.iter().chain(db.iter()).cloned().collect();
                let sign = sort_sign(&mut dirs);
                if sign == 0 {
                    continue;
                }
                let prod = pa * pb;
                out.add_component(dirs, if sign > 0 { prod } else { -&prod })?;
            }
        }
        Ok(out)
    }
}

/// Sorts, returning +1/-1 for the permutation parity or 0 on duplicates.
pub(crate) fn sort_sign(dirs: &mut Vec<u8>) -> i8 {
    let mut sign = 1i8;
    // Insertion sort; tuples are tiny.
    for i in 1..dirs.len() {
        let mut j = i;
        while j > 0 && dirs[j - 1] > dirs[j] {
            dirs.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if dirs.windows(2).any(|w| w[0] == w[1]) {
        return 0;
    }
    sign
}

/// Left interior product `a • b = sum_i (d a/d xi_i)(d b/d x_i)`.
fn dot(a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
    let mut out = PolyVectorField::zero(a.n, a.degree + b.degree - 1);
    for i in 0..a.n as u8 {
        let da = a.xi_derivative(i);
        if da.is_zero() {
            continue;
        }
        let db = b.x_derivative(i as usize);
        if db.is_zero() {
            continue;
        }
        out = out.add(&da.wedge(&db).unwrap()).unwrap();
    }
    out
}

/// The Schouten-Nijenhuis bracket, as the odd Poisson bracket
/// `[a, b] = (-1)^{p-1} (d_r a/d xi_i)(d b/d x_i) - (d a/d x_i)(d_l b/d xi_i)`
/// written through left derivatives:
/// `[a, b] = (-1)^{p-1} a • b - (-1)^{p(q-1)} b • a`.
///
/// Degree of the result is `deg a + deg b - 1`; on vector fields it is the
/// Lie bracket, the shifted symmetry is `[a, b] = -(-1)^{(p-1)(q-1)} [b, a]`,
/// and the graded Jacobi identity holds for the shifted degrees.
pub fn schouten_bracket(
    a: &PolyVectorField,
    b: &PolyVectorField,
) -> Result<PolyVectorField, FieldError> {
    if a.n != b.n {
        return Err(FieldError::DimensionMismatch(a.n, b.n));
    }
    if a.degree + b.degree == 0 {
        // Two functions bracket to zero; avoids the degree-(-1) corner.
        return Ok(PolyVectorField::zero(a.n, 0));
    }
    let (p, q) = (a.degree, b.degree);
    let ab = dot(a, b);
    let ba = dot(b, a);
    let one = Rat::from_integer(1.into());
    let sign_ab = if (p + 1) % 2 == 0 { one.clone() } else { -one.clone() };
    let sign_ba = if (p * (q + 1)) % 2 == 0 { -one.clone() } else { one };
    ab.scale(&sign_ab).add(&ba.scale(&sign_ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn vf(n: usize, dir: u8, p: Poly) -> PolyVectorField {
        let mut f = PolyVectorField::zero(n, 1);
        f.add_component(vec![dir], p).unwrap();
        f
    }

    #[test]
    fn lie_bracket_of_vector_fields() {
        // [x1 d2, d1] = -d2
        let a = vf(2, 1, Poly::var(2, 0));
        let b = vf(2, 0, Poly::one(2));
        let c = schouten_bracket(&a, &b).unwrap();
        let expected = vf(2, 1, Poly::one(2)).scale(&rat(-1, 1));
        assert_eq!(c, expected);
    }

    #[test]
    fn constant_bivector_is_central_among_constants() {
        // [d1 ^ d2, constant-coefficient field] = 0
        let mut pi = PolyVectorField::zero(3, 2);
        pi.add_component(vec![0, 1], Poly::one(3)).unwrap();
        let mut b = PolyVectorField::zero(3, 2);
        b.add_component(vec![1, 2], Poly::constant(3, rat(5, 2))).unwrap();
        assert!(schouten_bracket(&pi, &b).unwrap().is_zero());
    }

    #[test]
    fn linear_bivector_in_two_variables_is_poisson() {
        // pi = x1 d1 ^ d2
        let mut pi = PolyVectorField::zero(2, 2);
        pi.add_component(vec![0, 1], Poly::var(2, 0)).unwrap();
        assert!(schouten_bracket(&pi, &pi).unwrap().is_zero());
    }

    #[test]
    fn component_full_antisymmetry() {
        let mut pi = PolyVectorField::zero(2, 2);
        pi.add_component(vec![0, 1], Poly::one(2)).unwrap();
        assert_eq!(pi.component_full(&[1, 0]), Poly::constant(2, rint(-1)));
        assert!(pi.component_full(&[0, 0]).is_zero());
    }

    #[test]
    fn shifted_graded_symmetry() {
        // p = 1, q = 2: [a,b] = -(-1)^{0*1}[b,a] = -[b,a]
        let a = vf(2, 0, Poly::var(2, 1));
        let mut b = PolyVectorField::zero(2, 2);
        b.add_component(vec![0, 1], Poly::var(2, 0)).unwrap();
        let ab = schouten_bracket(&a, &b).unwrap();
        let ba = schouten_bracket(&b, &a).unwrap();
        assert_eq!(ab, ba.scale(&rat(-1, 1)));
    }
}
