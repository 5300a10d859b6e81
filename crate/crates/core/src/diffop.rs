//! Polydifferential operators, the Gerstenhaber bracket, the Hochschild
//! differential, and the antisymmetrization map from polyvector fields.
//!
//! An arity-`m` operator is a sum of terms `c(x) * d^{D_1} ⊗ ... ⊗ d^{D_m}`:
//! each slot carries a differentiation multi-index, the coefficient is a
//! polynomial. Operators compare exactly as symbolic term maps.
//!
//! Sign conventions (see CONVENTIONS.md): the circle product is
//! `A ∘ B = sum_i (-1)^{i (q-1)} A ∘_i B` over 0-based insertion slots, the
//! bracket `[A, B] = A ∘ B - (-1)^{(p-1)(q-1)} B ∘ A`, and the Hochschild
//! differential is the explicit alternating sum with
//! `d_H A = (-1)^{p-1} [mu, A]` for `mu` the multiplication.

use crate::poly::Poly;
use crate::polyvec::PolyVectorField;
use crate::rational::{factorial, Rat};
use itertools::Itertools;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("arity mismatch: expected {0}, got {1}")]
    ArityMismatch(usize, usize),
}

/// A polynomial-coefficient multidifferential operator of fixed arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOperator {
    n: usize,
    arity: usize,
    terms: BTreeMap<Vec<Vec<u16>>, Poly>,
}

impl PolyDiffOperator {
    pub fn zero(n: usize, arity: usize) -> PolyDiffOperator {
        PolyDiffOperator {
            n,
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// The arity-2 multiplication operator `(f, g) -> fg`.
    pub fn multiplication(n: usize) -> PolyDiffOperator {
        let mut op = PolyDiffOperator::zero(n, 2);
        op.add_term(vec![vec![0; n], vec![0; n]], Poly::one(n));
        op
    }

    /// Multiplication by a fixed polynomial, as an arity-0 operator.
    pub fn constant(p: Poly) -> PolyDiffOperator {
        let mut op = PolyDiffOperator::zero(p.dimension(), 0);
        op.add_term(vec![], p);
        op
    }

    pub fn add_term(&mut self, indices: Vec<Vec<u16>>, coeff: Poly) {
        assert_eq!(indices.len(), self.arity, "slot count mismatch");
        assert!(indices.iter().all(|d| d.len() == self.n));
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(indices) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                let sum = &*slot.get() + &coeff;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Vec<u16>>, &Poly)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rat) -> PolyDiffOperator {
        if c.is_zero() {
            return PolyDiffOperator::zero(self.n, self.arity);
        }
        PolyDiffOperator {
            n: self.n,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (k.clone(), p.scale(c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &PolyDiffOperator) -> PolyDiffOperator {
        assert_eq!(self.arity, other.arity, "arity mismatch in operator sum");
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.add_term(k.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyDiffOperator) -> PolyDiffOperator {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    /// Evaluates on polynomial arguments.
    pub fn apply(&self, args: &[Poly]) -> Result<Poly, OperatorError> {
        if args.len() != self.arity {
            return Err(OperatorError::ArityMismatch(self.arity, args.len()));
        }
        for a in args {
            if a.dimension() != self.n {
                return Err(OperatorError::DimensionMismatch(self.n, a.dimension()));
            }
        }
        let mut out = Poly::zero(self.n);
        for (indices, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (slot, multi) in indices.iter().enumerate() {
                if term.is_zero() {
                    break;
                }
                term = &term * &args[slot].diff_multi(multi);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Plugs `inner`'s output into slot `i`, expanding the slot's derivative
    /// over `inner`'s coefficient and arguments by Leibniz.
    fn compose_at(&self, i: usize, inner: &PolyDiffOperator) -> PolyDiffOperator {
        assert!(i < self.arity);
        let q = inner.arity;
        let mut out = PolyDiffOperator::zero(self.n, self.arity + q - 1);
        for (outer_idx, outer_coeff) in &self.terms {
            let d = &outer_idx[i];
            for (inner_idx, inner_coeff) in &inner.terms {
                // Split the multi-index D over (coefficient, q inner slots)
                // with multinomial weights, coordinate by coordinate.
                for (splits, weight) in multi_index_splits(d, q + 1) {
                    let coeff_part = inner_coeff.diff_multi(&splits[0]);
                    if coeff_part.is_zero() {
                        continue;
                    }
                    let mut indices = Vec::with_capacity(self.arity + q - 1);
                    indices.extend(outer_idx[..i].iter().cloned());
                    for (k, inner_slot) in inner_idx.iter().enumerate() {
                        let combined: Vec<u16> = inner_slot
                            .iter()
                            .zip(&splits[k + 1])
                            .map(|(&a, &b)| a + b)
                            .collect();
                        indices.push(combined);
                    }
                    indices.extend(outer_idx[i + 1..].iter().cloned());
                    let coeff = &(outer_coeff * &coeff_part)
                        .scale(&Rat::from_integer(weight.clone().into()));
                    out.add_term(indices, coeff.clone());
                }
            }
        }
        out
    }

    /// The Gerstenhaber circle product `A ∘ B = Σ_i (-1)^{i(q-1)} A ∘_i B`.
    pub fn circle(&self, other: &PolyDiffOperator) -> PolyDiffOperator {
        let q = other.arity;
        let mut out = PolyDiffOperator::zero(self.n, self.arity + q - 1);
        for i in 0..self.arity {
            let sign = if (i * (q + 1)) % 2 == 0 { 1 } else { -1 };
            let term = self.compose_at(i, other);
            out = out.add(&term.scale(&Rat::from_integer(sign.into())));
        }
        out
    }
}

/// All ways to split a multi-index into `parts` multi-indices, with the
/// multinomial multiplicity of each split.
fn multi_index_splits(d: &[u16], parts: usize) -> Vec<(Vec<Vec<u16>>, num_bigint::BigInt)> {
    use num_bigint::BigInt;
    let n = d.len();
    let mut acc: Vec<(Vec<Vec<u16>>, BigInt)> =
        vec![(vec![vec![0u16; n]; parts], BigInt::from(1))];
    for coord in 0..n {
        let total = d[coord];
        if total == 0 {
            continue;
        }
        let compositions = compositions_of(total, parts);
        let mut next = Vec::with_capacity(acc.len() * compositions.len());
        for (splits, weight) in &acc {
            for comp in &compositions {
                let mut splits2 = splits.clone();
                let mut w = weight.clone();
                // multinomial total! / prod(comp_i!)
                let mut denom = BigInt::from(1);
                for (p, &c) in comp.iter().enumerate() {
                    splits2[p][coord] = c;
                    denom *= factorial(c as usize);
                }
                w *= factorial(total as usize) / denom;
                next.push((splits2, w));
            }
        }
        acc = next;
    }
    acc
}

/// All weak compositions of `total` into `parts` parts.
fn compositions_of(total: u16, parts: usize) -> Vec<Vec<u16>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions_of(total - first, parts - 1) {
            let mut comp = vec![first];
            comp.append(&mut rest);
            out.push(comp);
        }
    }
    out
}

/// The Gerstenhaber bracket `[A, B] = A ∘ B - (-1)^{(p-1)(q-1)} B ∘ A`.
///
/// For two arity-1 operators this is the commutator.
pub fn gerstenhaber_bracket(
    a: &PolyDiffOperator,
    b: &PolyDiffOperator,
) -> Result<PolyDiffOperator, OperatorError> {
    if a.n != b.n {
        return Err(OperatorError::DimensionMismatch(a.n, b.n));
    }
    let ab = a.circle(b);
    let ba = b.circle(a);
    let koszul_odd = ((a.arity + 1) * (b.arity + 1)) % 2 == 1;
    Ok(if koszul_odd {
        ab.add(&ba)
    } else {
        ab.sub(&ba)
    })
}

/// The Hochschild differential
/// `(d_H A)(f_0,..,f_p) = f_0 A(f_1,..,f_p)
///   + Σ_{i=0}^{p-1} (-1)^{i+1} A(.., f_i f_{i+1}, ..)
///   + (-1)^{p+1} A(f_0,..,f_{p-1}) f_p`.
///
/// Satisfies `d_H ∘ d_H = 0` and `d_H A = (-1)^{arity(A)-1} [mu, A]`.
pub fn hochschild_differential(a: &PolyDiffOperator) -> PolyDiffOperator {
    let p = a.arity;
    let n = a.n;
    let mut out = PolyDiffOperator::zero(n, p + 1);
    let zero_idx = vec![0u16; n];

    // f_0 * A(f_1..f_p): a bare leading slot.
    for (idx, coeff) in &a.terms {
        let mut indices = vec![zero_idx.clone()];
        indices.extend(idx.iter().cloned());
        out.add_term(indices, coeff.clone());
    }
    // Merge terms: slot i of A consumes the product f_i f_{i+1}.
    for i in 0..p {
        let sign = Rat::from_integer(if i % 2 == 0 { (-1).into() } else { 1.into() });
        for (idx, coeff) in &a.terms {
            let d = &idx[i];
            for (splits, weight) in multi_index_splits(d, 2) {
                let mut indices = Vec::with_capacity(p + 1);
                indices.extend(idx[..i].iter().cloned());
                indices.push(splits[0].clone());
                indices.push(splits[1].clone());
                indices.extend(idx[i + 1..].iter().cloned());
                out.add_term(
                    indices,
                    coeff.scale(&(&sign * &Rat::from_integer(weight.into()))),
                );
            }
        }
    }
    // A(f_0..f_{p-1}) * f_p: a bare trailing slot.
    let end_sign = Rat::from_integer(if (p + 1) % 2 == 0 { 1.into() } else { (-1).into() });
    for (idx, coeff) in &a.terms {
        let mut indices = idx.clone();
        indices.push(zero_idx.clone());
        out.add_term(indices, coeff.scale(&end_sign));
    }
    out
}

/// The antisymmetrization map from polyvector fields to operators:
/// a degree-`d` field becomes the arity-`d` operator
/// `(1/d!) Σ_{σ} sgn(σ) a^{i_1..i_d} ∂_{i_σ(1)} ⊗ ... ⊗ ∂_{i_σ(d)}`.
///
/// Degree-1 fields map to themselves as derivations, degree-0 fields to
/// multiplication operators; images are closed under the Hochschild
/// differential.
pub fn hkr(a: &PolyVectorField) -> PolyDiffOperator {
    let d = a.degree();
    let n = a.dimension();
    let mut out = PolyDiffOperator::zero(n, d);
    let norm = Rat::new(1.into(), factorial(d));
    for (dirs, coeff) in a.components() {
        for perm in (0..d).permutations(d) {
            let sign = perm_sign(&perm);
            let mut indices = Vec::with_capacity(d);
            for &slot in &perm {
                let mut multi = vec![0u16; n];
                multi[dirs[slot] as usize] += 1;
                indices.push(multi);
            }
            let c = norm.clone() * Rat::from_integer(sign.into());
            out.add_term(indices, coeff.scale(&c));
        }
    }
    out
}

fn perm_sign(perm: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn d_i(n: usize, i: usize) -> PolyDiffOperator {
        let mut op = PolyDiffOperator::zero(n, 1);
        let mut multi = vec![0u16; n];
        multi[i] = 1;
        op.add_term(vec![multi], Poly::one(n));
        op
    }

    #[test]
    fn multiplication_squares_to_zero() {
        let mu = PolyDiffOperator::multiplication(2);
        assert!(gerstenhaber_bracket(&mu, &mu).unwrap().is_zero());
    }

    #[test]
    fn commuting_derivatives() {
        let a = d_i(2, 0);
        let b = d_i(2, 1);
        assert!(gerstenhaber_bracket(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn weighted_derivative_commutator() {
        // [x1 d1, d1] = -d1
        let mut a = PolyDiffOperator::zero(1, 1);
        a.add_term(vec![vec![1]], Poly::var(1, 0));
        let b = d_i(1, 0);
        let c = gerstenhaber_bracket(&a, &b).unwrap();
        assert_eq!(c, b.scale(&rat(-1, 1)));
    }

    #[test]
    fn hochschild_of_derivation_vanishes() {
        assert!(hochschild_differential(&d_i(2, 0)).is_zero());
        let mu = PolyDiffOperator::multiplication(2);
        assert!(hochschild_differential(&mu).is_zero());
    }

    #[test]
    fn hochschild_of_second_order_operator() {
        // d_H(d1 d1) on (f, g) = -2 (d1 f)(d1 g)
        let mut a = PolyDiffOperator::zero(1, 1);
        a.add_term(vec![vec![2]], Poly::one(1));
        let da = hochschild_differential(&a);
        let f = {
            let x = Poly::var(1, 0);
            &x * &x
        };
        let g = Poly::var(1, 0);
        // f = x^2, g = x: -2 f' g' = -4x
        let result = da.apply(&[f, g]).unwrap();
        assert_eq!(result, Poly::var(1, 0).scale(&rat(-4, 1)));
    }

    #[test]
    fn hochschild_squares_to_zero() {
        let mut a = PolyDiffOperator::zero(2, 1);
        a.add_term(vec![vec![1, 2]], Poly::var(2, 1));
        let dda = hochschild_differential(&hochschild_differential(&a));
        assert!(dda.is_zero());
    }

    #[test]
    fn hochschild_is_bracket_with_multiplication() {
        // d_H A = (-1)^{arity-1} [mu, A]
        let mu = PolyDiffOperator::multiplication(2);
        let mut a = PolyDiffOperator::zero(2, 2);
        a.add_term(vec![vec![1, 0], vec![0, 2]], Poly::var(2, 0));
        let lhs = hochschild_differential(&a);
        let rhs = gerstenhaber_bracket(&mu, &a).unwrap();
        // arity 2: sign (-1)^{2-1} = -1
        assert_eq!(lhs, rhs.scale(&rat(-1, 1)));

        let mut b = PolyDiffOperator::zero(2, 1);
        b.add_term(vec![vec![2, 0]], Poly::var(2, 1));
        let lhs1 = hochschild_differential(&b);
        let rhs1 = gerstenhaber_bracket(&mu, &b).unwrap();
        assert_eq!(lhs1, rhs1);
    }

    #[test]
    fn hkr_on_small_degrees() {
        // Degree 1: the field itself.
        let mut x_field = PolyVectorField::zero(2, 1);
        x_field.add_component(vec![1], Poly::var(2, 0)).unwrap();
        let op = hkr(&x_field);
        let f = Poly::var(2, 1);
        assert_eq!(op.apply(&[f]).unwrap(), Poly::var(2, 0));

        // Degree 0: multiplication by the polynomial.
        let p = Poly::var(2, 0);
        let op0 = hkr(&PolyVectorField::from_function(p.clone()));
        assert_eq!(op0.apply(&[]).unwrap(), p);

        // Degree 2: (1/2)(d1 f d2 g - d2 f d1 g).
        let mut pi = PolyVectorField::zero(2, 2);
        pi.add_component(vec![0, 1], Poly::one(2)).unwrap();
        let op2 = hkr(&pi);
        let f = Poly::var(2, 0);
        let g = Poly::var(2, 1);
        assert_eq!(op2.apply(&[f, g]).unwrap(), Poly::constant(2, rat(1, 2)));
        let f = Poly::var(2, 1);
        let g = Poly::var(2, 0);
        assert_eq!(op2.apply(&[f, g]).unwrap(), Poly::constant(2, rat(-1, 2)));
    }

    #[test]
    fn hkr_images_are_cocycles() {
        let mut a = PolyVectorField::zero(2, 2);
        a.add_component(vec![0, 1], Poly::var(2, 0)).unwrap();
        assert!(hochschild_differential(&hkr(&a)).is_zero());
    }

    #[test]
    fn apply_is_linear_in_coefficient() {
        let mut op = PolyDiffOperator::zero(1, 2);
        op.add_term(vec![vec![1], vec![1]], Poly::constant(1, rint(3)));
        let x = Poly::var(1, 0);
        let out = op.apply(&[x.clone(), x.clone()]).unwrap();
        assert_eq!(out, Poly::constant(1, rint(3)));
    }
}
