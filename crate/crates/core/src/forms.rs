//! Differential forms with polynomial coefficients and Hochschild chains.

use crate::poly::Poly;
use crate::rational::{factorial, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;

/// A polynomial differential form of fixed degree, stored on strictly
/// increasing `dx` tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<u8>, Poly>,
}

impl DiffForm {
    pub fn zero(n: usize, degree: usize) -> DiffForm {
        DiffForm {
            n,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn from_function(p: Poly) -> DiffForm {
        let mut f = DiffForm::zero(p.dimension(), 0);
        f.add_component(vec![], p);
        f
    }

    /// Adds `p dx_{dirs}`; `dirs` may be unsorted or contain repeats, the
    /// wedge sign and vanishing are handled here.
    pub fn add_component_signed(&mut self, dirs: &[u8], p: Poly) {
        let mut sorted = dirs.to_vec();
        let sign = crate::polyvec::sort_sign(&mut sorted);
        if sign == 0 || p.is_zero() {
            return;
        }
        let signed = if sign > 0 { p } else { -&p };
        self.add_component(sorted, signed);
    }

    pub fn add_component(&mut self, dirs: Vec<u8>, p: Poly) {
        assert_eq!(dirs.len(), self.degree);
        assert!(dirs.windows(2).all(|w| w[0] < w[1]));
        if p.is_zero() {
            return;
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

    pub fn scale(&self, c: &Rat) -> DiffForm {
        if c.is_zero() {
            return DiffForm::zero(self.n, self.degree);
        }
        DiffForm {
            n: self.n,
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .map(|(d, p)| (d.clone(), p.scale(c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &DiffForm) -> DiffForm {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (d, p) in &other.comps {
            out.add_component(d.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffForm) -> DiffForm {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }
}

/// A Hochschild chain: a tuple `(a_0, a_1, ..., a_m)` of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildChain {
    n: usize,
    factors: Vec<Poly>,
}

impl HochschildChain {
    pub fn new(factors: Vec<Poly>) -> HochschildChain {
        assert!(!factors.is_empty(), "a chain has at least the a_0 factor");
        let n = factors[0].dimension();
        assert!(factors.iter().all(|f| f.dimension() == n));
        HochschildChain { n, factors }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// The chain length `m` (the chain has `m + 1` factors).
    pub fn length(&self) -> usize {
        self.factors.len() - 1
    }

    pub fn factor(&self, i: usize) -> &Poly {
        &self.factors[i]
    }

    pub fn factors(&self) -> &[Poly] {
        &self.factors
    }
}

/// The antisymmetrization map from chains to forms:
/// `(a_0, ..., a_m) -> (1/m!) a_0 da_1 ∧ ... ∧ da_m`.
pub fn chkr(c: &HochschildChain) -> DiffForm {
    let m = c.length();
    let n = c.dimension();
    let mut out = DiffForm::zero(n, m);
    let norm = Rat::new(1.into(), factorial(m));
    // Sum over the direction of each d a_i.
    let mut dirs = vec![0u8; m];
    loop {
        let mut coeff = c.factor(0).scale(&norm);
        for (i, &d) in dirs.iter().enumerate() {
            if coeff.is_zero() {
                break;
            }
            coeff = &coeff * &c.factor(i + 1).diff(d as usize);
        }
        out.add_component_signed(&dirs, coeff);

        // Mixed-radix advance over n^m choices.
        let mut k = 0;
        loop {
            if k == m {
                return out;
            }
            dirs[k] += 1;
            if (dirs[k] as usize) < n {
                break;
            }
            dirs[k] = 0;
            k += 1;
        }
    }
}
