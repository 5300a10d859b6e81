//! Multivariate polynomials over the exact rationals.
//!
//! Exponent vectors are dense (the ambient dimension is small everywhere in
//! this crate) and terms live in a `BTreeMap`, so all iteration orders are
//! deterministic.

use crate::rational::{format_rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Vec<u16>, Rat>,
}

impl Poly {
    pub fn zero(n: usize) -> Poly {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rat) -> Poly {
        let mut p = Poly::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn one(n: usize) -> Poly {
        Poly::constant(n, Rat::from_integer(1.into()))
    }

    /// The coordinate variable `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Poly {
        assert!(i < n, "variable index out of range");
        let mut exps = vec![0u16; n];
        exps[i] = 1;
        let mut p = Poly::zero(n);
        p.add_term(exps, Rat::from_integer(1.into()));
        p
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: Rat) {
        assert_eq!(exps.len(), self.n);
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u16]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative along `x_i`.
    pub fn diff(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * Rat::from_integer((e[i] as i64).into()));
        }
        out
    }

    /// Applies the multi-index derivative `prod_i d_i^{m_i}`.
    pub fn diff_multi(&self, multi: &[u16]) -> Poly {
        let mut out = self.clone();
        for (i, &m) in multi.iter().enumerate() {
            for _ in 0..m {
                out = out.diff(i);
                if out.is_zero() {
                    return out;
                }
            }
        }
        out
    }

    /// Restricted to terms of the given total degree.
    pub fn homogeneous_part(&self, degree: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            if e.iter().map(|&x| x as usize).sum::<usize>() == degree {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn render(&self, vars: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut s = format_rat(c);
            for (i, &m) in e.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                s.push('*');
                s.push_str(vars.get(i).copied().unwrap_or("?"));
                if m > 1 {
                    s.push_str(&format!("^{m}"));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Rat::from_integer((-1).into()))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let mut out = Poly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }
}
