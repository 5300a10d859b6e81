//! Evaluation of graph-indexed multidifferential operators.
//!
//! A kontsevich graph with `k` aerial and `m` ground vertices, together with
//! one polyvector field per aerial vertex, contracts to an arity-`m`
//! operator: sum over all assignments of coordinate indices to edges, where
//! each aerial vertex contributes its field's tensor component indexed by its
//! out-edges (in edge order) differentiated along its in-edges, and each
//! ground vertex collects the derivatives of its slot. The result alternates
//! with the edge order, matching the orientation behaviour of the weights.
//!
//! The disk variant evaluates against a Hochschild chain: boundary slot 0
//! enters as a function, every later slot contributes the de Rham
//! differential of its derived factor, wedged in slot order, and the whole
//! contraction carries `1/m!` so that the edgeless graphs reduce to the
//! chain-to-form antisymmetrization map.

use crate::diffop::PolyDiffOperator;
use crate::forms::{DiffForm, HochschildChain};
use crate::graph::{Graph, Species};
use crate::poly::Poly;
use crate::polyvec::PolyVectorField;
use crate::rational::{factorial, Rat};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("expected species {0:?}, got {1:?}")]
    WrongSpecies(Species, Species),
    #[error("graph has {0} aerial vertices but {1} fields were supplied")]
    FieldCount(usize, usize),
    #[error("field {0} has degree {1} but vertex {0} has out-degree {2}")]
    DegreeMismatch(usize, usize, usize),
    #[error("field {0} lives in dimension {1}, expected {2}")]
    FieldDimension(usize, usize, usize),
    #[error("chain length {0} does not match the {1} boundary slots")]
    ChainLength(usize, usize),
}

fn check_fields(g: &Graph, fields: &[PolyVectorField], n: usize) -> Result<(), EvalError> {
    if fields.len() != g.aerial {
        return Err(EvalError::FieldCount(g.aerial, fields.len()));
    }
    for (v, f) in fields.iter().enumerate() {
        if f.dimension() != n {
            return Err(EvalError::FieldDimension(v, f.dimension(), n));
        }
        let out_deg = g.out_degree(v);
        if f.degree() != out_deg {
            return Err(EvalError::DegreeMismatch(v, f.degree(), out_deg));
        }
    }
    Ok(())
}

/// Contracts a kontsevich graph with one field per aerial vertex into an
/// arity-`ground` operator on `R^n`.
pub fn evaluate_kontsevich_operator(
    g: &Graph,
    fields: &[PolyVectorField],
    n: usize,
) -> Result<PolyDiffOperator, EvalError> {
    if g.species != Species::Kontsevich && g.species != Species::Brane {
        return Err(EvalError::WrongSpecies(Species::Kontsevich, g.species));
    }
    check_fields(g, fields, n)?;
    let mut out = PolyDiffOperator::zero(n, g.ground);
    let e = g.edge_count();
    let out_edges: Vec<Vec<usize>> = (0..g.aerial).map(|v| g.out_edges(v)).collect();
    let in_edges: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.in_edges(v)).collect();

    let mut assignment = vec![0u8; e];
    loop {
        // Aerial factors.
        let mut coeff = Poly::one(n);
        for v in 0..g.aerial {
            let dirs: Vec<u8> = out_edges[v].iter().map(|&ei| assignment[ei]).collect();
            let mut factor = fields[v].component_full(&dirs);
            if factor.is_zero() {
                coeff = Poly::zero(n);
                break;
            }
            for &ei in &in_edges[v] {
                factor = factor.diff(assignment[ei] as usize);
                if factor.is_zero() {
                    break;
                }
            }
            if factor.is_zero() {
                coeff = Poly::zero(n);
                break;
            }
            coeff = &coeff * &factor;
        }
        if !coeff.is_zero() {
            let mut indices = Vec::with_capacity(g.ground);
            for s in g.aerial..g.vertex_count() {
                let mut multi = vec![0u16; n];
                for &ei in &in_edges[s] {
                    multi[assignment[ei] as usize] += 1;
                }
                indices.push(multi);
            }
            out.add_term(indices, coeff);
        }

        // Advance over n^e assignments.
        let mut k = 0;
        loop {
            if k == e {
                return Ok(out);
            }
            assignment[k] += 1;
            if (assignment[k] as usize) < n {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Contracts a shoikhet graph with fields and a Hochschild chain into a
/// differential form of degree equal to the chain length.
pub fn evaluate_shoikhet_operator(
    g: &Graph,
    fields: &[PolyVectorField],
    chain: &HochschildChain,
) -> Result<DiffForm, EvalError> {
    if g.species != Species::Shoikhet {
        return Err(EvalError::WrongSpecies(Species::Shoikhet, g.species));
    }
    let n = chain.dimension();
    check_fields(g, fields, n)?;
    if chain.length() + 1 != g.ground {
        return Err(EvalError::ChainLength(chain.length(), g.ground));
    }
    let m = chain.length();
    let mut out = DiffForm::zero(n, m);
    let e = g.edge_count();
    let out_edges: Vec<Vec<usize>> = (0..g.aerial).map(|v| g.out_edges(v)).collect();
    let in_edges: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.in_edges(v)).collect();
    let norm = Rat::new(1.into(), factorial(m));

    // Joint loop over edge assignments and the de Rham direction of each
    // boundary slot past the first.
    let total_choices = e + m;
    let mut choice = vec![0u8; total_choices];
    loop {
        let assignment = &choice[..e];
        let form_dirs = &choice[e..];

        let mut coeff = Poly::one(n);
        for v in 0..g.aerial {
            let dirs: Vec<u8> = out_edges[v].iter().map(|&ei| assignment[ei]).collect();
            let mut factor = fields[v].component_full(&dirs);
            for &ei in &in_edges[v] {
                if factor.is_zero() {
                    break;
                }
                factor = factor.diff(assignment[ei] as usize);
            }
            if factor.is_zero() {
                coeff = Poly::zero(n);
                break;
            }
            coeff = &coeff * &factor;
        }
        if !coeff.is_zero() {
            // Slot 0: derived factor enters as a function.
            let mut factor = chain.factor(0).clone();
            for &ei in &in_edges[g.aerial] {
                factor = factor.diff(assignment[ei] as usize);
            }
            coeff = &coeff * &factor;
            // Slots 1..m: d(derived factor), direction chosen by form_dirs.
            for s in 1..=m {
                if coeff.is_zero() {
                    break;
                }
                let mut factor = chain.factor(s).clone();
                for &ei in &in_edges[g.aerial + s] {
                    factor = factor.diff(assignment[ei] as usize);
                }
                factor = factor.diff(form_dirs[s - 1] as usize);
                coeff = &coeff * &factor;
            }
            out.add_component_signed(form_dirs, coeff.scale(&norm));
        }

        let mut k = 0;
        loop {
            if k == total_choices {
                return Ok(out);
            }
            choice[k] += 1;
            if (choice[k] as usize) < n {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}
