//! Exact graph calculus for deformation quantization.
//!
//! The crate provides, with exact rational arithmetic wherever the underlying
//! formulas are exact:
//!
//! * graph species with oriented canonical forms and the named wheel families
//!   ([`graph`]);
//! * the graph complex of undirected at-least-trivalent graphs, with its
//!   degree, differential, Lie bracket and wheel-coefficient functionals
//!   ([`gc2`]);
//! * polynomial polyvector fields, polydifferential operators, forms and
//!   Hochschild chains, together with the graph-indexed evaluation maps
//!   ([`poly`], [`polyvec`], [`diffop`], [`forms`], [`grapheval`]);
//! * weight collections, star products, associativity residuals,
//!   characteristic-series extraction and relation-contributor enumeration
//!   ([`formality`], [`relations`]);
//! * truncated power series, Bernoulli numbers and the reference series
//!   ([`series`]);
//! * the symmetrization star product on symmetric algebras and the
//!   trace-corrected multiplicativity test ([`pbw`]);
//! * a seeded Monte Carlo oracle for the configuration-space weight integrals
//!   of small graphs ([`mc`]).
//!
//! Sign and normalization conventions are collected in `CONVENTIONS.md` at the
//! repository root; everything in the crate defers to that document.

pub mod diffop;
pub mod formality;
pub mod forms;
pub mod gc2;
pub mod graph;
pub mod grapheval;
pub mod mc;
pub mod pbw;
pub mod poly;
pub mod polyvec;
pub mod rational;
pub mod relations;
pub mod series;

pub use rational::Rat;
