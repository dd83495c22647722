//! Interactive oracle proofs of proximity for algebraic-geometry codes.
//!
//! The crate plans sequences of foldable codes on Kummer curves and on the
//! Hermitian tower, folds oracles with the balanced folding operator, runs the
//! commit/query protocol with Merkle commitments, and evaluates the soundness
//! bounds.
//!
//! - [`algebra`]: finite fields, interpolation
//! - [`curves`]: Kummer curves, tower curves, points, fibers
//! - [`rrbasis`]: divisors, Riemann-Roch bases, evaluation codes
//! - [`foldplan`]: folding plans and their validation
//! - [`folding`]: the folding operator
//! - [`config`]: JSON plan configs, word files
//! - [`iopp`]: prover, verifier, commitments, proof files
//! - [`soundness`]: error bounds and repetition planning

pub mod algebra;
pub mod config;
pub mod curves;
pub mod folding;
pub mod foldplan;
pub mod iopp;
pub mod rrbasis;
pub mod soundness;
