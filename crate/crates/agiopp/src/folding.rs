//! The folding operator
//! Fold(f, z)(P) = sum_j z_1^j f_j(P) + sum_j z_2^{j+1} nu_{i+1,j}(P) f_j(P),
//! where f_j(P) is the X^j coefficient of the polynomial of degree < p_i that
//! interpolates (mu_i(Q), f(Q)) over the fiber of P.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Fe, Field, FieldOps};
use crate::foldplan::FoldStep;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoldError {
    #[error("oracle has {got} entries, level has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fold step {0} does not exist")]
    NoSuchStep(usize),
}

/// Values of one oracle f^{(i)} in the order of the level's domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleTable {
    pub level: usize,
    pub values: Vec<Fe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Challenge {
    pub z1: Fe,
    pub z2: Fe,
}

/// z_1^j and z_2^{j+1} for j < p.
#[derive(Debug, Clone)]
pub struct ChallengePowers {
    pub z1: Vec<Fe>,
    pub z2: Vec<Fe>,
}

impl ChallengePowers {
    pub fn new<O: FieldOps>(ops: &O, z: &Challenge, p: usize) -> ChallengePowers {
        let f = ops.field();
        let mut z1 = vec![f.one()];
        let mut z2 = vec![z.z2];
        for j in 1..p {
            z1.push(if j == 1 { z.z1 } else { ops.mul(z1[j - 1], z.z1) });
            z2.push(ops.mul(z2[j - 1], z.z2));
        }
        ChallengePowers { z1, z2 }
    }
}

/// Coefficients a_{0,P}, ..., a_{p-1,P} from the fiber values (in fiber order).
pub fn fiber_coefficients<O: FieldOps>(ops: &O, step: &FoldStep, t: usize, values: &[Fe]) -> Vec<Fe> {
    let p = step.arity;
    if p == 2 {
        let a = step.fibers[2 * t] as usize;
        let a1 = ops.mul(ops.sub(values[0], values[1]), step.interp[t]);
        let a0 = ops.sub(values[0], ops.mul(step.mu_values[a], a1));
        return vec![a0, a1];
    }
    let m = &step.interp[t * p * p..(t + 1) * p * p];
    (0..p)
        .map(|j| {
            let row = &m[j * p..(j + 1) * p];
            let mut acc = ops.mul(row[0], values[0]);
            for k in 1..p {
                acc = ops.add(acc, ops.mul(row[k], values[k]));
            }
            acc
        })
        .collect()
}

/// Fold(f, z)(P) for the target point with index t, from the p fiber values.
pub fn fold_at_point<O: FieldOps>(ops: &O, step: &FoldStep, t: usize, values: &[Fe], pw: &ChallengePowers) -> Fe {
    let p = step.arity;
    let a = fiber_coefficients(ops, step, t, values);
    let nu = &step.nu_table[t * p..(t + 1) * p];
    let mut acc = a[0];
    acc = ops.add(acc, ops.mul(ops.mul(pw.z2[0], nu[0]), a[0]));
    for j in 1..p {
        let w = ops.add(pw.z1[j], ops.mul(pw.z2[j], nu[j]));
        acc = ops.add(acc, ops.mul(w, a[j]));
    }
    acc
}

fn gather(step: &FoldStep, t: usize, f: &[Fe], buf: &mut Vec<Fe>) {
    buf.clear();
    buf.extend(step.fiber(t).iter().map(|&s| f[s as usize]));
}

/// Sequential fold through `ops` (used for operation counting).
pub fn fold_with<O: FieldOps>(ops: &O, step: &FoldStep, f: &[Fe], z: &Challenge) -> Result<Vec<Fe>, FoldError> {
    if f.len() != step.n_in() {
        return Err(FoldError::LengthMismatch { expected: step.n_in(), got: f.len() });
    }
    let pw = ChallengePowers::new(ops, z, step.arity);
    let mut buf = Vec::with_capacity(step.arity);
    Ok((0..step.n_out())
        .map(|t| {
            gather(step, t, f, &mut buf);
            fold_at_point(ops, step, t, &buf, &pw)
        })
        .collect())
}

/// Output chunk handed to one worker.
const CHUNK: usize = 1 << 10;

/// Parallel fold. Every output entry is computed independently, so the result
/// does not depend on how the range is split.
pub fn fold(field: &Field, step: &FoldStep, f: &[Fe], z: &Challenge) -> Result<Vec<Fe>, FoldError> {
    if f.len() != step.n_in() {
        return Err(FoldError::LengthMismatch { expected: step.n_in(), got: f.len() });
    }
    let pw = ChallengePowers::new(field, z, step.arity);
    let mut out = vec![field.zero(); step.n_out()];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut buf = Vec::with_capacity(step.arity);
        for (k, o) in chunk.iter_mut().enumerate() {
            let t = c * CHUNK + k;
            gather(step, t, f, &mut buf);
            *o = fold_at_point(field, step, t, &buf, &pw);
        }
    });
    Ok(out)
}

/// Folds a level-tagged table with step `table.level` of the given steps.
pub fn fold_table(
    field: &Field,
    steps: &[FoldStep],
    table: &OracleTable,
    z: &Challenge,
) -> Result<OracleTable, FoldError> {
    let step = steps.get(table.level).ok_or(FoldError::NoSuchStep(table.level))?;
    Ok(OracleTable { level: table.level + 1, values: fold(field, step, &table.values, z)? })
}
