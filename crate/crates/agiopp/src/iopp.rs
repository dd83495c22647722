//! Prover and verifier: COMMIT phase, correlated QUERY phase, the final test,
//! Merkle commitments and Fiat-Shamir.
//!
//! Oracles f^(0), ..., f^(r-1) are committed with Merkle trees. f^(r) is not
//! committed: in fold-to-constant mode the prover sends β, in membership mode
//! it sends the whole table in the clear.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{AlgebraError, Fe, Field, FieldOps, FieldSpec};
use crate::folding::{fold, fold_at_point, fold_with, Challenge, ChallengePowers, FoldError};
use crate::foldplan::Schedule;

pub type Hash = [u8; 32];

const MAGIC: &[u8; 4] = b"AGIP";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IoppError {
    #[error("word has {got} entries, the code has length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fold-to-constant needs a final code of dimension 1 and at least one round (dim {dim}, rounds {rounds})")]
    NotConstant { dim: usize, rounds: usize },
    #[error("membership mode needs the final code, which is too large to hold")]
    NoFinalCode,
    #[error("repetition count must be positive")]
    NoRepetitions,
    #[error("cannot sample {t} distinct points out of {n}")]
    TooManyQueries { t: usize, n: usize },
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Commit(#[from] CommitError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommitError {
    #[error("index {index} out of range for a table of {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("authentication path does not match the root")]
    BadPath,
}

/// Transcript errors that are not protocol rejects.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("bad magic bytes")]
    Magic,
    #[error("unsupported proof version {0}")]
    Version(u16),
    #[error("proof was made for another schedule")]
    Digest,
    #[error("proof field {0} differs from the schedule field")]
    Field(String),
    #[error("proof has {got} rounds, schedule has {expected}")]
    Rounds { expected: usize, got: usize },
    #[error("malformed proof: {0}")]
    Malformed(String),
    #[error("proof truncated")]
    Truncated,
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("membership mode needs the final code, which is too large to hold")]
    NoFinalCode,
}

impl From<AlgebraError> for VerifyError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Truncated => VerifyError::Truncated,
            other => VerifyError::Malformed(other.to_string()),
        }
    }
}

// ============================================================================
// Merkle commitments
// ============================================================================

fn leaf_hash(field: &Field, oracle: u32, pos: u32, value: Fe) -> Hash {
    let mut buf = Vec::with_capacity(9 + field.byte_len());
    buf.push(0);
    buf.extend_from_slice(&oracle.to_le_bytes());
    buf.extend_from_slice(&pos.to_le_bytes());
    field.write_bytes(value, &mut buf);
    Sha256::digest(&buf).into()
}

fn node_hash(oracle: u32, l: &Hash, r: &Hash) -> Hash {
    let mut h = Sha256::new();
    h.update([1]);
    h.update(oracle.to_le_bytes());
    h.update(l);
    h.update(r);
    h.finalize().into()
}

/// Binary hash tree over one oracle, padded with zero hashes to a power of two.
#[derive(Debug, Clone)]
pub struct MerkleTree {
    oracle: u32,
    len: usize,
    layers: Vec<Vec<Hash>>,
}

pub fn path_depth(len: usize) -> usize {
    len.next_power_of_two().trailing_zeros() as usize
}

impl MerkleTree {
    pub fn commit(field: &Field, oracle: u32, values: &[Fe]) -> MerkleTree {
        let width = values.len().next_power_of_two();
        let mut leaves: Vec<Hash> =
            values.par_iter().enumerate().map(|(i, &v)| leaf_hash(field, oracle, i as u32, v)).collect();
        leaves.resize(width, [0; 32]);
        let mut layers = vec![leaves];
        while layers.last().unwrap().len() > 1 {
            let prev = layers.last().unwrap();
            let next = prev.par_chunks(2).map(|c| node_hash(oracle, &c[0], &c[1])).collect();
            layers.push(next);
        }
        MerkleTree { oracle, len: values.len(), layers }
    }

    pub fn root(&self) -> Hash {
        self.layers.last().unwrap()[0]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn oracle(&self) -> u32 {
        self.oracle
    }

    /// Sibling hashes from the leaf up.
    pub fn open(&self, index: usize) -> Result<Vec<Hash>, CommitError> {
        if index >= self.len {
            return Err(CommitError::OutOfRange { index, len: self.len });
        }
        let mut i = index;
        let mut path = Vec::with_capacity(self.layers.len() - 1);
        for layer in &self.layers[..self.layers.len() - 1] {
            path.push(layer[i ^ 1]);
            i >>= 1;
        }
        Ok(path)
    }
}

pub fn verify_path(
    field: &Field,
    oracle: u32,
    root: &Hash,
    len: usize,
    index: usize,
    value: Fe,
    path: &[Hash],
) -> Result<(), CommitError> {
    if index >= len {
        return Err(CommitError::OutOfRange { index, len });
    }
    if path.len() != path_depth(len) {
        return Err(CommitError::BadPath);
    }
    let mut h = leaf_hash(field, oracle, index as u32, value);
    let mut i = index;
    for s in path {
        h = if i & 1 == 0 { node_hash(oracle, &h, s) } else { node_hash(oracle, s, &h) };
        i >>= 1;
    }
    if &h == root {
        Ok(())
    } else {
        Err(CommitError::BadPath)
    }
}

// ============================================================================
// Public coins
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinMode {
    /// Challenges hashed from the transcript so far.
    FiatShamir,
    /// Interactive simulation: both sides hold the seed.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalMode {
    /// Fold until dimension 1 and compare against a single value β.
    #[default]
    Constant,
    /// Send f^(r) and test membership in C_r.
    Membership,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    #[default]
    Independent,
    WithoutReplacement,
}

/// Source of verifier randomness.
pub struct Coins {
    kind: CoinsKind,
}

enum CoinsKind {
    Hash { state: Hash, counter: u64 },
    Rng(ChaCha20Rng),
}

impl Coins {
    pub fn new(mode: CoinMode, digest: &Hash) -> Coins {
        let kind = match mode {
            CoinMode::FiatShamir => {
                let mut h = Sha256::new();
                h.update(b"agiopp-fs");
                h.update(digest);
                CoinsKind::Hash { state: h.finalize().into(), counter: 0 }
            }
            CoinMode::Seeded(seed) => CoinsKind::Rng(ChaCha20Rng::seed_from_u64(seed)),
        };
        Coins { kind }
    }

    pub fn absorb(&mut self, data: &[u8]) {
        if let CoinsKind::Hash { state, counter } = &mut self.kind {
            let mut h = Sha256::new();
            h.update([0]);
            h.update(*state);
            h.update(data);
            *state = h.finalize().into();
            *counter = 0;
        }
    }

    fn with_rng<T>(&mut self, f: impl FnOnce(&mut ChaCha20Rng) -> T) -> T {
        match &mut self.kind {
            CoinsKind::Hash { state, counter } => {
                let mut h = Sha256::new();
                h.update([1]);
                h.update(*state);
                h.update(counter.to_le_bytes());
                *counter += 1;
                let mut rng = ChaCha20Rng::from_seed(h.finalize().into());
                f(&mut rng)
            }
            CoinsKind::Rng(rng) => f(rng),
        }
    }

    pub fn challenge(&mut self, field: &Field) -> Challenge {
        self.with_rng(|r| Challenge { z1: field.random(r), z2: field.random(r) })
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.with_rng(|r| r.gen_range(0..n))
    }

    pub fn queries(&mut self, n: usize, t: usize, sampling: Sampling) -> Result<Vec<usize>, IoppError> {
        match sampling {
            Sampling::Independent => Ok((0..t).map(|_| self.index(n)).collect()),
            Sampling::WithoutReplacement => {
                if t > n {
                    return Err(IoppError::TooManyQueries { t, n });
                }
                let mut seen = HashSet::new();
                let mut out = Vec::with_capacity(t);
                while out.len() < t {
                    let q = self.index(n);
                    if seen.insert(q) {
                        out.push(q);
                    }
                }
                Ok(out)
            }
        }
    }
}

// ============================================================================
// Prover
// ============================================================================

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinalPayload {
    Constant(Fe),
    Table(Vec<Fe>),
}

impl FinalPayload {
    pub fn mode(&self) -> FinalMode {
        match self {
            FinalPayload::Constant(_) => FinalMode::Constant,
            FinalPayload::Table(_) => FinalMode::Membership,
        }
    }
    fn write(&self, field: &Field, out: &mut Vec<u8>) {
        match self {
            FinalPayload::Constant(b) => field.write_bytes(*b, out),
            FinalPayload::Table(v) => v.iter().for_each(|&x| field.write_bytes(x, out)),
        }
    }
}

pub struct ProverState {
    /// f^(0), ..., f^(r).
    pub oracles: Vec<Vec<Fe>>,
    pub challenges: Vec<Challenge>,
    /// Trees over f^(0), ..., f^(r-1).
    pub trees: Vec<MerkleTree>,
    pub final_payload: FinalPayload,
}

impl ProverState {
    pub fn roots(&self) -> Vec<Hash> {
        self.trees.iter().map(MerkleTree::root).collect()
    }
}

fn check_mode(schedule: &Schedule, mode: FinalMode) -> Result<(), IoppError> {
    match mode {
        FinalMode::Constant if schedule.final_dim != 1 || schedule.rounds() == 0 => {
            Err(IoppError::NotConstant { dim: schedule.final_dim, rounds: schedule.rounds() })
        }
        FinalMode::Membership if schedule.final_code.is_none() => Err(IoppError::NoFinalCode),
        _ => Ok(()),
    }
}

fn final_payload(mode: FinalMode, last: &[Fe]) -> FinalPayload {
    match mode {
        FinalMode::Constant => FinalPayload::Constant(last[0]),
        FinalMode::Membership => FinalPayload::Table(last.to_vec()),
    }
}

/// COMMIT phase with parallel folding and tree construction.
pub fn commit_phase(
    schedule: &Schedule,
    f0: &[Fe],
    mode: FinalMode,
    coins: &mut Coins,
) -> Result<ProverState, IoppError> {
    commit_inner(schedule, f0, mode, coins, |step, f, z| fold(&schedule.field, step, f, z))
}

/// COMMIT phase with every field operation of the folds going through `ops`.
pub fn commit_phase_with<O: FieldOps>(
    ops: &O,
    schedule: &Schedule,
    f0: &[Fe],
    mode: FinalMode,
    coins: &mut Coins,
) -> Result<ProverState, IoppError> {
    commit_inner(schedule, f0, mode, coins, |step, f, z| fold_with(ops, step, f, z))
}

fn commit_inner(
    schedule: &Schedule,
    f0: &[Fe],
    mode: FinalMode,
    coins: &mut Coins,
    mut fold_fn: impl FnMut(&crate::foldplan::FoldStep, &[Fe], &Challenge) -> Result<Vec<Fe>, FoldError>,
) -> Result<ProverState, IoppError> {
    if f0.len() != schedule.n() {
        return Err(IoppError::LengthMismatch { expected: schedule.n(), got: f0.len() });
    }
    check_mode(schedule, mode)?;
    let field = &schedule.field;
    let mut oracles = vec![f0.to_vec()];
    let mut trees = Vec::new();
    let mut challenges = Vec::new();
    for (i, step) in schedule.steps.iter().enumerate() {
        let tree = MerkleTree::commit(field, i as u32, &oracles[i]);
        coins.absorb(&tree.root());
        let z = coins.challenge(field);
        let next = fold_fn(step, &oracles[i], &z)?;
        trees.push(tree);
        challenges.push(z);
        oracles.push(next);
    }
    let final_payload = final_payload(mode, oracles.last().unwrap());
    let mut buf = Vec::new();
    final_payload.write(field, &mut buf);
    coins.absorb(&buf);
    Ok(ProverState { oracles, challenges, trees, final_payload })
}

// ============================================================================
// Query test, shared by the direct and transcript verifiers
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectKind {
    RoundConsistency,
    Final,
    Commitment,
    ChallengeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub round: usize,
    pub kind: RejectKind,
    /// Failing repetition, when the failure belongs to one.
    pub repetition: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierDecision {
    pub accept: bool,
    pub rejection: Option<Rejection>,
}

impl VerifierDecision {
    pub fn accept() -> Self {
        VerifierDecision { accept: true, rejection: None }
    }
    pub fn reject(round: usize, kind: RejectKind, repetition: Option<usize>) -> Self {
        VerifierDecision { accept: false, rejection: Some(Rejection { round, kind, repetition }) }
    }
}

impl std::fmt::Display for VerifierDecision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.rejection {
            None => write!(f, "accept"),
            Some(r) => {
                write!(f, "reject: {:?} at round {}", r.kind, r.round)?;
                if let Some(k) = r.repetition {
                    write!(f, " (repetition {k})")?;
                }
                Ok(())
            }
        }
    }
}

/// Oracle access for the verifier.
pub trait OracleReader {
    /// Values of f^(round) at `positions`; `Err` on a bad opening.
    fn fiber(&mut self, round: usize, positions: &[u32]) -> Result<Vec<Fe>, CommitError>;
    /// f^(r) at `pos` (membership mode).
    fn final_entry(&mut self, pos: usize) -> Fe;
}

/// Reads prover tables directly (the IOP oracle model).
pub struct DirectReader<'a> {
    pub oracles: &'a [Vec<Fe>],
}

impl OracleReader for DirectReader<'_> {
    fn fiber(&mut self, round: usize, positions: &[u32]) -> Result<Vec<Fe>, CommitError> {
        Ok(positions.iter().map(|&s| self.oracles[round][s as usize]).collect())
    }
    fn final_entry(&mut self, pos: usize) -> Fe {
        self.oracles.last().unwrap()[pos]
    }
}

/// Reads opened values of one query transcript and checks their paths.
pub struct TranscriptReader<'a> {
    pub field: &'a Field,
    pub roots: &'a [Hash],
    pub sizes: &'a [usize],
    pub query: &'a QueryTranscript,
    pub final_table: Option<&'a [Fe]>,
}

impl OracleReader for TranscriptReader<'_> {
    fn fiber(&mut self, round: usize, positions: &[u32]) -> Result<Vec<Fe>, CommitError> {
        let o = &self.query.openings[round];
        for (k, &s) in positions.iter().enumerate() {
            verify_path(
                self.field,
                round as u32,
                &self.roots[round],
                self.sizes[round],
                s as usize,
                o.values[k],
                &o.paths[k],
            )?;
        }
        Ok(o.values.clone())
    }
    fn final_entry(&mut self, pos: usize) -> Fe {
        self.final_table.expect("membership mode")[pos]
    }
}

/// Counts reads per oracle.
pub struct CountingReader<R> {
    pub inner: R,
    /// reads[i] counts entries of f^(i) read; the last slot is f^(r).
    pub reads: Vec<usize>,
}

impl<R: OracleReader> CountingReader<R> {
    pub fn new(inner: R, rounds: usize) -> Self {
        CountingReader { inner, reads: vec![0; rounds + 1] }
    }
    pub fn total(&self) -> usize {
        self.reads.iter().sum()
    }
}

impl<R: OracleReader> OracleReader for CountingReader<R> {
    fn fiber(&mut self, round: usize, positions: &[u32]) -> Result<Vec<Fe>, CommitError> {
        self.reads[round] += positions.len();
        self.inner.fiber(round, positions)
    }
    fn final_entry(&mut self, pos: usize) -> Fe {
        *self.reads.last_mut().unwrap() += 1;
        self.inner.final_entry(pos)
    }
}

/// One query test along the projection path of `q0`.
pub fn query_test<O: FieldOps, R: OracleReader>(
    ops: &O,
    schedule: &Schedule,
    powers: &[ChallengePowers],
    final_payload: &FinalPayload,
    q0: usize,
    reader: &mut R,
) -> Result<(), (usize, RejectKind)> {
    let r = schedule.rounds();
    let mut q = q0;
    let mut expected: Option<Fe> = None;
    for (i, step) in schedule.steps.iter().enumerate() {
        let t = step.fiber_of[q] as usize;
        let positions = step.fiber(t);
        let values = reader.fiber(i, positions).map_err(|_| (i, RejectKind::Commitment))?;
        if let Some(e) = expected {
            let k = positions.iter().position(|&s| s as usize == q).unwrap();
            if values[k] != e {
                return Err((i - 1, RejectKind::RoundConsistency));
            }
        }
        expected = Some(fold_at_point(ops, step, t, &values, &powers[i]));
        q = t;
    }
    let Some(e) = expected else { return Ok(()) };
    match final_payload {
        FinalPayload::Constant(b) if e != *b => Err((r - 1, RejectKind::Final)),
        FinalPayload::Table(_) if e != reader.final_entry(q) => Err((r - 1, RejectKind::RoundConsistency)),
        _ => Ok(()),
    }
}

fn powers_for<O: FieldOps>(ops: &O, schedule: &Schedule, challenges: &[Challenge]) -> Vec<ChallengePowers> {
    schedule.steps.iter().zip(challenges).map(|(s, z)| ChallengePowers::new(ops, z, s.arity)).collect()
}

fn final_in_code(schedule: &Schedule, payload: &FinalPayload) -> bool {
    match payload {
        FinalPayload::Constant(_) => true,
        FinalPayload::Table(v) => schedule.final_code.as_ref().is_some_and(|c| c.contains(v)),
    }
}

/// QUERY phase against the prover's tables (no commitments), with query
/// points drawn from `coins` after the COMMIT phase.
pub fn query_phase(
    schedule: &Schedule,
    state: &ProverState,
    t: usize,
    sampling: Sampling,
    coins: &mut Coins,
) -> Result<VerifierDecision, IoppError> {
    let mut reader = DirectReader { oracles: &state.oracles };
    query_phase_with(&schedule.field, schedule, state, t, sampling, coins, &mut reader)
}

pub fn query_phase_with<O: FieldOps, R: OracleReader>(
    ops: &O,
    schedule: &Schedule,
    state: &ProverState,
    t: usize,
    sampling: Sampling,
    coins: &mut Coins,
    reader: &mut R,
) -> Result<VerifierDecision, IoppError> {
    if t == 0 {
        return Err(IoppError::NoRepetitions);
    }
    let queries = coins.queries(schedule.n(), t, sampling)?;
    if let FinalPayload::Table(v) = &state.final_payload {
        for pos in 0..v.len() {
            reader.final_entry(pos);
        }
        if !final_in_code(schedule, &state.final_payload) {
            return Ok(VerifierDecision::reject(schedule.rounds(), RejectKind::Final, None));
        }
    }
    let powers = powers_for(ops, schedule, &state.challenges);
    for (rep, &q0) in queries.iter().enumerate() {
        if let Err((round, kind)) = query_test(ops, schedule, &powers, &state.final_payload, q0, reader) {
            return Ok(VerifierDecision::reject(round, kind, Some(rep)));
        }
    }
    Ok(VerifierDecision::accept())
}

// ============================================================================
// Transcripts
// ============================================================================

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub coins: CoinMode,
    pub final_mode: FinalMode,
    pub sampling: Sampling,
    pub t: usize,
}

impl ProtocolConfig {
    pub fn new(coins: CoinMode, t: usize) -> Self {
        ProtocolConfig { coins, final_mode: FinalMode::Constant, sampling: Sampling::Independent, t }
    }
    fn mode_byte(&self) -> u8 {
        (matches!(self.coins, CoinMode::Seeded(_)) as u8)
            | ((self.final_mode == FinalMode::Membership) as u8) << 1
            | ((self.sampling == Sampling::WithoutReplacement) as u8) << 2
    }
}

/// Opened fiber of one oracle: values in fiber order and their paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub values: Vec<Fe>,
    pub paths: Vec<Vec<Hash>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTranscript {
    pub q0: u32,
    pub openings: Vec<Opening>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTranscript {
    pub digest: Hash,
    pub field: FieldSpec,
    pub mode: u8,
    pub roots: Vec<Hash>,
    pub challenges: Vec<Challenge>,
    pub queries: Vec<QueryTranscript>,
    pub final_payload: FinalPayload,
}

impl ProofTranscript {
    pub fn coins_seeded(&self) -> bool {
        self.mode & 1 != 0
    }
    pub fn final_mode(&self) -> FinalMode {
        if self.mode & 2 != 0 {
            FinalMode::Membership
        } else {
            FinalMode::Constant
        }
    }
    pub fn sampling(&self) -> Sampling {
        if self.mode & 4 != 0 {
            Sampling::WithoutReplacement
        } else {
            Sampling::Independent
        }
    }
    /// Opened field elements plus the final payload.
    pub fn field_elements(&self) -> usize {
        let opened: usize = self.queries.iter().flat_map(|q| &q.openings).map(|o| o.values.len()).sum();
        opened
            + match &self.final_payload {
                FinalPayload::Constant(_) => 1,
                FinalPayload::Table(v) => v.len(),
            }
    }

    pub fn to_bytes(&self, field: &Field) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.digest);
        out.extend_from_slice(&self.field.to_bytes());
        out.push(self.mode);
        out.extend_from_slice(&(self.roots.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.queries.len() as u32).to_le_bytes());
        for (root, z) in self.roots.iter().zip(&self.challenges) {
            out.extend_from_slice(root);
            field.write_bytes(z.z1, &mut out);
            field.write_bytes(z.z2, &mut out);
        }
        for q in &self.queries {
            out.extend_from_slice(&q.q0.to_le_bytes());
            for o in &q.openings {
                o.values.iter().for_each(|&v| field.write_bytes(v, &mut out));
                o.paths.iter().flatten().for_each(|h| out.extend_from_slice(h));
            }
        }
        self.final_payload.write(field, &mut out);
        out
    }

    /// Parses a proof; arities and path lengths come from the schedule.
    pub fn from_bytes(bytes: &[u8], schedule: &Schedule) -> Result<ProofTranscript, VerifyError> {
        let field = &schedule.field;
        let mut rd = Cursor { bytes, pos: 0 };
        if rd.take(4)? != MAGIC {
            return Err(VerifyError::Magic);
        }
        let version = u16::from_le_bytes(rd.take(2)?.try_into().unwrap());
        if version != VERSION {
            return Err(VerifyError::Version(version));
        }
        let digest: Hash = rd.take(32)?.try_into().unwrap();
        if digest != schedule.digest() {
            return Err(VerifyError::Digest);
        }
        let (spec, used) = FieldSpec::from_bytes(&bytes[rd.pos..])?;
        rd.pos += used;
        if spec != *field.spec() {
            return Err(VerifyError::Field(spec.to_string()));
        }
        let mode = rd.take(1)?[0];
        if mode > 7 {
            return Err(VerifyError::Malformed(format!("mode byte {mode}")));
        }
        let r = rd.u32()? as usize;
        if r != schedule.rounds() {
            return Err(VerifyError::Rounds { expected: schedule.rounds(), got: r });
        }
        let t = rd.u32()? as usize;
        let mut roots = Vec::with_capacity(r);
        let mut challenges = Vec::with_capacity(r);
        for _ in 0..r {
            roots.push(rd.take(32)?.try_into().unwrap());
            let z1 = rd.fe(field)?;
            let z2 = rd.fe(field)?;
            challenges.push(Challenge { z1, z2 });
        }
        let mut queries = Vec::with_capacity(t.min(1 << 16));
        for _ in 0..t {
            let q0 = rd.u32()?;
            let mut openings = Vec::with_capacity(r);
            for (i, step) in schedule.steps.iter().enumerate() {
                let values = (0..step.arity).map(|_| rd.fe(field)).collect::<Result<Vec<_>, _>>()?;
                let depth = path_depth(schedule.sizes[i]);
                let mut paths = Vec::with_capacity(step.arity);
                for _ in 0..step.arity {
                    paths.push(
                        (0..depth)
                            .map(|_| Ok(rd.take(32)?.try_into().unwrap()))
                            .collect::<Result<Vec<Hash>, VerifyError>>()?,
                    );
                }
                openings.push(Opening { values, paths });
            }
            queries.push(QueryTranscript { q0, openings });
        }
        let final_payload = if mode & 2 == 0 {
            FinalPayload::Constant(rd.fe(field)?)
        } else {
            FinalPayload::Table((0..schedule.sizes[r]).map(|_| rd.fe(field)).collect::<Result<_, _>>()?)
        };
        if rd.pos != bytes.len() {
            return Err(VerifyError::Trailing(bytes.len() - rd.pos));
        }
        Ok(ProofTranscript { digest, field: spec, mode, roots, challenges, queries, final_payload })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], VerifyError> {
        let s = self.bytes.get(self.pos..self.pos + n).ok_or(VerifyError::Truncated)?;
        self.pos += n;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32, VerifyError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn fe(&mut self, field: &Field) -> Result<Fe, VerifyError> {
        let v = field.read_bytes(self.take(field.byte_len())?)?;
        Ok(v)
    }
}

/// Runs both phases and assembles a transcript.
pub fn prove(schedule: &Schedule, f0: &[Fe], cfg: &ProtocolConfig) -> Result<ProofTranscript, IoppError> {
    Ok(prove_with_state(schedule, f0, cfg)?.0)
}

pub fn prove_with_state(
    schedule: &Schedule,
    f0: &[Fe],
    cfg: &ProtocolConfig,
) -> Result<(ProofTranscript, ProverState), IoppError> {
    if cfg.t == 0 {
        return Err(IoppError::NoRepetitions);
    }
    let mut coins = Coins::new(cfg.coins, &schedule.digest());
    let state = commit_phase(schedule, f0, cfg.final_mode, &mut coins)?;
    let q0s = coins.queries(schedule.n(), cfg.t, cfg.sampling)?;
    let queries = q0s
        .into_iter()
        .map(|q0| {
            let mut q = q0;
            let mut openings = Vec::with_capacity(schedule.rounds());
            for (i, step) in schedule.steps.iter().enumerate() {
                let t = step.fiber_of[q] as usize;
                let positions = step.fiber(t);
                openings.push(Opening {
                    values: positions.iter().map(|&s| state.oracles[i][s as usize]).collect(),
                    paths: positions.iter().map(|&s| state.trees[i].open(s as usize)).collect::<Result<_, _>>()?,
                });
                q = t;
            }
            Ok(QueryTranscript { q0: q0 as u32, openings })
        })
        .collect::<Result<Vec<_>, IoppError>>()?;
    let proof = ProofTranscript {
        digest: schedule.digest(),
        field: schedule.field.spec().clone(),
        mode: cfg.mode_byte(),
        roots: state.roots(),
        challenges: state.challenges.clone(),
        queries,
        final_payload: state.final_payload.clone(),
    };
    Ok((proof, state))
}

/// Verifies a transcript. `coins` must match the prover's coin mode; in the
/// seeded mode the verifier regenerates the same challenges from the seed.
pub fn verify(schedule: &Schedule, proof: &ProofTranscript, coins: CoinMode) -> Result<VerifierDecision, VerifyError> {
    verify_with(&schedule.field, schedule, proof, coins).map(|(d, _)| d)
}

/// As [`verify`], with arithmetic through `ops`; also returns the per-oracle
/// read counts.
pub fn verify_with<O: FieldOps>(
    ops: &O,
    schedule: &Schedule,
    proof: &ProofTranscript,
    coins: CoinMode,
) -> Result<(VerifierDecision, Vec<usize>), VerifyError> {
    let r = schedule.rounds();
    let field = &schedule.field;
    if proof.digest != schedule.digest() {
        return Err(VerifyError::Digest);
    }
    if proof.field != *field.spec() {
        return Err(VerifyError::Field(proof.field.to_string()));
    }
    if proof.roots.len() != r || proof.challenges.len() != r {
        return Err(VerifyError::Rounds { expected: r, got: proof.roots.len() });
    }
    if proof.coins_seeded() != matches!(coins, CoinMode::Seeded(_)) {
        return Err(VerifyError::Malformed("coin mode differs from the verifier's".into()));
    }
    match (&proof.final_payload, proof.final_mode()) {
        (FinalPayload::Constant(_), FinalMode::Constant) if schedule.final_dim == 1 && r > 0 => {}
        (FinalPayload::Table(v), FinalMode::Membership) if v.len() == schedule.sizes[r] => {
            if schedule.final_code.is_none() {
                return Err(VerifyError::NoFinalCode);
            }
        }
        _ => return Err(VerifyError::Malformed("final payload does not fit the schedule".into())),
    }
    for q in &proof.queries {
        let shape_ok = q.openings.len() == r
            && q.openings.iter().zip(&schedule.steps).enumerate().all(|(i, (o, s))| {
                o.values.len() == s.arity
                    && o.paths.len() == s.arity
                    && o.paths.iter().all(|p| p.len() == path_depth(schedule.sizes[i]))
            });
        if !shape_ok || q.q0 as usize >= schedule.n() {
            return Err(VerifyError::Malformed("query transcript shape".into()));
        }
    }
    if proof.queries.is_empty() {
        return Err(VerifyError::Malformed("no query transcripts".into()));
    }
    let mut reads = vec![0usize; r + 1];

    let mut coin = Coins::new(coins, &schedule.digest());
    for i in 0..r {
        coin.absorb(&proof.roots[i]);
        if coin.challenge(field) != proof.challenges[i] {
            return Ok((VerifierDecision::reject(i, RejectKind::ChallengeMismatch, None), reads));
        }
    }
    let mut buf = Vec::new();
    proof.final_payload.write(field, &mut buf);
    coin.absorb(&buf);
    let q0s = match coin.queries(schedule.n(), proof.queries.len(), proof.sampling()) {
        Ok(q) => q,
        Err(_) => return Err(VerifyError::Malformed("too many distinct queries".into())),
    };
    for (rep, (q, &q0)) in proof.queries.iter().zip(&q0s).enumerate() {
        if q.q0 as usize != q0 {
            return Ok((VerifierDecision::reject(0, RejectKind::ChallengeMismatch, Some(rep)), reads));
        }
    }

    let final_table = match &proof.final_payload {
        FinalPayload::Table(v) => {
            reads[r] += v.len();
            if !final_in_code(schedule, &proof.final_payload) {
                return Ok((VerifierDecision::reject(r, RejectKind::Final, None), reads));
            }
            Some(v.as_slice())
        }
        FinalPayload::Constant(_) => None,
    };
    let powers = powers_for(ops, schedule, &proof.challenges);
    for (rep, q) in proof.queries.iter().enumerate() {
        let inner = TranscriptReader { field, roots: &proof.roots, sizes: &schedule.sizes, query: q, final_table };
        let mut reader = CountingReader::new(inner, r);
        let res = query_test(ops, schedule, &powers, &proof.final_payload, q.q0 as usize, &mut reader);
        for (a, b) in reads.iter_mut().zip(&reader.reads[..r]) {
            *a += b;
        }
        // entries of f^(r) were already counted with the table
        if let Err((round, kind)) = res {
            return Ok((VerifierDecision::reject(round, kind, Some(rep)), reads));
        }
    }
    Ok((VerifierDecision::accept(), reads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_field;
    use crate::curves::{DomainSelection, KummerCurve};
    use crate::foldplan::{plan_kummer, PlanOptions};
    use crate::rrbasis::Divisor;

    fn f4_schedule() -> Schedule {
        let f = make_field(2, 2).unwrap();
        let c = KummerCurve::new(&f, 3, vec![f.elem(0), f.elem(1)]).unwrap();
        let plan =
            plan_kummer(&c, &Divisor::at_infinity(0, 3), &DomainSelection::All, &PlanOptions::default()).unwrap();
        Schedule::new(&plan)
    }

    #[test]
    fn merkle_open_all() {
        let f = make_field(17, 1).unwrap();
        let vals: Vec<Fe> = (0..11).map(|i| f.elem(i)).collect();
        let tree = MerkleTree::commit(&f, 3, &vals);
        for (i, &v) in vals.iter().enumerate() {
            let p = tree.open(i).unwrap();
            assert!(verify_path(&f, 3, &tree.root(), 11, i, v, &p).is_ok());
            let mut bad = p.clone();
            bad[1][0] ^= 1;
            assert_eq!(verify_path(&f, 3, &tree.root(), 11, i, v, &bad), Err(CommitError::BadPath));
            assert!(verify_path(&f, 4, &tree.root(), 11, i, v, &p).is_err());
        }
        assert!(tree.open(11).is_err());
        let mut other = vals.clone();
        other[5] = f.elem(16);
        assert_ne!(MerkleTree::commit(&f, 3, &other).root(), tree.root());
    }

    #[test]
    fn zero_word_folds_to_zero() {
        let s = f4_schedule();
        let mut coins = Coins::new(CoinMode::Seeded(1), &s.digest());
        let st = commit_phase(&s, &vec![s.field.zero(); s.n()], FinalMode::Constant, &mut coins).unwrap();
        assert!(st.oracles.iter().flatten().all(|&v| v == s.field.zero()));
        assert_eq!(st.final_payload, FinalPayload::Constant(s.field.zero()));
    }

    #[test]
    fn proof_bytes_roundtrip() {
        let s = f4_schedule();
        let word = vec![s.field.one(); s.n()];
        for cfg in [
            ProtocolConfig::new(CoinMode::FiatShamir, 4),
            ProtocolConfig {
                final_mode: FinalMode::Membership,
                sampling: Sampling::WithoutReplacement,
                ..ProtocolConfig::new(CoinMode::Seeded(9), 3)
            },
        ] {
            let proof = prove(&s, &word, &cfg).unwrap();
            let bytes = proof.to_bytes(&s.field);
            assert_eq!(ProofTranscript::from_bytes(&bytes, &s).unwrap(), proof);
            assert!(verify(&s, &proof, cfg.coins).unwrap().accept);
            assert_eq!(ProofTranscript::from_bytes(&bytes[..bytes.len() - 1], &s), Err(VerifyError::Truncated));
        }
    }
}
