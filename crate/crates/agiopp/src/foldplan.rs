//! Folding plans: the chain of codes C_0, C_1, ..., C_r with their split
//! divisors, partition functions mu_i and balancing functions nu_{i+1,j},
//! plus the Reed-Solomon tail that folds down to a constant.
//!
//! Level i holds C_i = C(X_i, P_i, D_i); fold step i maps oracles on P_i to
//! oracles on P_{i+1}. All per-point data the protocol needs (fibers, mu
//! values, nu values, interpolation matrices) is tabulated here once.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{inverse_vandermonde, AlgebraError, Embedding, Fe, Field};
use crate::curves::{
    kummer_domain, tower_domain, tower_genus, Curve, CurveError, CurvePoint, DomainSelection, EvalDomain, KummerCurve,
    TowerCurve,
};
use crate::rrbasis::{
    basis_for, evaluate_basis_function, floor_divisor, tower_weight, BasisFunction, Divisor, GeneratorMatrix,
    LinearCode, Place, RrError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Kummer,
    Tower,
    Rs,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Kummer => "kummer",
            Family::Tower => "tower",
            Family::Rs => "rs",
        })
    }
}

/// The requirement a plan check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    FreeAction,
    GroupSize,
    PartitionFunction,
    Partition,
    SplitBound,
    Balancing,
    Injective,
    Congruence,
    Divisibility,
    Alphabet,
    Rate,
    FinalDimension,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::FreeAction => "free action (every fiber has exactly p_i points)",
            Clause::GroupSize => "group size (|G| > n^e)",
            Clause::PartitionFunction => "partition function (mu_i injective on every fiber)",
            Clause::Partition => "partition (L(D_i) splits as sum of mu_i^j L(E_{i,j}) o pi_i)",
            Clause::SplitBound => "split divisors (E_{i,j} <= D_{i+1})",
            Clause::Balancing => "balancing functions (poles of nu_{i+1,j} equal D_{i+1} - E_{i,j})",
            Clause::Injective => "injective encoding (deg D_i < n_i)",
            Clause::Congruence => "compatible divisors (m = -1 mod N)",
            Clause::Divisibility => "compatible divisors (N divides every coefficient of D_0)",
            Clause::Alphabet => "alphabet (N divides |F| - 1)",
            Clause::Rate => "Reed-Solomon rate below 1",
            Clause::FinalDimension => "last code has dimension 1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("{clause} fails: {detail}")]
    Violation { clause: Clause, detail: String },
    #[error("bottom Reed-Solomon code has d_0 = {d0} on n_0 = {n0} points, so its rate is not below 1; the degree recursion bound gives d_0 + 1 <= {bound}")]
    DegenerateRate { d0: i64, n0: usize, bound: String },
    #[error("tail domain of size {size} has no fixed-point-free involution x -> -x - c")]
    TailDomain { size: usize },
    #[error("{0}")]
    Parameter(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Rr(#[from] RrError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl PlanError {
    pub fn clause(&self) -> Option<Clause> {
        match self {
            PlanError::Violation { clause, .. } => Some(*clause),
            PlanError::DegenerateRate { .. } => Some(Clause::Rate),
            _ => None,
        }
    }
}

fn violation(clause: Clause, detail: impl Into<String>) -> PlanError {
    PlanError::Violation { clause, detail: detail.into() }
}

// ============================================================================
// Functions attached to a fold
// ============================================================================

/// Partition function mu_i, read off the source point's coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MuFn {
    /// y on a Kummer curve.
    Y,
    /// x_i, the last coordinate on tower level i.
    TowerTop(usize),
    /// x on the line.
    X,
}

impl MuFn {
    pub fn eval(&self, coords: &[Fe]) -> Fe {
        match self {
            MuFn::Y => coords[1],
            MuFn::TowerTop(_) => *coords.last().unwrap(),
            MuFn::X => coords[0],
        }
    }
}

/// Quotient map pi_i on coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjFn {
    /// (x, y) -> (x, y^p); with `to_line` the image is the line point x.
    KummerPower { p: u64, to_line: bool },
    /// Drop the last tower coordinate.
    TowerDrop,
    /// x -> x^2 + c x on the line.
    Quadratic { c: Fe },
}

impl ProjFn {
    pub fn apply(&self, field: &Field, coords: &[Fe]) -> Vec<Fe> {
        match self {
            ProjFn::KummerPower { to_line: true, .. } => vec![coords[0]],
            ProjFn::KummerPower { p, .. } => vec![coords[0], field.pow(coords[1], *p as u128)],
            ProjFn::TowerDrop => coords[..coords.len() - 1].to_vec(),
            ProjFn::Quadratic { c } => {
                let x = coords[0];
                vec![field.add(field.square(x), field.mul(*c, x))]
            }
        }
    }
}

/// Balancing function nu_{i+1,j} on the target level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NuFn {
    /// (x - root)^exp.
    RootPower { root: Fe, exp: u64 },
    /// prod x_k^{exps[k]}; on the line a single exponent.
    Monomial { exps: Vec<u64> },
}

impl NuFn {
    pub fn eval(&self, field: &Field, coords: &[Fe]) -> Fe {
        match self {
            NuFn::RootPower { root, exp } => field.pow(field.sub(coords[0], *root), *exp as u128),
            NuFn::Monomial { exps } => {
                exps.iter().zip(coords).fold(field.one(), |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u128)))
            }
        }
    }

    /// Pole divisor on the given curve.
    pub fn pole_divisor(&self, curve: &Curve, level: usize) -> Result<Divisor, PlanError> {
        let order = match (self, curve) {
            (NuFn::RootPower { exp, .. }, Curve::Kummer(c)) => *exp as i64 * c.n_level() as i64,
            (NuFn::RootPower { exp, .. }, Curve::Line(_)) => *exp as i64,
            (NuFn::Monomial { exps }, Curve::Tower(c)) => {
                exps.iter().enumerate().map(|(k, &a)| a as i64 * tower_weight(c.q(), c.level(), k) as i64).sum()
            }
            (NuFn::Monomial { exps }, Curve::Line(_)) if exps.len() == 1 => exps[0] as i64,
            _ => return Err(PlanError::Parameter("balancing function does not live on this curve".into())),
        };
        Ok(Divisor::at_infinity(level, order))
    }
}

/// Functions with a known principal divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementaryFn {
    /// y on a Kummer curve.
    Y,
    /// x - alpha_l on a Kummer curve (0-based l).
    XMinusRoot(usize),
    /// Tower coordinate x_j.
    TowerCoord(usize),
}

/// div(y) = P_1 + ... + P_m - m P_inf and div(x - alpha_l) = N_i (P_l - P_inf) on
/// Kummer level i; div(x_i) = (q+1)^i (P^{(i)} - P_inf) on tower level i.
pub fn principal_divisor(curve: &Curve, f: ElementaryFn) -> Result<Divisor, PlanError> {
    let unsupported = || PlanError::Parameter(format!("no principal divisor for {f:?} on this curve"));
    match (curve, f) {
        (Curve::Kummer(c), ElementaryFn::Y) => {
            let d = (0..c.m()).fold(Divisor::zero(c.level()), |d, l| d.with(Place::Root(l), 1));
            Ok(d.with(Place::Infinity, -(c.m() as i64)))
        }
        (Curve::Kummer(c), ElementaryFn::XMinusRoot(l)) if l < c.m() => {
            let n = c.n_level() as i64;
            Ok(Divisor::zero(c.level()).with(Place::Root(l), n).with(Place::Infinity, -n))
        }
        (Curve::Tower(c), ElementaryFn::TowerCoord(j)) if j == c.level() => {
            let w = tower_weight(c.q(), c.level(), j) as i64;
            Ok(Divisor::zero(c.level()).with(Place::Origin, w).with(Place::Infinity, -w))
        }
        _ => Err(unsupported()),
    }
}

/// Valuation at the place at infinity.
pub fn valuation_at_infinity(curve: &Curve, f: ElementaryFn) -> Result<i64, PlanError> {
    match (curve, f) {
        (Curve::Tower(c), ElementaryFn::TowerCoord(j)) if j <= c.level() => {
            Ok(-(tower_weight(c.q(), c.level(), j) as i64))
        }
        _ => Ok(principal_divisor(curve, f)?.coeff(Place::Infinity)),
    }
}

// ============================================================================
// Levels and steps
// ============================================================================

/// One code C_i of the chain.
#[derive(Debug, Clone)]
pub struct Level {
    pub curve: Curve,
    pub domain: EvalDomain,
    pub divisor: Divisor,
    pub basis: Vec<BasisFunction>,
    /// Part of the Reed-Solomon tail (not the level where the tail starts).
    pub tail: bool,
    generator: OnceLock<Result<GeneratorMatrix, RrError>>,
    code: OnceLock<Result<LinearCode, RrError>>,
}

impl Level {
    pub fn new(curve: Curve, domain: EvalDomain, divisor: Divisor, tail: bool) -> Result<Level, PlanError> {
        let basis = basis_for(&curve, &divisor)?;
        Ok(Level { curve, domain, divisor, basis, tail, generator: OnceLock::new(), code: OnceLock::new() })
    }
    pub fn n(&self) -> usize {
        self.domain.len()
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn degree(&self) -> i64 {
        self.divisor.degree()
    }
    /// 1 - deg D_i / n_i, a lower bound on the relative distance (exact for
    /// Kummer and Reed-Solomon levels).
    pub fn distance_bound(&self) -> Ratio<i64> {
        Ratio::new(self.n() as i64 - self.degree().max(0), self.n() as i64)
    }
    pub fn rate(&self) -> Ratio<i64> {
        Ratio::new(self.dim() as i64, self.n() as i64)
    }
    /// Evaluations of the basis on the domain, built on first use.
    pub fn generator(&self) -> Result<&GeneratorMatrix, RrError> {
        self.generator
            .get_or_init(|| GeneratorMatrix::new(&self.curve, &self.basis, &self.domain))
            .as_ref()
            .map_err(Clone::clone)
    }
    pub fn code(&self) -> Result<&LinearCode, RrError> {
        self.code
            .get_or_init(|| {
                let g = self.generator()?;
                Ok(LinearCode::from_rows(&g.field, g.n, &g.rows))
            })
            .as_ref()
            .map_err(Clone::clone)
    }
    pub fn encode(&self, message: &[Fe]) -> Result<Vec<Fe>, RrError> {
        self.generator()?.encode(message)
    }
    pub fn describe(&self) -> String {
        match &self.curve {
            Curve::Kummer(c) => format!("kummer y^{} = f(x), deg f = {}", c.n_level(), c.m()),
            Curve::Tower(c) => format!("tower level {} (q = {})", c.level(), c.q()),
            Curve::Line(_) => "line".to_string(),
        }
    }
}

/// Everything about fold step i: P_i -> P_{i+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldStep {
    pub arity: usize,
    pub mu: MuFn,
    pub projection: ProjFn,
    /// E_{i,0}, ..., E_{i,p-1} on level i+1.
    pub split: Vec<Divisor>,
    pub nu: Vec<NuFn>,
    /// Target t has fiber `fibers[t*p..(t+1)*p]` (source indices, ascending).
    pub fibers: Vec<u32>,
    /// Source index -> target index.
    pub fiber_of: Vec<u32>,
    /// mu_i at every source point.
    pub mu_values: Vec<Fe>,
    /// nu_{i+1,j} at target t is `nu_table[t*p + j]`.
    pub nu_table: Vec<Fe>,
    /// Arity 2: 1/(mu_a - mu_b) per target. Otherwise the p x p inverse
    /// Vandermonde matrix of the fiber's mu values per target, row-major.
    pub interp: Vec<Fe>,
}

impl FoldStep {
    pub fn n_in(&self) -> usize {
        self.fiber_of.len()
    }
    pub fn n_out(&self) -> usize {
        self.fibers.len() / self.arity
    }
    pub fn fiber(&self, t: usize) -> &[u32] {
        &self.fibers[t * self.arity..(t + 1) * self.arity]
    }

    /// The same tables over an extension field.
    pub fn lift(&self, e: &Embedding) -> FoldStep {
        let map = |v: &[Fe]| v.iter().map(|&x| e.map(x)).collect::<Vec<_>>();
        FoldStep {
            mu_values: map(&self.mu_values),
            nu_table: map(&self.nu_table),
            interp: map(&self.interp),
            ..self.clone()
        }
    }
}

fn build_step(
    source: &Level,
    target: &EvalDomain,
    projection: ProjFn,
    mu: MuFn,
    arity: usize,
    split: Vec<Divisor>,
    nu: Vec<NuFn>,
) -> Result<FoldStep, PlanError> {
    let field = source.curve.field().clone();
    let n_out = target.len();
    if source.n() != arity * n_out {
        return Err(violation(
            Clause::FreeAction,
            format!("|P_i| = {} is not {} x |P_(i+1)| = {}", source.n(), arity, n_out),
        ));
    }
    let mut groups: Vec<Vec<u32>> = vec![Vec::with_capacity(arity); n_out];
    let mut fiber_of = Vec::with_capacity(source.n());
    for (s, p) in source.domain.points().iter().enumerate() {
        let image = projection.apply(&field, &p.coords);
        let t = target
            .index_of(&image)
            .ok_or_else(|| violation(Clause::FreeAction, format!("image of point {s} is not in P_(i+1)")))?;
        groups[t].push(s as u32);
        fiber_of.push(t as u32);
    }
    if let Some((t, g)) = groups.iter().enumerate().find(|(_, g)| g.len() != arity) {
        return Err(violation(Clause::FreeAction, format!("fiber over target {t} has {} points", g.len())));
    }
    let mu_values: Vec<Fe> = source.domain.points().iter().map(|p| mu.eval(&p.coords)).collect();
    let mut nu_table = Vec::with_capacity(n_out * arity);
    for p in target.points() {
        for f in &nu {
            nu_table.push(f.eval(&field, &p.coords));
        }
    }
    let mut interp = Vec::new();
    for (t, g) in groups.iter().enumerate() {
        let xs: Vec<Fe> = g.iter().map(|&s| mu_values[s as usize]).collect();
        let distinct: HashSet<Fe> = xs.iter().copied().collect();
        if distinct.len() != arity {
            return Err(violation(Clause::PartitionFunction, format!("mu repeats a value on the fiber over {t}")));
        }
        if arity == 2 {
            interp.push(field.inv(field.sub(xs[0], xs[1])).unwrap());
        } else {
            interp.extend(inverse_vandermonde(&field, &xs)?.into_iter().flatten());
        }
    }
    Ok(FoldStep { arity, mu, projection, split, nu, fibers: groups.concat(), fiber_of, mu_values, nu_table, interp })
}

// ============================================================================
// The plan
// ============================================================================

/// Degree data of a tower plan, indexed by tower level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerInfo {
    pub q: u64,
    pub top: usize,
    pub degrees: Vec<i64>,
    pub rule: DegreeRule,
    /// Upper bound on d_0 + 1 from the closed-form degree bound.
    pub rate_bound_numerator: String,
}

#[derive(Debug, Clone)]
pub struct FoldingPlan {
    pub family: Family,
    pub field: Field,
    pub levels: Vec<Level>,
    pub steps: Vec<FoldStep>,
    /// Number of fold steps before the Reed-Solomon tail.
    pub ag_steps: usize,
    /// e in |G| > n^e, as a fraction.
    pub group_exponent: (u32, u32),
    pub tower: Option<TowerInfo>,
    digest: [u8; 32],
}

/// Knobs shared by all planners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub group_exponent: (u32, u32),
    /// Append the Reed-Solomon tail down to a constant.
    pub tail: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { group_exponent: (1, 2), tail: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub index: usize,
    pub curve: String,
    pub n: usize,
    pub k: usize,
    pub degree: i64,
    pub distance_bound: String,
    pub rate: String,
    pub arity: Option<usize>,
    pub tail: bool,
}

impl FoldingPlan {
    fn finish(
        family: Family,
        field: Field,
        levels: Vec<Level>,
        steps: Vec<FoldStep>,
        ag_steps: usize,
        options: &PlanOptions,
        tower: Option<TowerInfo>,
    ) -> FoldingPlan {
        let mut plan = FoldingPlan {
            family,
            field,
            levels,
            steps,
            ag_steps,
            group_exponent: options.group_exponent,
            tower,
            digest: [0; 32],
        };
        plan.digest = plan.compute_digest();
        plan
    }

    fn compute_digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"agiopp-plan");
        h.update(self.family.to_string().as_bytes());
        h.update(self.field.spec().to_bytes());
        let mut buf = Vec::new();
        for l in &self.levels {
            h.update((l.n() as u64).to_le_bytes());
            h.update(serde_json::to_vec(&l.divisor).unwrap());
            h.update(serde_json::to_vec(&l.basis).unwrap());
            buf.clear();
            for p in l.domain.points() {
                for &c in &p.coords {
                    self.field.write_bytes(c, &mut buf);
                }
            }
            h.update(&buf);
        }
        for s in &self.steps {
            h.update((s.arity as u64).to_le_bytes());
            buf.clear();
            for &t in &s.fiber_of {
                buf.extend_from_slice(&t.to_le_bytes());
            }
            for &v in s.mu_values.iter().chain(&s.nu_table) {
                self.field.write_bytes(v, &mut buf);
            }
            h.update(&buf);
        }
        h.finalize().into()
    }

    pub fn digest(&self) -> [u8; 32] {
        self.digest
    }
    /// Block length n = |P_0|.
    pub fn n(&self) -> usize {
        self.levels[0].n()
    }
    pub fn rounds(&self) -> usize {
        self.steps.len()
    }
    pub fn p_max(&self) -> usize {
        self.steps.iter().map(|s| s.arity).max().unwrap_or(1)
    }
    /// min_i of the per-level distance bounds.
    pub fn lambda(&self) -> Ratio<i64> {
        self.levels.iter().map(Level::distance_bound).min().unwrap()
    }
    /// lambda over the first `rounds + 1` levels.
    pub fn lambda_upto(&self, rounds: usize) -> Ratio<i64> {
        self.levels[..=rounds].iter().map(Level::distance_bound).min().unwrap()
    }
    /// Field elements sent after f^{(0)}: sum over i >= 1 of n_i.
    pub fn proof_length(&self) -> usize {
        self.levels[1..].iter().map(Level::n).sum()
    }
    /// Order of the acting group, the product of all arities.
    pub fn group_order(&self) -> BigUint {
        self.steps.iter().fold(BigUint::from(1u32), |acc, s| acc * s.arity)
    }
    pub fn summaries(&self) -> Vec<LevelSummary> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| LevelSummary {
                index: i,
                curve: l.describe(),
                n: l.n(),
                k: l.dim(),
                degree: l.degree(),
                distance_bound: l.distance_bound().to_string(),
                rate: l.rate().to_string(),
                arity: self.steps.get(i).map(|s| s.arity),
                tail: l.tail,
            })
            .collect()
    }
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} plan over F_{}: n = {}, {} rounds ({} AG), p_max = {}, lambda = {}\n",
            self.family,
            self.field.size(),
            self.n(),
            self.rounds(),
            self.ag_steps,
            self.p_max(),
            self.lambda()
        );
        for s in self.summaries() {
            out.push_str(&format!(
                "  C_{} [{}, {}] deg D = {} delta >= {} rate {}{}  {}\n",
                s.index,
                s.n,
                s.k,
                s.degree,
                s.distance_bound,
                s.rate,
                s.arity.map(|p| format!(" --{p}-->")).unwrap_or_default(),
                s.curve
            ));
        }
        out
    }
}

// ============================================================================
// Reed-Solomon tail
// ============================================================================

/// Smallest c (by index) such that x -> -x - c maps the set to itself with no
/// fixed point. Candidates are -x_0 - y for y in the set.
pub fn tail_involution(field: &Field, xs: &[Fe]) -> Option<Fe> {
    let x0 = *xs.first()?;
    let set: HashSet<Fe> = xs.iter().copied().collect();
    let mut cands: Vec<Fe> = xs.iter().map(|&y| field.sub(field.neg(x0), y)).collect();
    cands.sort();
    cands.dedup();
    cands.into_iter().find(|&c| {
        xs.iter().all(|&x| {
            let y = field.sub(field.neg(x), c);
            y != x && set.contains(&y)
        })
    })
}

/// Appends tail levels to a chain ending in a line level with a one-point
/// divisor: D_{i+1} = floor(d_i/2) P_inf, E_{i,0} = floor(d_i/2),
/// E_{i,1} = floor((d_i - 1)/2), nu_0 = 1, nu_1 = x^{D_{i+1} - E_{i,1}}.
fn append_tail(levels: &mut Vec<Level>, steps: &mut Vec<FoldStep>) -> Result<(), PlanError> {
    loop {
        let last = levels.last().unwrap();
        let field = last.curve.field().clone();
        if !matches!(last.curve, Curve::Line(_)) || !last.divisor.is_one_point() {
            return Err(PlanError::Parameter("the tail starts from a line level with a one-point divisor".into()));
        }
        let d = last.degree();
        if d <= 0 {
            return Ok(());
        }
        let xs: Vec<Fe> = last.domain.points().iter().map(|p| p.x()).collect();
        let c = tail_involution(&field, &xs).ok_or(PlanError::TailDomain { size: xs.len() })?;
        let proj = ProjFn::Quadratic { c };
        let image: Vec<CurvePoint> = xs.iter().map(|&x| CurvePoint::affine(0, proj.apply(&field, &[x]))).collect();
        let target = EvalDomain::new(image);
        let idx = levels.len();
        let d1 = d.div_euclid(2);
        let e1 = (d - 1).div_euclid(2);
        let split = vec![Divisor::at_infinity(idx, d1), Divisor::at_infinity(idx, e1)];
        let nu = vec![NuFn::Monomial { exps: vec![0] }, NuFn::Monomial { exps: vec![(d1 - e1) as u64] }];
        let curve = Curve::Line(field.clone());
        let step = build_step(last, &target, proj, MuFn::X, 2, split, nu)?;
        let next = Level::new(curve, target, Divisor::at_infinity(idx, d1), true)?;
        steps.push(step);
        levels.push(next);
    }
}

/// Number of tail folds needed from degree d: floor(log2 d) + 1, or 0 for d = 0.
pub fn tail_length(d: u64) -> usize {
    if d == 0 {
        0
    } else {
        64 - d.leading_zeros() as usize
    }
}

/// A Reed-Solomon plan on the given line points, folded down to a constant.
pub fn plan_rs(field: &Field, xs: &[Fe], d: i64, options: &PlanOptions) -> Result<FoldingPlan, PlanError> {
    let domain = EvalDomain::new(xs.iter().map(|&x| CurvePoint::affine(0, vec![x])).collect());
    if domain.len() != xs.len() {
        return Err(PlanError::Parameter("evaluation points must be distinct".into()));
    }
    if d < 0 || d as usize >= domain.len() {
        return Err(violation(Clause::Injective, format!("d = {d} with n = {}", domain.len())));
    }
    let mut levels = vec![Level::new(Curve::Line(field.clone()), domain, Divisor::at_infinity(0, d), false)?];
    let mut steps = Vec::new();
    if options.tail {
        append_tail(&mut levels, &mut steps)?;
    }
    Ok(FoldingPlan::finish(Family::Rs, field.clone(), levels, steps, 0, options, None))
}

/// The n field elements of smallest index. For n a power of p this is an
/// additive subgroup.
pub fn rs_domain_subspace(field: &Field, n: usize) -> Vec<Fe> {
    (0..n as u128).map(|i| field.elem(i)).collect()
}

/// The multiplicative subgroup of order n.
pub fn rs_domain_subgroup(field: &Field, n: usize) -> Result<Vec<Fe>, PlanError> {
    let g = crate::algebra::primitive_root_of_unity(field, n as u128)?;
    let mut out = Vec::with_capacity(n);
    let mut x = field.one();
    for _ in 0..n {
        out.push(x);
        x = field.mul(x, g);
    }
    out.sort();
    Ok(out)
}

// ============================================================================
// Kummer plans
// ============================================================================

/// Checks made before any curve is built, in this order: m = -1 mod N, N
/// divides the coefficients of D_0, N divides |F| - 1.
pub fn check_kummer_parameters(field: &Field, n: u64, m: usize, d0: &Divisor) -> Result<(), PlanError> {
    if (m as u64 + 1) % n != 0 {
        return Err(violation(Clause::Congruence, format!("m = {m} is not congruent to -1 mod N = {n}")));
    }
    for (place, c) in d0.terms() {
        if matches!(place, Place::Origin) || matches!(place, Place::Root(l) if l >= m) {
            return Err(PlanError::Rr(RrError::UnsupportedPlace(place)));
        }
        if c % n as i64 != 0 {
            return Err(violation(
                Clause::Divisibility,
                format!("coefficient {c} at {place:?} is not divisible by N = {n}"),
            ));
        }
    }
    if (field.size() - 1) % n as u128 != 0 {
        return Err(violation(Clause::Alphabet, format!("N = {n} does not divide |F| - 1 = {}", field.size() - 1)));
    }
    Ok(())
}

/// Plan for C(X_0, P_0, D_0) on y^N = f(x): D_{i+1} = D_i / p_i,
/// E_{i,j} = floor((D_i + j div(y)) / p_i), nu_{i+1,j} = (x - alpha_1)^{kappa_i j}
/// with kappa_i = (m+1)/N_i, then the Reed-Solomon tail when D_s is one-point.
pub fn plan_kummer(
    curve: &KummerCurve,
    d0: &Divisor,
    selection: &DomainSelection,
    options: &PlanOptions,
) -> Result<FoldingPlan, PlanError> {
    let field = curve.field().clone();
    let n = curve.n_total();
    let m = curve.m();
    check_kummer_parameters(&field, n, m, d0)?;
    let base = curve.at_level(0);
    let domain = kummer_domain(&base, selection)?;
    if d0.degree() >= domain.len() as i64 {
        return Err(violation(Clause::Injective, format!("deg D_0 = {} >= n_0 = {}", d0.degree(), domain.len())));
    }
    let s = base.levels();
    let one_point_end = d0.is_one_point();
    let mut levels = vec![Level::new(Curve::Kummer(base.clone()), domain, d0.clone().relevel(0), false)?];
    let mut steps = Vec::new();
    let alpha = base.roots()[0];
    for i in 0..s {
        let src_curve = base.at_level(i);
        let p = src_curve.primes()[i];
        let n_i = src_curve.n_level();
        let kappa = (m as u64 + 1) / n_i;
        let to_line = i + 1 == s && one_point_end;
        let target_curve = if to_line { Curve::Line(field.clone()) } else { Curve::Kummer(base.at_level(i + 1)) };
        let d_i = levels[i].divisor.clone();
        let d_next = floor_divisor(&d_i, p as i64).relevel(i + 1);
        let div_y = principal_divisor(&Curve::Kummer(src_curve.clone()), ElementaryFn::Y)?;
        let split: Vec<Divisor> = (0..p as i64)
            .map(|j| {
                let e = floor_divisor(&d_i.add(&div_y.scale(j)), p as i64).relevel(i + 1);
                if to_line {
                    // on the line the fixed places P_l are the points x = alpha_l; the
                    // floor leaves them with coefficient 0 for one-point D_i
                    e.terms()
                        .filter(|(pl, _)| *pl == Place::Infinity)
                        .fold(Divisor::zero(i + 1), |a, (pl, c)| a.with(pl, c))
                } else {
                    e
                }
            })
            .collect();
        let nu: Vec<NuFn> = (0..p).map(|j| NuFn::RootPower { root: alpha, exp: kappa * j }).collect();
        let proj = ProjFn::KummerPower { p, to_line };
        let image: Vec<CurvePoint> = levels[i]
            .domain
            .points()
            .iter()
            .map(|pt| CurvePoint::affine(i + 1, proj.apply(&field, &pt.coords)))
            .collect();
        let target = EvalDomain::new(image);
        let step = build_step(&levels[i], &target, proj, MuFn::Y, p as usize, split, nu)?;
        let next = Level::new(target_curve, target, d_next, false)?;
        steps.push(step);
        levels.push(next);
    }
    let ag_steps = steps.len();
    if options.tail && one_point_end {
        append_tail(&mut levels, &mut steps)?;
    }
    Ok(FoldingPlan::finish(Family::Kummer, field, levels, steps, ag_steps, options, None))
}

// ============================================================================
// Hermitian tower plans
// ============================================================================

/// How d_{i-1} is derived from d_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeRule {
    /// d_{i-1} = floor(d_i / q) + 2 g_{i-1}.
    #[default]
    GenusBump,
    /// d_{i-1} = floor(d_i / q), which breaks compatibility from level 2 on.
    Floor,
}

/// d_0, ..., d_top indexed by tower level.
pub fn tower_degrees(q: u64, top: usize, d_top: i64, rule: DegreeRule) -> Vec<i64> {
    let mut d = vec![0i64; top + 1];
    d[top] = d_top;
    for i in (1..=top).rev() {
        let bump = match rule {
            DegreeRule::GenusBump => 2 * tower_genus(q as u128, i as u32 - 1) as i64,
            DegreeRule::Floor => 0,
        };
        d[i - 1] = d[i].div_euclid(q as i64) + bump;
    }
    d
}

/// deg E_{i,j} = floor((d_i - j (q+1)^i) / q) on level i - 1.
pub fn split_degree(q: u64, level: usize, d: i64, j: u64) -> i64 {
    (d - j as i64 * (q as i64 + 1).pow(level as u32)).div_euclid(q as i64)
}

/// Writes m = sum_k a_k q^{i-1-k} (q+1)^k with a_k <= q - 1 for k >= 1, taking
/// the largest generator first and backtracking.
pub fn semigroup_representation(q: u64, level: usize, m: i64) -> Option<Vec<u64>> {
    if m < 0 || level == 0 {
        return None;
    }
    let lower = level - 1;
    let w: Vec<i64> = (0..=lower).map(|k| tower_weight(q, lower, k) as i64).collect();
    let mut exps = vec![0u64; lower + 1];
    fn rec(k: usize, rest: i64, q: u64, w: &[i64], exps: &mut [u64]) -> bool {
        if k == 0 {
            if rest % w[0] == 0 {
                exps[0] = (rest / w[0]) as u64;
                return true;
            }
            return false;
        }
        let top = ((rest / w[k]) as u64).min(q - 1);
        for a in (0..=top).rev() {
            exps[k] = a;
            if rec(k - 1, rest - a as i64 * w[k], q, w, exps) {
                return true;
            }
        }
        exps[k] = 0;
        false
    }
    rec(lower, m, q, &w, &mut exps).then_some(exps)
}

/// Exponents of nu_{i,j} = prod x_k^{a_k} on level i - 1, whose pole order is
/// m_{i,j} = d_{i-1} - floor((d_i - j (q+1)^i) / q).
pub fn balancing_exponents(q: u64, level: usize, j: u64, d_i: i64, d_prev: i64) -> Result<Vec<u64>, PlanError> {
    let m = d_prev - split_degree(q, level, d_i, j);
    if m < 0 {
        return Err(violation(
            Clause::SplitBound,
            format!("level {level}, j = {j}: E has degree {} > d_(i-1) = {d_prev}", split_degree(q, level, d_i, j)),
        ));
    }
    semigroup_representation(q, level, m).ok_or_else(|| {
        violation(
            Clause::Balancing,
            format!("level {level}, j = {j}: pole order {m} is a gap of the Weierstrass semigroup at infinity"),
        )
    })
}

/// Balancing exponents for every j at tower level `level`.
pub fn check_compatibility(q: u64, level: usize, d_i: i64, d_prev: i64) -> Result<Vec<Vec<u64>>, PlanError> {
    (0..q).map(|j| balancing_exponents(q, level, j, d_i, d_prev)).collect()
}

/// Closed-form bound on d_0 + 1: floor(d_top / q^top) + (top-1)(1 + top(3q-4+2 top)/6) + 1.
pub fn rate_bound_numerator(q: u64, top: usize, d_top: i64) -> Ratio<i128> {
    let (q, t) = (q as i128, top as i128);
    let lead = (d_top as i128).div_euclid(q.pow(top as u32));
    Ratio::from_integer(lead + 1) + Ratio::new((t - 1) * (6 + t * (3 * q - 4 + 2 * t)), 6)
}

/// Bound on d_{top-j}: floor(d_top/q^j) + sum_k floor(2 g_{top-k} / q^{j-k}) + (j - 1).
pub fn degree_bound(q: u64, top: usize, d_top: i64, j: usize) -> i64 {
    let qq = q as i64;
    let mut b = d_top.div_euclid(qq.pow(j as u32)) + j as i64 - 1;
    for k in 1..=j {
        b += (2 * tower_genus(q as u128, (top - k) as u32) as i64).div_euclid(qq.pow((j - k) as u32));
    }
    b
}

/// Plan for C(X_top, P, d_top P_inf) on the Hermitian tower over F_{q^2}, where
/// P is the preimage of `p0` (default: the whole affine line).
pub fn plan_tower(
    field: &Field,
    q: u64,
    top: usize,
    d_top: i64,
    p0: Option<&[Fe]>,
    rule: DegreeRule,
    options: &PlanOptions,
) -> Result<FoldingPlan, PlanError> {
    if top < 1 || d_top < 1 {
        return Err(PlanError::Parameter("tower plans need top level >= 1 and d >= 1".into()));
    }
    let curve = TowerCurve::new(field, q, top)?;
    let degrees = tower_degrees(q, top, d_top, rule);
    let mut nus = BTreeMap::new();
    for level in (1..=top).rev() {
        nus.insert(level, check_compatibility(q, level, degrees[level], degrees[level - 1])?);
    }
    let line: Vec<Fe> = match p0 {
        Some(xs) => xs.to_vec(),
        None => field.elements().collect(),
    };
    let domain = tower_domain(&curve, &line);
    if d_top >= domain.len() as i64 {
        return Err(violation(Clause::Injective, format!("d = {d_top} >= n = {}", domain.len())));
    }
    let n0 = domain.len() / (q as usize).pow(top as u32);
    let bound = rate_bound_numerator(q, top, d_top);
    if degrees[0] + 1 >= n0 as i64 {
        return Err(PlanError::DegenerateRate { d0: degrees[0], n0, bound: bound.to_string() });
    }
    let level_curve = |l: usize| if l == 0 { Curve::Line(field.clone()) } else { Curve::Tower(curve.at_level(l)) };
    let mut levels = vec![Level::new(level_curve(top), domain, Divisor::at_infinity(0, d_top), false)?];
    let mut steps = Vec::new();
    for l in (1..=top).rev() {
        let t = top - l;
        let target_curve = level_curve(l - 1);
        let image: Vec<CurvePoint> = levels[t]
            .domain
            .points()
            .iter()
            .map(|pt| CurvePoint::affine(l - 1, ProjFn::TowerDrop.apply(field, &pt.coords)))
            .collect();
        let target = EvalDomain::new(image);
        let split: Vec<Divisor> =
            (0..q).map(|j| Divisor::at_infinity(t + 1, split_degree(q, l, degrees[l], j))).collect();
        let nu: Vec<NuFn> = nus[&l].iter().map(|e| NuFn::Monomial { exps: e.clone() }).collect();
        let step = build_step(&levels[t], &target, ProjFn::TowerDrop, MuFn::TowerTop(l), q as usize, split, nu)?;
        let next = Level::new(target_curve, target, Divisor::at_infinity(t + 1, degrees[l - 1]), false)?;
        steps.push(step);
        levels.push(next);
    }
    let ag_steps = steps.len();
    if options.tail {
        append_tail(&mut levels, &mut steps)?;
    }
    let info = TowerInfo { q, top, degrees, rule, rate_bound_numerator: bound.to_string() };
    Ok(FoldingPlan::finish(Family::Tower, field.clone(), levels, steps, ag_steps, options, Some(info)))
}

// ============================================================================
// Table of tower parameters
// ============================================================================

/// One row of the published tower parameter table: q = 2^log_q, top level,
/// initial rate R and the claimed bound 1 - rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerRow {
    pub log_q: u32,
    pub top: usize,
    pub rate: (i64, i64),
    pub one_minus_rho: (i64, i64),
}

pub const TOWER_TABLE: [TowerRow; 9] = [
    TowerRow { log_q: 4, top: 3, rate: (1, 8), one_minus_rho: (1, 3) },
    TowerRow { log_q: 5, top: 5, rate: (1, 8), one_minus_rho: (1, 3) },
    TowerRow { log_q: 4, top: 4, rate: (1, 16), one_minus_rho: (1, 3) },
    TowerRow { log_q: 5, top: 3, rate: (1, 16), one_minus_rho: (3, 4) },
    TowerRow { log_q: 5, top: 5, rate: (1, 16), one_minus_rho: (1, 2) },
    TowerRow { log_q: 6, top: 4, rate: (1, 16), one_minus_rho: (3, 4) },
    TowerRow { log_q: 6, top: 5, rate: (1, 16), one_minus_rho: (2, 3) },
    TowerRow { log_q: 6, top: 7, rate: (1, 16), one_minus_rho: (1, 2) },
    TowerRow { log_q: 4, top: 3, rate: (1, 32), one_minus_rho: (1, 2) },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerRowReport {
    pub row: TowerRow,
    pub q: u64,
    pub log2_n: u32,
    pub genus: u128,
    pub d_top: i64,
    /// Closed-form bound on d_0 + 1.
    pub bound: String,
    /// rho * n_0 with rho = 1 - listed value.
    pub rho_n0: String,
    pub certified: bool,
    /// d_0 from the exact recursion and the exact rate (d_0 + 1) / n_0.
    pub d0: i64,
    pub exact_rate: String,
    pub exact_ok: bool,
}

/// Evaluates one table row: d_top = floor((2 R q / top + 1) g_top), n_0 = q^2,
/// and checks the closed-form bound against rho n_0.
pub fn tower_row(row: &TowerRow) -> TowerRowReport {
    let q = 1u64 << row.log_q;
    let g = tower_genus(q as u128, row.top as u32);
    let (rn, rd) = row.rate;
    let factor = Ratio::new(2 * rn as i128 * q as i128, rd as i128 * row.top as i128) + 1;
    let d_top = (factor * g as i128).floor().to_integer() as i64;
    let n0 = (q * q) as i128;
    let rho = Ratio::from_integer(1) - Ratio::new(row.one_minus_rho.0 as i128, row.one_minus_rho.1 as i128);
    let rho_n0 = rho * n0;
    let bound = rate_bound_numerator(q, row.top, d_top);
    let d0 = tower_degrees(q, row.top, d_top, DegreeRule::GenusBump)[0];
    let exact = Ratio::new(d0 as i128 + 1, n0);
    TowerRowReport {
        row: *row,
        q,
        log2_n: row.log_q * (row.top as u32 + 2),
        genus: g,
        d_top,
        bound: bound.to_string(),
        rho_n0: rho_n0.to_string(),
        certified: bound < rho_n0,
        d0,
        exact_rate: exact.to_string(),
        exact_ok: exact < rho,
    }
}

pub fn tower_table() -> Vec<TowerRowReport> {
    TOWER_TABLE.iter().map(tower_row).collect()
}

// ============================================================================
// Validation
// ============================================================================

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub clause: Clause,
    /// Fold step or level index the check refers to, if any.
    pub at: Option<usize>,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Levels skipped by the evaluation-based checks because they are too large.
    pub skipped: Vec<usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
    fn push(&mut self, clause: Clause, at: Option<usize>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check { clause, at, ok, detail: detail.into() });
    }
}

/// Size limit (n_i times dim) for the evaluation-based partition checks.
pub const DEEP_CHECK_LIMIT: usize = 1 << 16;

/// Checks the foldability requirements of every step. The partition property
/// is checked by evaluation: each mu_i^j (b o pi_i) with b in the basis of
/// L(E_{i,j}) must lie in C_i, and the dimensions of the L(E_{i,j}) must add
/// up to dim L(D_i).
pub fn validate_plan(plan: &FoldingPlan) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let field = &plan.field;
    let (num, den) = plan.group_exponent;
    let g = plan.group_order();
    let n = BigUint::from(plan.n());
    rep.push(Clause::GroupSize, None, g.pow(den) > n.pow(num), format!("|G| = {g}, n = {n}, e = {num}/{den}"));
    for (i, l) in plan.levels.iter().enumerate() {
        rep.push(
            Clause::Injective,
            Some(i),
            l.degree() < l.n() as i64,
            format!("deg D = {}, n = {}", l.degree(), l.n()),
        );
        if l.n() * l.dim().max(1) <= DEEP_CHECK_LIMIT {
            match l.generator() {
                Ok(gm) => {
                    let r = gm.rank();
                    rep.push(Clause::Injective, Some(i), r == l.dim(), format!("generator rank {r}, dim {}", l.dim()));
                }
                Err(e) => rep.push(Clause::Injective, Some(i), false, e.to_string()),
            }
        }
    }
    for (i, s) in plan.steps.iter().enumerate() {
        let src = &plan.levels[i];
        let dst = &plan.levels[i + 1];
        let p = s.arity;
        let mut seen = vec![0usize; s.n_in()];
        let mut sizes_ok = s.fibers.len() == dst.n() * p && src.n() == dst.n() * p;
        for t in 0..s.n_out() {
            for &x in s.fiber(t) {
                seen[x as usize] += 1;
                sizes_ok &= s.fiber_of[x as usize] as usize == t;
            }
        }
        sizes_ok &= seen.iter().all(|&c| c == 1);
        rep.push(Clause::FreeAction, Some(i), sizes_ok, format!("{} fibers of size {p}", s.n_out()));
        let injective = (0..s.n_out()).all(|t| {
            let vals: HashSet<Fe> = s.fiber(t).iter().map(|&x| s.mu_values[x as usize]).collect();
            vals.len() == p
        });
        rep.push(Clause::PartitionFunction, Some(i), injective, "mu distinct on fibers");
        let bounded = s.split.iter().all(|e| e.leq(&dst.divisor.clone().relevel(e.level)));
        rep.push(
            Clause::SplitBound,
            Some(i),
            bounded,
            format!("{:?}", s.split.iter().map(Divisor::degree).collect::<Vec<_>>()),
        );
        for (j, (e, nu)) in s.split.iter().zip(&s.nu).enumerate() {
            let want = dst.divisor.clone().relevel(e.level).sub(e);
            match nu.pole_divisor(&dst.curve, e.level) {
                Ok(got) => rep.push(
                    Clause::Balancing,
                    Some(i),
                    got == want,
                    format!("j = {j}: poles {} vs D - E = {}", got.degree(), want.degree()),
                ),
                Err(err) => rep.push(Clause::Balancing, Some(i), false, err.to_string()),
            }
        }
        let bases: Result<Vec<Vec<BasisFunction>>, RrError> =
            s.split.iter().map(|e| basis_for(&dst.curve, &e.clone().relevel(dst.divisor.level))).collect();
        let bases = match bases {
            Ok(b) => b,
            Err(e) => {
                rep.push(Clause::Partition, Some(i), false, e.to_string());
                continue;
            }
        };
        let total: usize = bases.iter().map(Vec::len).sum();
        rep.push(
            Clause::Partition,
            Some(i),
            total == src.dim(),
            format!("sum dim L(E) = {total}, dim L(D) = {}", src.dim()),
        );
        if src.n() * src.dim().max(1) > DEEP_CHECK_LIMIT {
            rep.skipped.push(i);
            continue;
        }
        let code = match src.code() {
            Ok(c) => c,
            Err(e) => {
                rep.push(Clause::Partition, Some(i), false, e.to_string());
                continue;
            }
        };
        let mut all_in = true;
        let mut span = LinearCode::from_rows(field, src.n(), &[]);
        for (j, basis) in bases.iter().enumerate() {
            for b in basis {
                let mut word = Vec::with_capacity(src.n());
                for x in 0..src.n() {
                    let t = s.fiber_of[x] as usize;
                    let v = evaluate_basis_function(&dst.curve, b, dst.domain.point(t));
                    let mu = field.pow(s.mu_values[x], j as u128);
                    match v {
                        Ok(v) => word.push(field.mul(mu, v)),
                        Err(_) => all_in = false,
                    }
                }
                if word.len() == src.n() {
                    all_in &= code.contains(&word);
                    span.insert(word);
                }
            }
        }
        rep.push(Clause::Partition, Some(i), all_in, "mu^j (b o pi) lies in C_i");
        rep.push(
            Clause::Partition,
            Some(i),
            span.dim() == code.dim(),
            format!("pieces span dimension {} of {}", span.dim(), code.dim()),
        );
    }
    if plan.levels.iter().any(|l| l.tail) {
        let k = plan.levels.last().unwrap().dim();
        rep.push(Clause::FinalDimension, Some(plan.levels.len() - 1), k == 1, format!("dim C_r = {k}"));
    }
    rep
}

// ============================================================================
// Protocol view
// ============================================================================

/// What prover and verifier need for a run: the first `rounds` fold steps,
/// possibly over an extension field, and the last code for the membership test.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub field: Field,
    pub steps: Vec<FoldStep>,
    /// n_0, ..., n_rounds.
    pub sizes: Vec<usize>,
    /// Dimension of C_rounds.
    pub final_dim: usize,
    /// C_rounds, present when small enough to hold.
    pub final_code: Option<LinearCode>,
    /// min distance bound over the levels in use.
    pub lambda: Ratio<i64>,
    digest: [u8; 32],
}

/// Largest n * k for which the final code is materialized.
pub const FINAL_CODE_LIMIT: usize = 1 << 20;

impl Schedule {
    /// Uses the whole plan.
    pub fn new(plan: &FoldingPlan) -> Schedule {
        Schedule::with_rounds(plan, plan.rounds()).unwrap()
    }

    pub fn with_rounds(plan: &FoldingPlan, rounds: usize) -> Result<Schedule, PlanError> {
        if rounds > plan.rounds() {
            return Err(PlanError::Parameter(format!("plan has only {} rounds", plan.rounds())));
        }
        let last = &plan.levels[rounds];
        let final_code =
            if last.n() * last.dim().max(1) <= FINAL_CODE_LIMIT { Some(last.code()?.clone()) } else { None };
        let mut h = Sha256::new();
        h.update(plan.digest());
        h.update((rounds as u32).to_le_bytes());
        h.update(plan.field.spec().to_bytes());
        Ok(Schedule {
            field: plan.field.clone(),
            steps: plan.steps[..rounds].to_vec(),
            sizes: plan.levels[..=rounds].iter().map(Level::n).collect(),
            final_dim: last.dim(),
            final_code,
            lambda: plan.lambda_upto(rounds),
            digest: h.finalize().into(),
        })
    }

    /// Moves every table into a larger field; challenges then come from there.
    pub fn lift(&self, e: &Embedding) -> Schedule {
        let mut h = Sha256::new();
        h.update(self.digest);
        h.update(e.target().spec().to_bytes());
        Schedule {
            field: e.target().clone(),
            steps: self.steps.iter().map(|s| s.lift(e)).collect(),
            sizes: self.sizes.clone(),
            final_dim: self.final_dim,
            final_code: self.final_code.as_ref().map(|c| c.lift(e)),
            lambda: self.lambda,
            digest: h.finalize().into(),
        }
    }

    pub fn digest(&self) -> [u8; 32] {
        self.digest
    }
    pub fn rounds(&self) -> usize {
        self.steps.len()
    }
    pub fn n(&self) -> usize {
        self.sizes[0]
    }
    pub fn p_max(&self) -> usize {
        self.steps.iter().map(|s| s.arity).max().unwrap_or(1)
    }
}
