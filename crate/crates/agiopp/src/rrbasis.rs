//! Divisors on the distinguished places, explicit Riemann-Roch bases and the
//! evaluation codes they generate.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::algebra::{Embedding, Fe, Field};
use crate::curves::{Curve, CurvePoint, EvalDomain, KummerCurve, TowerCurve};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RrError {
    #[error("basis function has a pole at the evaluation point")]
    Pole,
    #[error("divisor place {0:?} is not allowed on this curve")]
    UnsupportedPlace(Place),
    #[error("basis function does not belong to this curve")]
    WrongCurve,
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("exhaustive search over {0} codewords is beyond desk scale")]
    TooLarge(u128),
    #[error("the zero code has no minimum distance")]
    ZeroCode,
}

/// Distinguished places: the fixed points P_l = (alpha_l, 0) of a Kummer curve
/// (0-based l), the place at infinity, and the common zero P^{(i)} of the tower
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Root(usize),
    Origin,
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Divisor {
    pub level: usize,
    coeffs: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero(level: usize) -> Divisor {
        Divisor { level, coeffs: BTreeMap::new() }
    }
    /// d P_infinity.
    pub fn at_infinity(level: usize, d: i64) -> Divisor {
        Divisor::zero(level).with(Place::Infinity, d)
    }
    pub fn with(mut self, place: Place, c: i64) -> Divisor {
        let e = self.coeffs.entry(place).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&place);
        }
        self
    }
    pub fn coeff(&self, place: Place) -> i64 {
        self.coeffs.get(&place).copied().unwrap_or(0)
    }
    pub fn terms(&self) -> impl Iterator<Item = (Place, i64)> + '_ {
        self.coeffs.iter().map(|(&p, &c)| (p, c))
    }
    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }
    pub fn is_one_point(&self) -> bool {
        self.coeffs.keys().all(|p| *p == Place::Infinity)
    }
    pub fn add(&self, other: &Divisor) -> Divisor {
        other.terms().fold(self.clone(), |d, (p, c)| d.with(p, c))
    }
    pub fn sub(&self, other: &Divisor) -> Divisor {
        other.terms().fold(self.clone(), |d, (p, c)| d.with(p, -c))
    }
    pub fn scale(&self, k: i64) -> Divisor {
        self.terms().fold(Divisor::zero(self.level), |d, (p, c)| d.with(p, c * k))
    }
    /// Coefficient-wise comparison self <= other.
    pub fn leq(&self, other: &Divisor) -> bool {
        self.sub(other).terms().all(|(_, c)| c <= 0)
    }
    pub fn relevel(mut self, level: usize) -> Divisor {
        self.level = level;
        self
    }
}

/// Coefficient-wise floor division toward negative infinity.
pub fn floor_divisor(d: &Divisor, n: i64) -> Divisor {
    assert!(n >= 1);
    d.terms().fold(Divisor::zero(d.level), |acc, (p, c)| acc.with(p, c.div_euclid(n)))
}

fn ceil_div(a: i64, n: i64) -> i64 {
    -((-a).div_euclid(n))
}

/// Exponent data of a basis function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisFunction {
    /// y^j prod_{l >= 2} (x - alpha_l)^{j_l}; `js` holds j_2..j_m.
    Kummer { j: i64, js: Vec<i64> },
    /// x_0^{a_0} ... x_i^{a_i}.
    Tower { exps: Vec<u64> },
    /// x^d on the line.
    Line { deg: u64 },
}

impl BasisFunction {
    /// Pole order at infinity.
    pub fn pole_order(&self, curve: &Curve) -> i64 {
        match (self, curve) {
            (BasisFunction::Kummer { j, js }, Curve::Kummer(c)) => {
                c.m() as i64 * j + c.n_level() as i64 * js.iter().sum::<i64>()
            }
            (BasisFunction::Tower { exps }, Curve::Tower(c)) => {
                exps.iter().enumerate().map(|(k, &a)| a as i64 * tower_weight(c.q(), c.level(), k) as i64).sum()
            }
            (BasisFunction::Line { deg }, _) => *deg as i64,
            _ => panic!("basis function does not live on this curve"),
        }
    }
}

fn check_support(d: &Divisor, allowed: impl Fn(Place) -> bool) -> Result<(), RrError> {
    match d.terms().find(|(p, _)| !allowed(*p)) {
        Some((p, _)) => Err(RrError::UnsupportedPlace(p)),
        None => Ok(()),
    }
}

/// Basis of L(D) for D = sum a_l P_l + b P_infinity on y^{N_i} = f(x).
///
/// Enumerates the index set of pairs (j, j_2..j_m) with j + a_1 >= 0,
/// j_l = ceil((-j - a_l)/N) and m j + N sum j_l <= b. Since N j_l >= -j - a_l the
/// weight is at least j - sum_{l>=2} a_l, which bounds j from above.
pub fn hu_yang_basis(curve: &KummerCurve, d: &Divisor) -> Result<Vec<BasisFunction>, RrError> {
    let m = curve.m();
    check_support(d, |p| matches!(p, Place::Infinity) || matches!(p, Place::Root(l) if l < m))?;
    let n = curve.n_level() as i64;
    let a: Vec<i64> = (0..m).map(|l| d.coeff(Place::Root(l))).collect();
    let b = d.coeff(Place::Infinity);
    let upper = b + a[1..].iter().sum::<i64>();
    let mut out = Vec::new();
    for j in -a[0]..=upper {
        let js: Vec<i64> = a[1..].iter().map(|&al| ceil_div(-j - al, n)).collect();
        if m as i64 * j + n * js.iter().sum::<i64>() <= b {
            out.push(BasisFunction::Kummer { j, js });
        }
    }
    Ok(out)
}

/// Pole order of x_j at infinity on tower level i: q^{i-j} (q+1)^j.
pub fn tower_weight(q: u64, level: usize, j: usize) -> u128 {
    (q as u128).pow((level - j) as u32) * (q as u128 + 1).pow(j as u32)
}

/// Basis of L(m P_infinity) on tower level i: monomials with a_j <= q - 1 for
/// j >= 1 and weighted degree at most m.
pub fn tower_basis(curve: &TowerCurve, m: i64) -> Vec<BasisFunction> {
    let mut out = Vec::new();
    if m < 0 {
        return out;
    }
    let level = curve.level();
    let q = curve.q();
    let weights: Vec<u128> = (0..=level).map(|j| tower_weight(q, level, j)).collect();
    let mut exps = vec![0u64; level + 1];
    fn rec(k: usize, budget: u128, q: u64, w: &[u128], exps: &mut Vec<u64>, out: &mut Vec<BasisFunction>) {
        if k == 0 {
            for a0 in 0..=(budget / w[0]) as u64 {
                exps[0] = a0;
                out.push(BasisFunction::Tower { exps: exps.clone() });
            }
            return;
        }
        for a in 0..q {
            let cost = a as u128 * w[k];
            if cost > budget {
                break;
            }
            exps[k] = a;
            rec(k - 1, budget - cost, q, w, exps, out);
        }
        exps[k] = 0;
    }
    rec(level, m as u128, q, &weights, &mut exps, &mut out);
    out.sort();
    out
}

/// Basis x^0..x^d of polynomials of degree at most d.
pub fn line_basis(d: i64) -> Vec<BasisFunction> {
    (0..=d.max(-1)).map(|k| BasisFunction::Line { deg: k as u64 }).collect()
}

/// Riemann-Roch basis for a divisor on any supported curve.
pub fn basis_for(curve: &Curve, d: &Divisor) -> Result<Vec<BasisFunction>, RrError> {
    match curve {
        Curve::Kummer(c) => hu_yang_basis(c, d),
        Curve::Tower(c) => {
            check_support(d, |p| p == Place::Infinity)?;
            Ok(tower_basis(c, d.coeff(Place::Infinity)))
        }
        Curve::Line(_) => {
            check_support(d, |p| p == Place::Infinity)?;
            Ok(line_basis(d.coeff(Place::Infinity)))
        }
    }
}

pub fn evaluate_basis_function(curve: &Curve, b: &BasisFunction, p: &CurvePoint) -> Result<Fe, RrError> {
    let field = curve.field();
    match (curve, b) {
        (Curve::Kummer(c), BasisFunction::Kummer { j, js }) => {
            if p.infinity {
                return if *j == 0 && js.iter().all(|&e| e == 0) { Ok(field.one()) } else { Err(RrError::Pole) };
            }
            let (x, y) = (p.coords[0], p.coords[1]);
            let mut num = field.one();
            let mut den = field.one();
            let mut acc = |base: Fe, e: i64| {
                if e >= 0 {
                    num = field.mul(num, field.pow(base, e as u128));
                } else {
                    den = field.mul(den, field.pow(base, e.unsigned_abs() as u128));
                }
            };
            acc(y, *j);
            for (l, &e) in js.iter().enumerate() {
                acc(field.sub(x, c.roots()[l + 1]), e);
            }
            field.div(num, den).ok_or(RrError::Pole)
        }
        (Curve::Tower(_), BasisFunction::Tower { exps }) => {
            if p.infinity {
                return if exps.iter().all(|&e| e == 0) { Ok(field.one()) } else { Err(RrError::Pole) };
            }
            Ok(exps.iter().zip(&p.coords).fold(field.one(), |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u128))))
        }
        (Curve::Line(_), BasisFunction::Line { deg }) => {
            if p.infinity {
                return if *deg == 0 { Ok(field.one()) } else { Err(RrError::Pole) };
            }
            Ok(field.pow(p.coords[0], *deg as u128))
        }
        _ => Err(RrError::WrongCurve),
    }
}

/// Rows are evaluations of the basis functions on the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub field: Field,
    pub rows: Vec<Vec<Fe>>,
    pub n: usize,
}

impl GeneratorMatrix {
    pub fn new(curve: &Curve, basis: &[BasisFunction], domain: &EvalDomain) -> Result<GeneratorMatrix, RrError> {
        let rows = basis
            .iter()
            .map(|b| domain.points().iter().map(|p| evaluate_basis_function(curve, b, p)).collect())
            .collect::<Result<Vec<Vec<Fe>>, _>>()?;
        Ok(GeneratorMatrix { field: curve.field().clone(), rows, n: domain.len() })
    }

    pub fn encode(&self, message: &[Fe]) -> Result<Vec<Fe>, RrError> {
        if message.len() != self.rows.len() {
            return Err(RrError::LengthMismatch { expected: self.rows.len(), got: message.len() });
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.n];
        for (row, &c) in self.rows.iter().zip(message) {
            if c == f.zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, v));
            }
        }
        Ok(out)
    }

    /// Row-major flat export.
    pub fn flat(&self) -> Vec<Fe> {
        self.rows.concat()
    }

    pub fn rank(&self) -> usize {
        LinearCode::from_rows(&self.field, self.n, &self.rows).dim()
    }
}

/// Evaluation encoding of a message in the given basis.
pub fn encode(curve: &Curve, message: &[Fe], basis: &[BasisFunction], domain: &EvalDomain) -> Result<Vec<Fe>, RrError> {
    GeneratorMatrix::new(curve, basis, domain)?.encode(message)
}

/// A linear code held in reduced row echelon form, for membership tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    field: Field,
    n: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl LinearCode {
    pub fn from_rows(field: &Field, n: usize, rows: &[Vec<Fe>]) -> LinearCode {
        let mut code = LinearCode { field: field.clone(), n, rows: Vec::new(), pivots: Vec::new() };
        for r in rows {
            code.insert(r.clone());
        }
        code
    }

    /// Adds a vector to the span, keeping the rows fully reduced. Returns false
    /// when the vector was already in the span.
    pub fn insert(&mut self, v: Vec<Fe>) -> bool {
        let f = self.field.clone();
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&c| c != f.zero()) else {
            return false;
        };
        let inv = f.inv(r[piv]).unwrap();
        for c in r.iter_mut() {
            *c = f.mul(*c, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != f.zero() {
                for (a, &b) in row.iter_mut().zip(&r) {
                    *a = f.sub(*a, f.mul(c, b));
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < piv);
        self.pivots.insert(at, piv);
        self.rows.insert(at, r);
        true
    }

    fn reduce(&self, mut v: Vec<Fe>) -> Vec<Fe> {
        let f = &self.field;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != f.zero() {
                for (a, &b) in v.iter_mut().zip(row) {
                    *a = f.sub(*a, f.mul(c, b));
                }
            }
        }
        v
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    pub fn contains(&self, w: &[Fe]) -> bool {
        w.len() == self.n && self.reduce(w.to_vec()).iter().all(|&c| c == self.field.zero())
    }

    /// The same code over an extension field (the span of the embedded rows).
    pub fn lift(&self, e: &Embedding) -> LinearCode {
        LinearCode {
            field: e.target().clone(),
            n: self.n,
            rows: self.rows.iter().map(|r| r.iter().map(|&c| e.map(c)).collect()).collect(),
            pivots: self.pivots.clone(),
        }
    }
}

/// Exact relative minimum distance by enumerating all nonzero codewords.
pub fn min_distance_exhaustive(code: &LinearCode) -> Result<Ratio<u64>, RrError> {
    if code.dim() == 0 {
        return Err(RrError::ZeroCode);
    }
    let q = code.field().size();
    let total = q.checked_pow(code.dim() as u32).unwrap_or(u128::MAX);
    if total > 1 << 24 {
        return Err(RrError::TooLarge(total));
    }
    let f = code.field();
    let elems: Vec<Fe> = f.elements().collect();
    let mut best = code.len();
    fn rec(k: usize, acc: &[Fe], nonzero: bool, code: &LinearCode, elems: &[Fe], best: &mut usize) {
        let f = code.field();
        if k == code.dim() {
            if nonzero {
                let w = acc.iter().filter(|&&c| c != f.zero()).count();
                *best = (*best).min(w);
            }
            return;
        }
        for &c in elems {
            let next: Vec<Fe> = acc.iter().zip(&code.rows()[k]).map(|(&a, &r)| f.add(a, f.mul(c, r))).collect();
            rec(k + 1, &next, nonzero || c != f.zero(), code, elems, best);
        }
    }
    rec(0, &vec![f.zero(); code.len()], false, code, &elems, &mut best);
    Ok(Ratio::new(best as u64, code.len() as u64))
}
