//! Kummer curves y^N = f(x), the Hermitian tower x_i^q + x_i = x_{i-1}^{q+1},
//! rational points, projections between levels and evaluation domains.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::{factorize, Fe, Field, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("N = {n} is divisible by the characteristic {p}")]
    CharacteristicDividesN { n: u64, p: u64 },
    #[error("gcd(N, m) = gcd({n}, {m}) is not 1")]
    DegreeNotCoprime { n: u64, m: usize },
    #[error("f must have at least one root")]
    NoRoots,
    #[error("the roots of f are not pairwise distinct")]
    RepeatedRoot,
    #[error("f does not split into distinct linear factors over the field")]
    NotSplit,
    #[error("tower base q = {q} does not satisfy q^2 = |F|")]
    BadTowerBase { q: u64 },
    #[error("level {level} has no quotient map")]
    NoQuotient { level: usize },
    #[error("point is a ramification point of the projection")]
    Ramified,
    #[error("point does not lie on the curve")]
    NotOnCurve,
    #[error("orbit of size {got} at x = {x:?}, expected {expected}")]
    IncompleteOrbit { x: Fe, got: usize, expected: usize },
    #[error("requested size {size} is not a multiple of the orbit size {orbit}")]
    SizeNotMultiple { size: usize, orbit: usize },
    #[error("requested {wanted} orbits but only {available} exist")]
    NotEnoughOrbits { wanted: usize, available: usize },
    #[error("x = {0:?} is not the x-coordinate of a free orbit")]
    NotAnOrbit(Fe),
}

/// Kummer curve y^N = prod (x - alpha_l) viewed at level i, i.e. y^{N_i} = f(x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KummerCurve {
    field: Field,
    n: u64,
    roots: Vec<Fe>,
    primes: Vec<u64>,
    level: usize,
}

impl KummerCurve {
    pub fn new(field: &Field, n: u64, roots: Vec<Fe>) -> Result<KummerCurve, CurveError> {
        if n % field.characteristic() == 0 {
            return Err(CurveError::CharacteristicDividesN { n, p: field.characteristic() });
        }
        if roots.is_empty() {
            return Err(CurveError::NoRoots);
        }
        let m = roots.len();
        if gcd(n, m as u64) != 1 {
            return Err(CurveError::DegreeNotCoprime { n, m });
        }
        let mut sorted = roots.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != m {
            return Err(CurveError::RepeatedRoot);
        }
        Ok(KummerCurve { field: field.clone(), n, roots, primes: factorize(n), level: 0 })
    }

    /// Builds the curve from the coefficients of f (low to high), which must split
    /// into distinct linear factors. Roots come out in ascending index order.
    pub fn from_coefficients(field: &Field, n: u64, coeffs: &[Fe]) -> Result<KummerCurve, CurveError> {
        let f = Poly::new(coeffs.to_vec());
        let deg = f.degree().unwrap_or(0);
        let lead = f.coeff(deg);
        let roots: Vec<Fe> = field.elements().filter(|&x| f.eval(field, x) == field.zero()).collect();
        if roots.len() != deg || lead != field.one() {
            return Err(CurveError::NotSplit);
        }
        KummerCurve::new(field, n, roots)
    }

    pub fn at_level(&self, level: usize) -> KummerCurve {
        assert!(level <= self.primes.len());
        KummerCurve { level, ..self.clone() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn level(&self) -> usize {
        self.level
    }
    /// Number of quotient steps down to the projective line.
    pub fn levels(&self) -> usize {
        self.primes.len()
    }
    pub fn n_total(&self) -> u64 {
        self.n
    }
    /// N_i = product of the prime factors p_i, p_{i+1}, ...
    pub fn n_level(&self) -> u64 {
        self.primes[self.level..].iter().product()
    }
    pub fn m(&self) -> usize {
        self.roots.len()
    }
    pub fn roots(&self) -> &[Fe] {
        &self.roots
    }
    /// Prime factors of N in ascending order, with multiplicity.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
    pub fn f(&self, x: Fe) -> Fe {
        self.roots.iter().fold(self.field.one(), |acc, &a| self.field.mul(acc, self.field.sub(x, a)))
    }
    pub fn genus(&self) -> u64 {
        (self.n_level() - 1) * (self.m() as u64 - 1) / 2
    }
    pub fn contains(&self, p: &CurvePoint) -> bool {
        p.infinity
            || (p.coords.len() == 2 && self.field.pow(p.coords[1], self.n_level() as u128) == self.f(p.coords[0]))
    }
}

/// Level i of the Hermitian tower over F_{q^2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerCurve {
    field: Field,
    q: u64,
    level: usize,
}

impl TowerCurve {
    pub fn new(field: &Field, q: u64, level: usize) -> Result<TowerCurve, CurveError> {
        if (q as u128).checked_mul(q as u128) != Some(field.size()) {
            return Err(CurveError::BadTowerBase { q });
        }
        Ok(TowerCurve { field: field.clone(), q, level })
    }
    pub fn at_level(&self, level: usize) -> TowerCurve {
        TowerCurve { level, ..self.clone() }
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn genus(&self) -> u128 {
        tower_genus(self.q as u128, self.level as u32)
    }
    /// t^q + t, the Artin-Schreier map of every step.
    pub fn trace(&self, t: Fe) -> Fe {
        self.field.add(self.field.pow(t, self.q as u128), t)
    }
    pub fn contains(&self, p: &CurvePoint) -> bool {
        if p.infinity {
            return true;
        }
        p.coords.len() == self.level + 1
            && (1..=self.level).all(|k| self.trace(p.coords[k]) == self.field.pow(p.coords[k - 1], self.q as u128 + 1))
    }
}

/// g_i = ((q^2 - 1)((q+1)^i - q^i) + 1 - q^i) / 2.
pub fn tower_genus(q: u128, i: u32) -> u128 {
    if i == 0 {
        return 0;
    }
    ((q * q - 1) * ((q + 1).pow(i) - q.pow(i)) + 1 - q.pow(i)) / 2
}

/// The three curve shapes a folding level can live on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Curve {
    Kummer(KummerCurve),
    Tower(TowerCurve),
    /// Projective line with coordinate x, used by the Reed-Solomon tail.
    Line(Field),
}

impl Curve {
    pub fn field(&self) -> &Field {
        match self {
            Curve::Kummer(c) => c.field(),
            Curve::Tower(c) => c.field(),
            Curve::Line(f) => f,
        }
    }
    pub fn genus(&self) -> u128 {
        genus(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Sorts after every affine point.
    pub infinity: bool,
    pub coords: Vec<Fe>,
    pub level: usize,
}

impl CurvePoint {
    pub fn affine(level: usize, coords: Vec<Fe>) -> CurvePoint {
        CurvePoint { infinity: false, coords, level }
    }
    pub fn at_infinity(level: usize) -> CurvePoint {
        CurvePoint { infinity: true, coords: Vec::new(), level }
    }
    pub fn x(&self) -> Fe {
        self.coords[0]
    }
}

pub fn genus(curve: &Curve) -> u128 {
    match curve {
        Curve::Kummer(c) => c.genus() as u128,
        Curve::Tower(c) => c.genus(),
        Curve::Line(_) => 0,
    }
}

/// All rational points, affine ones in lexicographic order followed by infinity.
pub fn enumerate_points(curve: &Curve) -> Vec<CurvePoint> {
    let mut pts = match curve {
        Curve::Kummer(c) => {
            let field = c.field();
            let roots = power_preimages(field, c.n_level() as u128);
            let mut out = Vec::new();
            for x in field.elements() {
                let v = c.f(x);
                if v == field.zero() {
                    out.push(CurvePoint::affine(c.level(), vec![x, v]));
                } else if let Some(ys) = roots.get(&v) {
                    out.extend(ys.iter().map(|&y| CurvePoint::affine(c.level(), vec![x, y])));
                }
            }
            out
        }
        Curve::Tower(c) => {
            let line: Vec<Fe> = c.field().elements().collect();
            tower_lift(c, &line)
        }
        Curve::Line(f) => f.elements().map(|x| CurvePoint::affine(0, vec![x])).collect(),
    };
    pts.sort();
    let level = match curve {
        Curve::Kummer(c) => c.level(),
        Curve::Tower(c) => c.level(),
        Curve::Line(_) => 0,
    };
    pts.push(CurvePoint::at_infinity(level));
    pts
}

/// Map from each value v to the sorted list of y with y^e = v.
fn power_preimages(field: &Field, e: u128) -> HashMap<Fe, Vec<Fe>> {
    let mut map: HashMap<Fe, Vec<Fe>> = HashMap::new();
    for y in field.elements() {
        map.entry(field.pow(y, e)).or_default().push(y);
    }
    map
}

/// Affine points of tower level `c.level()` lying over the given level-0 x-values.
fn tower_lift(c: &TowerCurve, line: &[Fe]) -> Vec<CurvePoint> {
    let field = c.field();
    let mut solutions: HashMap<Fe, Vec<Fe>> = HashMap::new();
    for t in field.elements() {
        solutions.entry(c.trace(t)).or_default().push(t);
    }
    let mut pts: Vec<Vec<Fe>> = line.iter().map(|&x| vec![x]).collect();
    for _ in 0..c.level() {
        let mut next = Vec::with_capacity(pts.len() * c.q() as usize);
        for p in &pts {
            let rhs = field.pow(*p.last().unwrap(), c.q() as u128 + 1);
            for &t in solutions.get(&rhs).map(|v| v.as_slice()).unwrap_or(&[]) {
                let mut np = p.clone();
                np.push(t);
                next.push(np);
            }
        }
        pts = next;
    }
    pts.into_iter().map(|coords| CurvePoint::affine(c.level(), coords)).collect()
}

/// Image under the quotient map to the next level: (x, y) -> (x, y^{p_i}) on
/// Kummer curves, dropping the last coordinate on the tower.
pub fn project(curve: &Curve, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
    match curve {
        Curve::Kummer(c) => {
            if c.level() >= c.levels() {
                return Err(CurveError::NoQuotient { level: c.level() });
            }
            if p.infinity {
                return Ok(CurvePoint::at_infinity(c.level() + 1));
            }
            let y = c.field().pow(p.coords[1], c.primes()[c.level()] as u128);
            Ok(CurvePoint::affine(c.level() + 1, vec![p.coords[0], y]))
        }
        Curve::Tower(c) => {
            if c.level() == 0 {
                return Err(CurveError::NoQuotient { level: 0 });
            }
            if p.infinity {
                return Ok(CurvePoint::at_infinity(c.level() - 1));
            }
            Ok(CurvePoint::affine(c.level() - 1, p.coords[..c.level()].to_vec()))
        }
        Curve::Line(_) => Err(CurveError::NoQuotient { level: p.level }),
    }
}

/// Preimages on `source` of a point of the next level.
pub fn fiber(source: &Curve, target: &CurvePoint) -> Result<Vec<CurvePoint>, CurveError> {
    if target.infinity {
        return Err(CurveError::Ramified);
    }
    match source {
        Curve::Kummer(c) => {
            if c.level() >= c.levels() {
                return Err(CurveError::NoQuotient { level: c.level() });
            }
            let field = c.field();
            let (x, v) = (target.coords[0], target.coords[1]);
            if v == field.zero() {
                return Err(CurveError::Ramified);
            }
            let p = c.primes()[c.level()] as u128;
            let pts: Vec<CurvePoint> = field
                .elements()
                .filter(|&y| field.pow(y, p) == v)
                .map(|y| CurvePoint::affine(c.level(), vec![x, y]))
                .collect();
            if pts.len() != p as usize {
                return Err(CurveError::Ramified);
            }
            Ok(pts)
        }
        Curve::Tower(c) => {
            if c.level() == 0 {
                return Err(CurveError::NoQuotient { level: 0 });
            }
            let field = c.field();
            let rhs = field.pow(*target.coords.last().unwrap(), c.q() as u128 + 1);
            Ok(field
                .elements()
                .filter(|&t| c.trace(t) == rhs)
                .map(|t| {
                    let mut coords = target.coords.clone();
                    coords.push(t);
                    CurvePoint::affine(c.level(), coords)
                })
                .collect())
        }
        Curve::Line(_) => Err(CurveError::NoQuotient { level: target.level }),
    }
}

/// Ordered set of evaluation points at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalDomain {
    points: Vec<CurvePoint>,
    position: HashMap<Vec<Fe>, usize>,
}

impl EvalDomain {
    /// Sorts and indexes the points. Points at infinity are rejected by the planners.
    pub fn new(mut points: Vec<CurvePoint>) -> EvalDomain {
        points.sort();
        points.dedup();
        let position = points.iter().enumerate().map(|(i, p)| (p.coords.clone(), i)).collect();
        EvalDomain { points, position }
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }
    pub fn point(&self, i: usize) -> &CurvePoint {
        &self.points[i]
    }
    pub fn index_of(&self, coords: &[Fe]) -> Option<usize> {
        self.position.get(coords).copied()
    }
}

/// Which free orbits of a Kummer curve to evaluate on.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSelection {
    #[default]
    All,
    /// The lexicographically first k orbits.
    Orbits(usize),
    /// Total number of points; must be a multiple of N.
    Size(usize),
    /// Orbits above these x-coordinates (field indices).
    XValues(Vec<u128>),
}

/// Union of full Z/NZ-orbits of non-fixed rational points. Each orbit is the set
/// of N points above one x with f(x) != 0.
pub fn kummer_domain(curve: &KummerCurve, selection: &DomainSelection) -> Result<EvalDomain, CurveError> {
    let n = curve.n_level() as usize;
    let mut orbits: BTreeMap<Fe, Vec<CurvePoint>> = BTreeMap::new();
    for p in enumerate_points(&Curve::Kummer(curve.clone())) {
        if p.infinity || p.coords[1] == curve.field().zero() {
            continue;
        }
        orbits.entry(p.coords[0]).or_default().push(p);
    }
    for (x, pts) in &orbits {
        if pts.len() != n {
            return Err(CurveError::IncompleteOrbit { x: *x, got: pts.len(), expected: n });
        }
    }
    let take = |k: usize| -> Result<Vec<CurvePoint>, CurveError> {
        if k > orbits.len() {
            return Err(CurveError::NotEnoughOrbits { wanted: k, available: orbits.len() });
        }
        Ok(orbits.values().take(k).flatten().cloned().collect())
    };
    let points = match selection {
        DomainSelection::All => orbits.values().flatten().cloned().collect(),
        DomainSelection::Orbits(k) => take(*k)?,
        DomainSelection::Size(size) => {
            if size % n != 0 {
                return Err(CurveError::SizeNotMultiple { size: *size, orbit: n });
            }
            take(size / n)?
        }
        DomainSelection::XValues(xs) => {
            let mut out = Vec::new();
            for &xi in xs {
                let x = curve.field().from_index(xi).map_err(|_| CurveError::NotOnCurve)?;
                out.extend(orbits.get(&x).ok_or(CurveError::NotAnOrbit(x))?.iter().cloned());
            }
            out
        }
    };
    Ok(EvalDomain::new(points))
}

/// Preimage of the chosen line points under the projection to level 0.
pub fn tower_domain(curve: &TowerCurve, p0: &[Fe]) -> EvalDomain {
    EvalDomain::new(tower_lift(curve, p0))
}

/// Generic entry point: Kummer curves select orbits, tower curves pull back
/// all affine line points, the line takes every affine point.
pub fn build_eval_domain(curve: &Curve) -> Result<EvalDomain, CurveError> {
    match curve {
        Curve::Kummer(c) => kummer_domain(c, &DomainSelection::All),
        Curve::Tower(c) => Ok(tower_domain(c, &c.field().elements().collect::<Vec<_>>())),
        Curve::Line(f) => Ok(EvalDomain::new(f.elements().map(|x| CurvePoint::affine(0, vec![x])).collect())),
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_field;

    fn f4_curve() -> KummerCurve {
        let f = make_field(2, 2).unwrap();
        KummerCurve::new(&f, 3, vec![f.elem(0), f.elem(1)]).unwrap()
    }

    #[test]
    fn f4_kummer_points() {
        let c = f4_curve();
        let pts = enumerate_points(&Curve::Kummer(c.clone()));
        assert_eq!(pts.len(), 9);
        assert_eq!(c.genus(), 1);
        assert_eq!(pts.len() as u64, 4 + 1 + 2 * c.genus() * 2);
        assert!(pts.iter().all(|p| c.contains(p)));
    }

    #[test]
    fn tower_counts() {
        let f = make_field(2, 2).unwrap();
        let t = TowerCurve::new(&f, 2, 2).unwrap();
        let pts = enumerate_points(&Curve::Tower(t.clone()));
        assert_eq!(pts.len(), 17);
        assert!(pts.iter().all(|p| t.contains(p)));
        assert_eq!(enumerate_points(&Curve::Tower(t.at_level(0))).len(), 5);
        assert_eq!(tower_genus(2, 1), 1);
        assert_eq!(tower_genus(2, 0), 0);
    }

    #[test]
    fn fibers() {
        let c = f4_curve();
        let f = c.field().clone();
        let w = f.elem(2);
        let fib = fiber(&Curve::Kummer(c.clone()), &CurvePoint::affine(1, vec![w, f.one()])).unwrap();
        assert_eq!(fib.len(), 3);
        for p in &fib {
            assert_eq!(f.pow(p.coords[1], 3), f.one());
            assert_eq!(project(&Curve::Kummer(c.clone()), p).unwrap(), CurvePoint::affine(1, vec![w, f.one()]));
        }
        let t = TowerCurve::new(&f, 2, 1).unwrap();
        let fib = fiber(&Curve::Tower(t), &CurvePoint::affine(0, vec![f.zero()])).unwrap();
        assert_eq!(
            fib.iter().map(|p| p.coords.clone()).collect::<Vec<_>>(),
            vec![vec![f.zero(), f.zero()], vec![f.zero(), f.one()]]
        );
        assert_eq!(fiber(&Curve::Kummer(c), &CurvePoint::at_infinity(1)), Err(CurveError::Ramified));
    }

    #[test]
    fn domains() {
        let d = kummer_domain(&f4_curve(), &DomainSelection::All).unwrap();
        assert_eq!(d.len(), 6);
        let f16 = make_field(2, 4).unwrap();
        let herm = KummerCurve::from_coefficients(&f16, 5, &[f16.zero(), f16.one(), f16.zero(), f16.zero(), f16.one()])
            .unwrap();
        assert_eq!(enumerate_points(&Curve::Kummer(herm.clone())).len(), 65);
        assert_eq!(kummer_domain(&herm, &DomainSelection::All).unwrap().len(), 60);
        assert_eq!(
            kummer_domain(&herm, &DomainSelection::Size(7)),
            Err(CurveError::SizeNotMultiple { size: 7, orbit: 5 })
        );
        let f4 = make_field(2, 2).unwrap();
        let t = TowerCurve::new(&f4, 2, 1).unwrap();
        assert_eq!(build_eval_domain(&Curve::Tower(t)).unwrap().len(), 8);
    }
}
