//! Finite fields F_{p^k} with a runtime-selected modulus, small univariate
//! polynomials and Lagrange interpolation.
//!
//! Elements are stored by their canonical index `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! where `c_i` are the coefficients of the residue modulo the field polynomial.
//! The index order is the total order used everywhere points are sorted.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{k} exceeds the 127-bit representation budget")]
    TooLarge { p: u64, k: u32 },
    #[error("{n} does not divide |F| - 1 = {order}")]
    NoRootOfUnity { n: u128, order: u128 },
    #[error("index {0} is not an element of the field")]
    BadIndex(u128),
    #[error("duplicate abscissa in interpolation")]
    DuplicateAbscissa,
    #[error("interpolation needs equally many abscissae and values")]
    LengthMismatch,
    #[error("cannot embed F_{from} into F_{into}")]
    NoEmbedding { from: u128, into: u128 },
    #[error("truncated field element encoding")]
    Truncated,
}

/// A field element. Only meaningful together with the [`Field`] it came from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Fe(u128);

impl Fe {
    pub fn index(self) -> u128 {
        self.0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Characteristic, extension degree and the monic modulus (low to high, length degree + 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub degree: u32,
    pub modulus: Vec<u64>,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            return write!(f, "F_{}", self.p);
        }
        let terms: Vec<String> = self
            .modulus
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".into(),
                (i, 1) => format!("x^{i}"),
                (1, c) => format!("{c} x"),
                (i, c) => format!("{c} x^{i}"),
            })
            .collect();
        write!(f, "F_{}^{} mod {}", self.p, self.degree, terms.join(" + "))
    }
}

impl FieldSpec {
    pub fn cardinality(&self) -> u128 {
        (self.p as u128).pow(self.degree)
    }

    /// Bytes per serialized element: ceil(log2 |F| / 8).
    pub fn byte_len(&self) -> usize {
        let bits = 128 - (self.cardinality() - 1).leading_zeros() as usize;
        bits.div_ceil(8).max(1)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 8 * self.modulus.len());
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&self.degree.to_le_bytes());
        for c in &self.modulus {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    /// Parses a spec and returns it together with the number of bytes consumed.
    pub fn from_bytes(bytes: &[u8]) -> Result<(FieldSpec, usize), AlgebraError> {
        if bytes.len() < 12 {
            return Err(AlgebraError::Truncated);
        }
        let p = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
        let degree = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let len = 12 + 8 * (degree as usize + 1);
        if bytes.len() < len || degree == 0 || degree > 127 {
            return Err(AlgebraError::Truncated);
        }
        let modulus = (0..=degree as usize)
            .map(|i| u64::from_le_bytes(bytes[12 + 8 * i..20 + 8 * i].try_into().unwrap()))
            .collect();
        Ok((FieldSpec { p, degree, modulus }, len))
    }
}

#[derive(Debug)]
enum Repr {
    Prime,
    /// Characteristic 2; modulus bits below x^k.
    Binary {
        low: u128,
    },
    Ext,
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug)]
struct Inner {
    spec: FieldSpec,
    size: u128,
    repr: Repr,
    tables: Option<Tables>,
}

/// A finite field. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}
impl Eq for Field {}

const TABLE_LIMIT: u128 = 1 << 16;

/// Builds F_{p^k} with the lowest irreducible modulus in index order.
pub fn make_field(p: u64, k: u32) -> Result<Field, AlgebraError> {
    Field::new(p, k)
}

impl Field {
    pub fn new(p: u64, k: u32) -> Result<Field, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if k == 0 {
            return Err(AlgebraError::ZeroDegree);
        }
        let size = (p as u128).checked_pow(k).filter(|s| *s <= 1u128 << 127).ok_or(AlgebraError::TooLarge { p, k })?;
        let (modulus, repr) = if k == 1 {
            (vec![0, 1], Repr::Prime)
        } else if p == 2 {
            let low = lowest_binary_irreducible(k);
            let mut m: Vec<u64> = (0..k).map(|i| ((low >> i) & 1) as u64).collect();
            m.push(1);
            (m, Repr::Binary { low })
        } else {
            (lowest_irreducible(p, k), Repr::Ext)
        };
        let mut inner = Inner { spec: FieldSpec { p, degree: k, modulus }, size, repr, tables: None };
        if k > 1 && size <= TABLE_LIMIT {
            let slow = Field { inner: Arc::new(inner) };
            let tables = slow.build_tables();
            inner = Arc::try_unwrap(slow.inner).expect("unique");
            inner.tables = Some(tables);
        }
        Ok(Field { inner: Arc::new(inner) })
    }

    /// Rebuilds a field from a serialized spec, checking the modulus is the canonical one.
    pub fn from_spec(spec: &FieldSpec) -> Result<Field, AlgebraError> {
        let f = Field::new(spec.p, spec.degree)?;
        if f.spec() != spec {
            return Err(AlgebraError::BadIndex(0));
        }
        Ok(f)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }
    pub fn size(&self) -> u128 {
        self.inner.size
    }
    pub fn characteristic(&self) -> u64 {
        self.inner.spec.p
    }
    pub fn degree(&self) -> u32 {
        self.inner.spec.degree
    }
    pub fn byte_len(&self) -> usize {
        self.inner.spec.byte_len()
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }
    pub fn one(&self) -> Fe {
        Fe(1)
    }
    /// Image of an integer in the prime subfield.
    pub fn from_u64(&self, v: u64) -> Fe {
        Fe((v % self.inner.spec.p) as u128)
    }
    pub fn from_index(&self, i: u128) -> Result<Fe, AlgebraError> {
        if i < self.inner.size {
            Ok(Fe(i))
        } else {
            Err(AlgebraError::BadIndex(i))
        }
    }
    /// Element by index; panics when out of range.
    pub fn elem(&self, i: u128) -> Fe {
        self.from_index(i).expect("field index out of range")
    }
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.inner.size).map(Fe)
    }
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.inner.size))
    }
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.inner.size))
    }

    pub fn digits(&self, a: Fe) -> Vec<u64> {
        let p = self.inner.spec.p as u128;
        let mut v = a.0;
        (0..self.inner.spec.degree)
            .map(|_| {
                let d = v % p;
                v /= p;
                d as u64
            })
            .collect()
    }
    pub fn from_digits(&self, d: &[u64]) -> Fe {
        let p = self.inner.spec.p as u128;
        Fe(d.iter().rev().fold(0u128, |acc, &c| acc * p + (c as u128 % p)))
    }

    pub fn is_zero(&self, a: Fe) -> bool {
        a.0 == 0
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match self.inner.repr {
            Repr::Prime => {
                let p = self.inner.spec.p as u128;
                let s = a.0 + b.0;
                Fe(if s >= p { s - p } else { s })
            }
            Repr::Binary { .. } => Fe(a.0 ^ b.0),
            Repr::Ext => self.digitwise(a, b, |x, y, p| (x + y) % p),
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        match self.inner.repr {
            Repr::Prime => {
                let p = self.inner.spec.p as u128;
                Fe(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 })
            }
            Repr::Binary { .. } => Fe(a.0 ^ b.0),
            Repr::Ext => self.digitwise(a, b, |x, y, p| (x + p - y) % p),
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        self.sub(Fe(0), a)
    }

    fn digitwise(&self, a: Fe, b: Fe, op: impl Fn(u128, u128, u128) -> u128) -> Fe {
        let p = self.inner.spec.p as u128;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u128;
        let mut scale = 1u128;
        for i in 0..self.inner.spec.degree {
            out += op(x % p, y % p, p) * scale;
            x /= p;
            y /= p;
            if i + 1 < self.inner.spec.degree {
                scale *= p;
            }
        }
        Fe(out)
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if let Some(t) = &self.inner.tables {
            if a.0 == 0 || b.0 == 0 {
                return Fe(0);
            }
            let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return Fe(t.exp[i] as u128);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        match self.inner.repr {
            Repr::Prime => Fe(mulmod(a.0, b.0, self.inner.spec.p as u128)),
            Repr::Binary { low } => {
                let (hi, lo) = clmul(a.0, b.0);
                Fe(reduce_binary(hi, lo, low, self.inner.spec.degree))
            }
            Repr::Ext => {
                let p = self.inner.spec.p as u128;
                let k = self.inner.spec.degree as usize;
                let da = self.digits(a);
                let db = self.digits(b);
                let mut prod = vec![0u128; 2 * k - 1];
                for i in 0..k {
                    if da[i] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        prod[i + j] = (prod[i + j] + mulmod(da[i] as u128, db[j] as u128, p)) % p;
                    }
                }
                let m = &self.inner.spec.modulus;
                for i in (k..2 * k - 1).rev() {
                    let c = prod[i];
                    if c == 0 {
                        continue;
                    }
                    for t in 0..k {
                        let s = mulmod(c, m[t] as u128, p);
                        prod[i - k + t] = (prod[i - k + t] + p - s) % p;
                    }
                }
                let d: Vec<u64> = prod[..k].iter().map(|&c| c as u64).collect();
                self.from_digits(&d)
            }
        }
    }

    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Fe, mut e: u128) -> Fe {
        let mut base = a;
        let mut acc = Fe(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Signed power; negative exponents need a nonzero base.
    pub fn pow_i(&self, a: Fe, e: i64) -> Option<Fe> {
        if e >= 0 {
            Some(self.pow(a, e as u128))
        } else {
            self.inv(a).map(|b| self.pow(b, e.unsigned_abs() as u128))
        }
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        if let Some(t) = &self.inner.tables {
            let n = (self.inner.size - 1) as usize;
            let l = t.log[a.0 as usize] as usize;
            return Some(Fe(t.exp[(n - l) % n] as u128));
        }
        Some(self.pow(a, self.inner.size - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn write_bytes(&self, a: Fe, out: &mut Vec<u8>) {
        out.extend_from_slice(&a.0.to_le_bytes()[..self.byte_len()]);
    }

    pub fn read_bytes(&self, bytes: &[u8]) -> Result<Fe, AlgebraError> {
        let len = self.byte_len();
        if bytes.len() < len {
            return Err(AlgebraError::Truncated);
        }
        let mut buf = [0u8; 16];
        buf[..len].copy_from_slice(&bytes[..len]);
        self.from_index(u128::from_le_bytes(buf))
    }

    fn build_tables(&self) -> Tables {
        let n = (self.inner.size - 1) as usize;
        let factors = prime_factors(n as u128);
        let g = (2..self.inner.size)
            .map(Fe)
            .find(|&g| factors.iter().all(|&r| self.pow_slow(g, n as u128 / r) != Fe(1)))
            .unwrap_or(Fe(1));
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; n + 1];
        let mut x = Fe(1);
        for i in 0..n {
            exp[i] = x.0 as u32;
            exp[i + n] = x.0 as u32;
            log[x.0 as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        Tables { exp, log }
    }

    fn pow_slow(&self, a: Fe, mut e: u128) -> Fe {
        let mut base = a;
        let mut acc = Fe(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> u128 {
        let mut n = self.inner.size - 1;
        for r in prime_factors(n) {
            while n % r == 0 && self.pow(a, n / r) == Fe(1) {
                n /= r;
            }
        }
        n
    }
}

/// Field operations that can be counted; the protocol kernels are generic over it.
pub trait FieldOps {
    fn field(&self) -> &Field;
    fn add(&self, a: Fe, b: Fe) -> Fe;
    fn sub(&self, a: Fe, b: Fe) -> Fe;
    fn mul(&self, a: Fe, b: Fe) -> Fe;
}

impl FieldOps for Field {
    fn field(&self) -> &Field {
        self
    }
    #[inline]
    fn add(&self, a: Fe, b: Fe) -> Fe {
        Field::add(self, a, b)
    }
    #[inline]
    fn sub(&self, a: Fe, b: Fe) -> Fe {
        Field::sub(self, a, b)
    }
    #[inline]
    fn mul(&self, a: Fe, b: Fe) -> Fe {
        Field::mul(self, a, b)
    }
}

/// Wraps a field and tallies additions and multiplications.
pub struct OpCounter<'a> {
    field: &'a Field,
    adds: Cell<u64>,
    muls: Cell<u64>,
}

impl<'a> OpCounter<'a> {
    pub fn new(field: &'a Field) -> Self {
        OpCounter { field, adds: Cell::new(0), muls: Cell::new(0) }
    }
    pub fn adds(&self) -> u64 {
        self.adds.get()
    }
    pub fn muls(&self) -> u64 {
        self.muls.get()
    }
    pub fn total(&self) -> u64 {
        self.adds.get() + self.muls.get()
    }
}

impl FieldOps for OpCounter<'_> {
    fn field(&self) -> &Field {
        self.field
    }
    fn add(&self, a: Fe, b: Fe) -> Fe {
        self.adds.set(self.adds.get() + 1);
        self.field.add(a, b)
    }
    fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.adds.set(self.adds.get() + 1);
        self.field.sub(a, b)
    }
    fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.muls.set(self.muls.get() + 1);
        self.field.mul(a, b)
    }
}

/// Returns an element of multiplicative order exactly `n`.
pub fn primitive_root_of_unity(field: &Field, n: u128) -> Result<Fe, AlgebraError> {
    let order = field.size() - 1;
    if n == 0 || order % n != 0 {
        return Err(AlgebraError::NoRootOfUnity { n, order });
    }
    if n == 1 {
        return Ok(field.one());
    }
    let factors = prime_factors(n);
    let cofactor = order / n;
    // small indices all lie in the prime subfield, so candidates are drawn from
    // a fixed-seed stream to keep the result deterministic
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(n as u64);
    loop {
        let y = field.pow(field.random_nonzero(&mut rng), cofactor);
        if factors.iter().all(|&r| field.pow(y, n / r) != field.one()) {
            return Ok(y);
        }
    }
}

// ============================================================================
// Polynomials
// ============================================================================

/// Univariate polynomial, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fe>) -> Poly {
        while coeffs.last() == Some(&Fe(0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    /// Coefficient of X^i (zero past the end).
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or_default()
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn eval(&self, field: &Field, x: Fe) -> Fe {
        self.coeffs.iter().rev().fold(Fe(0), |acc, &c| field.add(field.mul(acc, x), c))
    }
}

/// Lagrange interpolation: the unique polynomial of degree < |xs| through the points.
pub fn interpolate(field: &Field, xs: &[Fe], ys: &[Fe]) -> Result<Poly, AlgebraError> {
    if xs.len() != ys.len() {
        return Err(AlgebraError::LengthMismatch);
    }
    let p = xs.len();
    let mut out = vec![Fe(0); p];
    for i in 0..p {
        // basis numerator prod_{k != i} (X - x_k)
        let mut num = vec![Fe(1)];
        let mut denom = Fe(1);
        for k in 0..p {
            if k == i {
                continue;
            }
            let diff = field.sub(xs[i], xs[k]);
            if diff == Fe(0) {
                return Err(AlgebraError::DuplicateAbscissa);
            }
            denom = field.mul(denom, diff);
            let mut next = vec![Fe(0); num.len() + 1];
            for (d, &c) in num.iter().enumerate() {
                next[d + 1] = field.add(next[d + 1], c);
                next[d] = field.sub(next[d], field.mul(c, xs[k]));
            }
            num = next;
        }
        let scale = field.mul(ys[i], field.inv(denom).expect("nonzero"));
        for (d, c) in num.into_iter().enumerate() {
            out[d] = field.add(out[d], field.mul(scale, c));
        }
    }
    Ok(Poly::new(out))
}

/// Inverse of the Vandermonde matrix V[r][c] = xs[r]^c, so that coefficients = V^{-1} values.
pub fn inverse_vandermonde(field: &Field, xs: &[Fe]) -> Result<Vec<Vec<Fe>>, AlgebraError> {
    let p = xs.len();
    let mut cols = Vec::with_capacity(p);
    for i in 0..p {
        let mut unit = vec![Fe(0); p];
        unit[i] = Fe(1);
        let poly = interpolate(field, xs, &unit)?;
        cols.push((0..p).map(|d| poly.coeff(d)).collect::<Vec<_>>());
    }
    // row j of the inverse holds the X^j coefficient of each Lagrange basis polynomial
    Ok((0..p).map(|j| (0..p).map(|i| cols[i][j]).collect()).collect())
}

// ============================================================================
// Subfield embeddings
// ============================================================================

/// Field homomorphism F_{p^a} -> F_{p^b} for a | b.
#[derive(Clone, Debug)]
pub struct Embedding {
    from: Field,
    into: Field,
    powers: Vec<Fe>,
}

impl Embedding {
    pub fn new(from: &Field, into: &Field) -> Result<Embedding, AlgebraError> {
        let err = AlgebraError::NoEmbedding { from: from.size(), into: into.size() };
        if from.characteristic() != into.characteristic() || into.degree() % from.degree() != 0 {
            return Err(err);
        }
        let k = from.degree() as usize;
        let modulus: Vec<Fe> = from.spec().modulus.iter().map(|&c| into.from_u64(c)).collect();
        let root = if k == 1 {
            into.zero()
        } else {
            let g = primitive_root_of_unity(into, from.size() - 1)?;
            let mut x = into.one();
            let mut found = None;
            for _ in 0..from.size() - 1 {
                if Poly::new(modulus.clone()).eval(into, x) == into.zero() {
                    found = Some(x);
                    break;
                }
                x = into.mul(x, g);
            }
            found.ok_or(err)?
        };
        let mut powers = vec![into.one()];
        for _ in 1..k {
            powers.push(into.mul(*powers.last().unwrap(), root));
        }
        Ok(Embedding { from: from.clone(), into: into.clone(), powers })
    }

    pub fn source(&self) -> &Field {
        &self.from
    }
    pub fn target(&self) -> &Field {
        &self.into
    }

    pub fn map(&self, a: Fe) -> Fe {
        self.from
            .digits(a)
            .iter()
            .zip(&self.powers)
            .fold(self.into.zero(), |acc, (&d, &w)| self.into.add(acc, self.into.mul(self.into.from_u64(d), w)))
    }
}

// ============================================================================
// Integer and modulus helpers
// ============================================================================

fn mulmod(a: u128, b: u128, p: u128) -> u128 {
    // p < 2^64 so both operands fit in 64 bits
    (a * b) % p
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let powmod = |mut b: u128, mut e: u64| {
        let m = n as u128;
        let mut acc = 1u128;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        acc
    };
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a as u128, d);
        if x == 1 || x == (n - 1) as u128 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n as u128;
            if x == (n - 1) as u128 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors in ascending order. Trial division, meant for the
/// small group orders that occur at desk scale.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime factorization with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn clmul(a: u128, mut b: u128) -> (u128, u128) {
    let (mut hi, mut lo) = (0u128, 0u128);
    let mut i = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            lo ^= a << i;
            if i > 0 {
                hi ^= a >> (128 - i);
            }
        }
        b >>= 1;
        i += 1;
    }
    (hi, lo)
}

/// Reduces the 256-bit product modulo x^k + low.
fn reduce_binary(mut hi: u128, mut lo: u128, low: u128, k: u32) -> u128 {
    loop {
        let top = if hi != 0 {
            255 - hi.leading_zeros()
        } else if lo != 0 {
            127 - lo.leading_zeros()
        } else {
            return 0;
        };
        if top < k {
            return lo;
        }
        let shift = top - k;
        // clear bit `top` and xor in low << shift
        if top >= 128 {
            hi ^= 1u128 << (top - 128);
        } else {
            lo ^= 1u128 << top;
        }
        if shift < 128 {
            lo ^= low << shift;
            if shift > 0 {
                hi ^= low >> (128 - shift);
            }
        } else {
            hi ^= low << (shift - 128);
        }
    }
}

fn binary_mulmod(a: u128, b: u128, low: u128, k: u32) -> u128 {
    let (hi, lo) = clmul(a, b);
    reduce_binary(hi, lo, low, k)
}

fn binary_gcd(mut a: u128, mut b: u128) -> u128 {
    let deg = |x: u128| 127 - x.leading_zeros() as i32;
    while b != 0 {
        while a != 0 && deg(a) >= deg(b) {
            a ^= b << (deg(a) - deg(b));
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn lowest_binary_irreducible(k: u32) -> u128 {
    let primes: Vec<u32> = prime_factors(k as u128).into_iter().map(|r| r as u32).collect();
    for low in (1u128..(1u128 << k)).step_by(2) {
        // x^(2^j) mod f by repeated squaring
        let xpow = |j: u32| {
            let mut x = 2u128;
            for _ in 0..j {
                x = binary_mulmod(x, x, low, k);
            }
            x
        };
        if xpow(k) != 2 {
            continue;
        }
        let f = (1u128 << k) | low;
        if primes.iter().all(|&r| binary_gcd(f, xpow(k / r) ^ 2) == 1) {
            return low;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

// dense polynomials over F_p as u64 coefficient vectors, used only for modulus search

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let p128 = p as u128;
    let mut r = a.to_vec();
    let df = f.len() - 1;
    let lead_inv = pow_u64(f[df], p - 2, p);
    while r.len() > df {
        let c = *r.last().unwrap();
        if c != 0 {
            let q = mulmod(c as u128, lead_inv as u128, p128);
            let off = r.len() - 1 - df;
            for (i, &fc) in f.iter().enumerate() {
                let s = mulmod(q, fc as u128, p128) as u64;
                r[off + i] = ((r[off + i] as u128 + p128 - s as u128) % p128) as u64;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p128 = p as u128;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + mulmod(x as u128, y as u128, p128)) % p128) as u64;
        }
    }
    poly_rem(&out, f, p)
}

fn poly_pow(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn pow_u64(b: u64, mut e: u64, p: u64) -> u64 {
    let (mut acc, mut b) = (1u128, b as u128 % p as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        e >>= 1;
    }
    acc as u64
}

fn lowest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let primes: Vec<u64> = prime_factors(k as u128).into_iter().map(|r| r as u64).collect();
    let size = (p as u128).pow(k);
    let mut idx = 0u128;
    loop {
        let mut f: Vec<u64> = {
            let mut v = idx;
            (0..k)
                .map(|_| {
                    let d = v % p as u128;
                    v /= p as u128;
                    d as u64
                })
                .collect()
        };
        f.push(1);
        idx += 1;
        assert!(idx <= size, "irreducible polynomials exist in every degree");
        if f[0] == 0 {
            continue;
        }
        // x^(p^j) mod f
        let frob = |j: u32| {
            let mut x = vec![0u64, 1];
            for _ in 0..j {
                x = poly_pow(&x, p, &f, p);
            }
            x
        };
        let x_minus = |mut v: Vec<u64>| {
            v.resize(v.len().max(2), 0);
            v[1] = ((v[1] as u128 + p as u128 - 1) % p as u128) as u64;
            poly_trim(v)
        };
        if !x_minus(frob(k)).is_empty() {
            continue;
        }
        if primes.iter().all(|&r| poly_gcd(&f, &x_minus(frob(k / r as u32)), p).len() == 1) {
            return f;
        }
    }
}
