//! Soundness bounds: Johnson function, gamma, err_commit, err_query, the total
//! error and repetition planning.
//!
//! Every quantity is an [`Interval`] of fixed-point numbers with 320 fractional
//! bits and outward rounding, so the upper end of a bound is never below the
//! true value.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::make_field;
use crate::curves::KummerCurve;
use crate::rrbasis::{hu_yang_basis, Divisor};

const PREC: usize = 320;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SoundnessError {
    #[error("{name} = {value} is outside {range}")]
    Domain { name: &'static str, value: String, range: &'static str },
    #[error("err_query >= 1 ({0}), repetition cannot reach the target")]
    NoAmplification(String),
    #[error("err_commit = 2^{0:.2} already exceeds half the target 2^-{1}")]
    CommitTooLarge(f64, u32),
    #[error("target security level must be positive")]
    ZeroTarget,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn unit() -> BigInt {
    BigInt::one() << PREC
}

/// Closed interval [lo, hi] * 2^-320.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
}

impl Interval {
    pub fn int(v: i64) -> Interval {
        let x = BigInt::from(v) << PREC;
        Interval { lo: x.clone(), hi: x }
    }

    pub fn ratio(num: i128, den: i128) -> Interval {
        assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let n = BigInt::from(num) << PREC;
        let d = BigInt::from(den);
        Interval { lo: floor_div(&n, &d), hi: ceil_div(&n, &d) }
    }

    pub fn from_ratio(r: Ratio<i64>) -> Interval {
        Interval::ratio(*r.numer() as i128, *r.denom() as i128)
    }

    pub fn from_u128(v: u128) -> Interval {
        let x = BigInt::from(v) << PREC;
        Interval { lo: x.clone(), hi: x }
    }

    /// 2^{num/den}.
    pub fn pow2(num: i64, den: u32) -> Interval {
        assert!(den >= 1);
        let shift = num + (PREC as i64) * den as i64;
        assert!(shift >= 0, "exponent too negative for the working precision");
        let x = BigInt::one() << shift as usize;
        let lo = x.nth_root(den);
        let hi = if lo.pow(den) == x { lo.clone() } else { &lo + 1 };
        Interval { lo, hi }
    }

    /// log2 of a positive integer, bit by bit to `bits` fractional bits.
    pub fn log2_int(n: u128) -> Interval {
        assert!(n >= 1);
        let k = 127 - n.leading_zeros() as i64;
        if n.is_power_of_two() {
            return Interval::int(k);
        }
        const BITS: usize = 160;
        let one = unit();
        let two = &one << 1;
        // y = n / 2^k in [1, 2)
        let y0 = BigInt::from(n) << PREC;
        let run = |mut y: BigInt, up: bool| -> BigInt {
            y >>= k as usize;
            let mut frac = BigInt::zero();
            for _ in 0..BITS {
                let sq = &y * &y;
                y = if up { ceil_div(&sq, &one) } else { floor_div(&sq, &one) };
                frac <<= 1;
                if y >= two {
                    frac += 1;
                    y = if up { ceil_div(&y, &BigInt::from(2)) } else { floor_div(&y, &BigInt::from(2)) };
                }
            }
            frac
        };
        let lo_frac = run(y0.clone(), false);
        let hi_frac = run(y0, true) + 1;
        let base = BigInt::from(k) << PREC;
        let scale = PREC - BITS;
        Interval { lo: &base + (lo_frac << scale), hi: &base + (hi_frac << scale) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let one = unit();
        let min = c.iter().min().unwrap();
        let max = c.iter().max().unwrap();
        Interval { lo: floor_div(min, &one), hi: ceil_div(max, &one) }
    }
    /// Division by an interval of positive numbers.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(o.lo.is_positive(), "division by an interval containing 0");
        let a = [&self.lo << PREC, &self.hi << PREC];
        let los = a.iter().flat_map(|x| [floor_div(x, &o.lo), floor_div(x, &o.hi)]).min().unwrap();
        let his = a.iter().flat_map(|x| [ceil_div(x, &o.lo), ceil_div(x, &o.hi)]).max().unwrap();
        Interval { lo: los, hi: his }
    }
    /// k-th root of a nonnegative interval (negative lower ends clamp to 0).
    pub fn root(&self, k: u32) -> Interval {
        let scale = |x: &BigInt| -> BigInt {
            if x.is_negative() {
                BigInt::zero()
            } else {
                x << (PREC * (k as usize - 1))
            }
        };
        let lo = scale(&self.lo).nth_root(k);
        let h = scale(&self.hi);
        let r = h.nth_root(k);
        let hi = if r.pow(k) == h { r } else { r + 1 };
        Interval { lo, hi }
    }
    pub fn sqrt(&self) -> Interval {
        self.root(2)
    }
    /// Integer power of a nonnegative interval.
    pub fn powi(&self, mut e: u64) -> Interval {
        let mut base = self.clone();
        let mut acc = Interval::int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
    pub fn min(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().min(o.hi.clone()) }
    }
    pub fn max(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.clone().max(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }
    /// Certainly at most `o`.
    pub fn le(&self, o: &Interval) -> bool {
        self.hi <= o.lo
    }
    pub fn lo_f64(&self) -> f64 {
        to_f64(&self.lo)
    }
    pub fn hi_f64(&self) -> f64 {
        to_f64(&self.hi)
    }
    /// log2 of the upper end, for reporting.
    pub fn log2_hi(&self) -> f64 {
        log2_scaled(&self.hi)
    }
    pub fn log2_lo(&self) -> f64 {
        log2_scaled(&self.lo)
    }
    /// Width of the interval as a power of two.
    pub fn width_log2(&self) -> f64 {
        log2_scaled(&(&self.hi - &self.lo))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

fn to_f64(x: &BigInt) -> f64 {
    let bits = x.bits() as i64;
    if bits <= 1000 {
        x.to_f64().unwrap() / 2f64.powi(PREC as i32)
    } else {
        let shift = (bits - 900) as usize;
        (x >> shift).to_f64().unwrap() * 2f64.powi(shift as i32 - PREC as i32)
    }
}

fn log2_scaled(x: &BigInt) -> f64 {
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits() as i64;
    let shift = (bits - 60).max(0) as usize;
    let top = (x >> shift).to_f64().unwrap();
    top.log2() + shift as f64 - PREC as f64
}

/// A proximity parameter given exactly: a fraction or a power 2^{num/den}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Epsilon {
    Ratio(i64, i64),
    Pow2(i64, u32),
}

impl Epsilon {
    pub fn interval(&self) -> Interval {
        match *self {
            Epsilon::Ratio(n, d) => Interval::ratio(n as i128, d as i128),
            Epsilon::Pow2(n, d) => Interval::pow2(n, d),
        }
    }
    pub fn approx(&self) -> f64 {
        match *self {
            Epsilon::Ratio(n, d) => n as f64 / d as f64,
            Epsilon::Pow2(n, d) => 2f64.powf(n as f64 / d as f64),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Ratio(n, d) => write!(f, "{n}/{d}"),
            Epsilon::Pow2(n, d) => write!(f, "2^({n}/{d})"),
        }
    }
}

/// How gamma is derived from lambda, epsilon and p_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRule {
    /// min(J_eps^{p_max}(lambda), (lambda + eps/2) / 2).
    #[default]
    Johnson,
    /// 1 - (1 - lambda + eps)^{1/(p_max+1)}, the form used in the published
    /// numeric example.
    Root,
}

fn check_unit(name: &'static str, v: &Interval, open_low: bool) -> Result<(), SoundnessError> {
    let zero = Interval::int(0);
    let one = Interval::int(1);
    let bad = if open_low { v.hi <= zero.lo } else { v.hi < zero.lo } || v.lo > one.hi;
    if bad {
        return Err(SoundnessError::Domain { name, value: v.to_string(), range: "[0, 1]" });
    }
    Ok(())
}

/// J_eps(lambda) = 1 - sqrt(1 - (1 - eps) lambda).
pub fn johnson(eps: &Interval, lambda: &Interval) -> Result<Interval, SoundnessError> {
    check_unit("epsilon", eps, true)?;
    check_unit("lambda", lambda, false)?;
    let one = Interval::int(1);
    Ok(one.sub(&one.sub(&one.sub(eps).mul(lambda)).sqrt()))
}

/// J_eps applied l times.
pub fn johnson_iter(eps: &Interval, lambda: &Interval, l: u32) -> Result<Interval, SoundnessError> {
    let mut v = lambda.clone();
    for _ in 0..l {
        v = johnson(eps, &v)?;
    }
    Ok(v)
}

pub fn gamma(lambda: &Interval, eps: &Interval, p_max: u32, rule: GammaRule) -> Result<Interval, SoundnessError> {
    match rule {
        GammaRule::Johnson => {
            let j = johnson_iter(eps, lambda, p_max)?;
            let half = Interval::ratio(1, 2);
            Ok(j.min(&half.mul(&lambda.add(&half.mul(eps)))))
        }
        GammaRule::Root => {
            check_unit("epsilon", eps, true)?;
            check_unit("lambda", lambda, false)?;
            let one = Interval::int(1);
            Ok(one.sub(&one.sub(lambda).add(eps).root(p_max + 1)))
        }
    }
}

/// (log2 n / |F|) (p_max + 4/eps - 1) (4/eps)^{p_max}.
pub fn err_commit(n: u128, field_size: u128, p_max: u32, eps: &Interval) -> Interval {
    let four_eps = Interval::int(4).div(eps);
    let lin = Interval::int(p_max as i64 - 1).add(&four_eps);
    Interval::log2_int(n).div(&Interval::from_u128(field_size)).mul(&lin).mul(&four_eps.powi(p_max as u64))
}

/// 1 - min(delta, gamma) + eps log2 n.
pub fn err_query(delta: &Interval, gamma: &Interval, eps: &Interval, n: u128) -> Interval {
    Interval::int(1).sub(&delta.min(gamma)).add(&eps.mul(&Interval::log2_int(n)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessParams {
    pub n: u128,
    pub field_size: u128,
    pub p_max: u32,
    pub lambda: Ratio<i64>,
    pub epsilon: Epsilon,
    /// Distance of the word; `None` means delta >= gamma.
    pub delta: Option<Ratio<i64>>,
    pub gamma_rule: GammaRule,
}

/// All intermediate values of the bound.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub epsilon: Interval,
    pub lambda: Interval,
    pub johnson: Interval,
    pub gamma: Interval,
    pub err_commit: Interval,
    pub err_query: Interval,
}

pub fn evaluate(params: &SoundnessParams) -> Result<Evaluation, SoundnessError> {
    let eps = params.epsilon.interval();
    let lambda = Interval::from_ratio(params.lambda);
    let j = johnson_iter(&eps, &lambda, params.p_max)?;
    let g = gamma(&lambda, &eps, params.p_max, params.gamma_rule)?;
    let delta = params.delta.map(Interval::from_ratio).unwrap_or_else(|| g.clone());
    Ok(Evaluation {
        err_commit: err_commit(params.n, params.field_size, params.p_max, &eps),
        err_query: err_query(&delta, &g, &eps, params.n),
        epsilon: eps,
        lambda,
        johnson: j,
        gamma: g,
    })
}

/// err_commit + err_query^t.
pub fn total_err(params: &SoundnessParams, t: u64) -> Result<Interval, SoundnessError> {
    let e = evaluate(params)?;
    Ok(e.err_commit.add(&e.err_query.powi(t)))
}

/// Smallest t with err_query^t <= 2^{-kappa-1}, provided err_commit <= 2^{-kappa-1},
/// so that the total is at most 2^{-kappa}.
pub fn min_repetitions(params: &SoundnessParams, kappa: u32) -> Result<u64, SoundnessError> {
    if kappa == 0 {
        return Err(SoundnessError::ZeroTarget);
    }
    let e = evaluate(params)?;
    repetitions_for(&e, kappa)
}

fn repetitions_for(e: &Evaluation, kappa: u32) -> Result<u64, SoundnessError> {
    let target = Interval::pow2(-(kappa as i64) - 1, 1);
    if !e.err_commit.le(&target) {
        return Err(SoundnessError::CommitTooLarge(e.err_commit.log2_hi(), kappa + 1));
    }
    let q = Interval { lo: e.err_query.hi.clone(), hi: e.err_query.hi.clone() };
    if !q.le(&Interval::int(1)) || q.hi == unit() {
        return Err(SoundnessError::NoAmplification(format!("{:.6}", e.err_query.hi_f64())));
    }
    let fits = |t: u64| q.powi(t).le(&target);
    let mut hi = 1u64;
    while !fits(hi) {
        hi *= 2;
        if hi > 1 << 40 {
            return Err(SoundnessError::NoAmplification(format!("{:.6}", e.err_query.hi_f64())));
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Picks epsilon = 2^{-a/100} minimizing t for the target, scanning a in
/// [50, 2000]. Returns the epsilon and its t.
pub fn best_epsilon(base: &SoundnessParams, kappa: u32) -> Result<(Epsilon, u64), SoundnessError> {
    // coarse pass in floating point, then exact evaluation near the optimum
    let approx_t = |a: i64| -> Option<f64> {
        let eps = 2f64.powf(-(a as f64) / 100.0);
        let lambda = *base.lambda.numer() as f64 / *base.lambda.denom() as f64;
        let g = match base.gamma_rule {
            GammaRule::Johnson => {
                let mut v = lambda;
                for _ in 0..base.p_max {
                    v = 1.0 - (1.0 - (1.0 - eps) * v).sqrt();
                }
                v.min(0.5 * (lambda + eps / 2.0))
            }
            GammaRule::Root => 1.0 - (1.0 - lambda + eps).powf(1.0 / (base.p_max as f64 + 1.0)),
        };
        let d = base.delta.map(|r| *r.numer() as f64 / *r.denom() as f64).unwrap_or(g);
        let logn = (base.n as f64).log2();
        let q = 1.0 - d.min(g) + eps * logn;
        let commit =
            logn / base.field_size as f64 * (base.p_max as f64 + 4.0 / eps - 1.0) * (4.0 / eps).powi(base.p_max as i32);
        if q >= 1.0 || commit.log2() > -(kappa as f64) - 1.0 {
            return None;
        }
        Some((kappa as f64 + 1.0) / -q.log2())
    };
    let best = (50..=2000)
        .filter_map(|a| approx_t(a).map(|t| (a, t)))
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal));
    let Some((a0, _)) = best else {
        let p = SoundnessParams { epsilon: Epsilon::Pow2(-650, 100), ..base.clone() };
        return min_repetitions(&p, kappa).map(|t| (p.epsilon, t));
    };
    let mut winner: Option<(Epsilon, u64)> = None;
    for a in (a0 - 5).max(1)..=a0 + 5 {
        let p = SoundnessParams { epsilon: Epsilon::Pow2(-a, 100), ..base.clone() };
        if let Ok(t) = min_repetitions(&p, kappa) {
            if winner.map_or(true, |(_, w)| t < w) {
                winner = Some((p.epsilon, t));
            }
        }
    }
    winner.ok_or_else(|| SoundnessError::NoAmplification("no epsilon reaches the target".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub params: SoundnessParams,
    pub kappa: Option<u32>,
    pub epsilon: f64,
    pub log2_epsilon: f64,
    pub johnson_iter: f64,
    pub gamma: f64,
    pub log2_err_commit: f64,
    pub err_query: f64,
    pub t: Option<u64>,
    pub log2_total: Option<f64>,
    pub note: Option<String>,
}

pub fn report(params: &SoundnessParams, kappa: Option<u32>, t: Option<u64>) -> Result<SoundnessReport, SoundnessError> {
    let e = evaluate(params)?;
    let mut note = None;
    let t = match (t, kappa) {
        (Some(t), _) => Some(t),
        (None, Some(k)) => match repetitions_for(&e, k) {
            Ok(t) => Some(t),
            Err(err) => {
                note = Some(err.to_string());
                None
            }
        },
        (None, None) => None,
    };
    let total = t.map(|t| e.err_commit.add(&e.err_query.powi(t)).log2_hi());
    Ok(SoundnessReport {
        params: params.clone(),
        kappa,
        epsilon: e.epsilon.hi_f64(),
        log2_epsilon: e.epsilon.log2_hi(),
        johnson_iter: e.johnson.lo_f64(),
        gamma: e.gamma.lo_f64(),
        log2_err_commit: e.err_commit.log2_hi(),
        err_query: e.err_query.hi_f64(),
        t,
        log2_total: total,
        note,
    })
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(f, "n = {}, |F| = {}, p_max = {}, lambda >= {}", p.n, p.field_size, p.p_max, p.lambda)?;
        writeln!(f, "epsilon = {} = 2^{:.4} ({:.6e})", p.epsilon, self.log2_epsilon, self.epsilon)?;
        match p.delta {
            Some(d) => writeln!(f, "delta = {d}")?,
            None => writeln!(f, "delta >= gamma")?,
        }
        writeln!(f, "J_eps^p_max(lambda) = {:.6}", self.johnson_iter)?;
        writeln!(f, "gamma ({:?}) = {:.6}", p.gamma_rule, self.gamma)?;
        writeln!(f, "err_commit <= 2^{:.4}", self.log2_err_commit)?;
        writeln!(f, "err_query <= {:.6}", self.err_query)?;
        if let Some(t) = self.t {
            writeln!(f, "t = {t}{}", self.kappa.map(|k| format!(" for kappa = {k}")).unwrap_or_default())?;
        }
        if let Some(l) = self.log2_total {
            writeln!(f, "err <= 2^{l:.4}")?;
        }
        if let Some(n) = &self.note {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// The published numeric example: y^{2^16} = x^3 + x over F_{q^2} with
/// q = 2^61 - 1, D_0 = 2^17 P_inf, n = 2^20, p_max = 2, lambda >= 1 - 2^-3,
/// epsilon = 2^-6.55, kappa = 90.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkedExample {
    pub genus: u64,
    pub dim_c0: usize,
    pub report: SoundnessReport,
}

pub fn worked_example_params() -> SoundnessParams {
    let q: u128 = (1 << 61) - 1;
    SoundnessParams {
        n: 1 << 20,
        field_size: q * q,
        p_max: 2,
        lambda: Ratio::new(7, 8),
        epsilon: Epsilon::Pow2(-655, 100),
        delta: None,
        gamma_rule: GammaRule::Root,
    }
}

pub fn worked_example() -> WorkedExample {
    let field = make_field((1 << 61) - 1, 2).expect("Mersenne quadratic field");
    // x^3 + x = x (x - i)(x + i) with i^2 = -1
    let i = crate::algebra::primitive_root_of_unity(&field, 4).expect("q^2 - 1 is divisible by 4");
    let roots = vec![field.zero(), i, field.neg(i)];
    let curve = KummerCurve::new(&field, 1 << 16, roots).expect("valid curve");
    let basis = hu_yang_basis(&curve, &Divisor::at_infinity(0, 1 << 17)).expect("one-point divisor");
    let params = worked_example_params();
    WorkedExample {
        genus: curve.genus(),
        dim_c0: basis.len(),
        report: report(&params, Some(90), None).expect("example parameters are in range"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn johnson_edges() {
        let one = Interval::int(1);
        let zero = Interval::int(0);
        let j = johnson(&Interval::pow2(-200, 1), &one).unwrap();
        assert!(j.lo_f64() > 1.0 - 1e-15 && j.hi_f64() <= 1.0 + 1e-60);
        assert!(johnson(&zero, &one).is_err());
        let j = johnson(&Interval::ratio(1, 3), &zero).unwrap();
        assert!(j.hi_f64().abs() < 1e-60);
        let v = johnson_iter(&Interval::ratio(1, 4), &Interval::ratio(3, 4), 2).unwrap();
        let f = |l: f64| 1.0 - (1.0 - 0.75 * l).sqrt();
        assert!((v.lo_f64() - f(f(0.75))).abs() < 1e-12);
        assert!(v.width_log2() < -200.0);
    }

    #[test]
    fn roots_and_logs() {
        let s = Interval::int(2).sqrt();
        assert!(s.lo_f64() <= 2f64.sqrt() && s.hi_f64() >= 2f64.sqrt() - 1e-15);
        let l = Interval::log2_int(20);
        assert!((l.lo_f64() - 20f64.log2()).abs() < 1e-12);
        assert!(l.lo <= l.hi);
        let e = Interval::pow2(-655, 100);
        assert!((e.lo_f64() - 2f64.powf(-6.55)).abs() < 1e-15);
    }

    #[test]
    fn gamma_small_cases() {
        let g = gamma(&Interval::int(1), &Interval::pow2(-200, 1), 1, GammaRule::Johnson).unwrap();
        assert!((g.hi_f64() - 0.5).abs() < 1e-40);
    }

    #[test]
    fn commit_scales_with_field() {
        let e = Interval::ratio(1, 10);
        let a = err_commit(1 << 10, 1 << 40, 2, &e);
        let b = err_commit(1 << 10, 1 << 41, 2, &e);
        assert!((a.hi_f64() / b.hi_f64() - 2.0).abs() < 1e-9);
        let c = err_commit(1 << 10, 1 << 40, 2, &Interval::ratio(1, 5));
        assert!(c.hi_f64() < a.hi_f64());
    }

    #[test]
    fn zero_delta_cannot_amplify() {
        let mut p = worked_example_params();
        p.delta = Some(Ratio::new(0, 1));
        assert!(matches!(min_repetitions(&p, 90), Err(SoundnessError::NoAmplification(_))));
        assert!(matches!(min_repetitions(&worked_example_params(), 0), Err(SoundnessError::ZeroTarget)));
    }
}
