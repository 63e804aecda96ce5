//! Exact rationals, prime bases and p-adic weights.
//!
//! The p-adic *weight* of a nonzero rational is the negated p-adic valuation:
//! writing `x = p^v * r / s` with `p` dividing neither `r` nor `s`, the weight
//! is `-v`. Large positive weights therefore mean "many factors of `p` in the
//! denominator". The m-weight over a finite [`PrimeBasis`] is the maximum of
//! the per-prime weights, or [`MWeight::Infinite`] when the denominator has a
//! prime factor outside the basis.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Trial-division bound used when a basis has to be inferred from data.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

/// Largest `m^(a-1)` that [`enumerate_bounded_weight`] will scan by default.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"-p/q"` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(text.to_string());
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = d.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical `"p/q"` form; integers keep the `/1` suffix.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Lossy decimal view, for plotting columns only.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale both down to a common exponent.
        let nb = x.numer().bits() as i64;
        let db = x.denom().bits() as i64;
        let shift = (nb.max(db) - 1000).max(0) as usize;
        let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
        if d == 0.0 {
            0.0
        } else {
            n / d
        }
    })
}

/// `{x}`, the fractional part, always in `[0, 1)`.
pub fn fract(x: &Rational) -> Rational {
    x - x.floor()
}

/// Hash-map key for a canonical rational.
///
/// `num-rational` hashes through the continued-fraction expansion, which is
/// quadratic in the operand size and dominates long orbit scans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatKey(pub Rational);

impl Hash for RatKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.numer().hash(state);
        self.0.denom().hash(state);
    }
}

fn gcd_with_small(big: &BigInt, small: &BigInt) -> BigInt {
    if small.is_zero() {
        return big.abs();
    }
    small.gcd(&big.mod_floor(small))
}

/// `a*x + b`, reduced without a full-size gcd.
///
/// With `x = n/d` in lowest terms, any common factor of the raw numerator and
/// denominator divides `den(a) * den(b) * gcd(num(a)*den(b), d)`, which only
/// depends on the (small) coefficients. Both reductions are therefore taken
/// modulo that small number.
pub fn affine_apply(a: &Rational, b: &Rational, x: &Rational) -> Rational {
    if a.is_zero() || x.is_zero() {
        return b.clone();
    }
    let (an, ad) = (a.numer(), a.denom());
    let (bn, bd) = (b.numer(), b.denom());
    let (xn, xd) = (x.numer(), x.denom());
    let n = an * xn * bd + bn * xd * ad;
    if n.is_zero() {
        return Rational::zero();
    }
    let d = ad * bd * xd;
    let bound = ad * bd * gcd_with_small(xd, &(an * bd).abs());
    let g = gcd_with_small(&n, &bound);
    let g = gcd_with_small(&d, &g);
    if g.is_one() {
        Rational::new_raw(n, d)
    } else {
        Rational::new_raw(n / &g, d / &g)
    }
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exponent of `p` in `n` (`n != 0`).
fn valuation(n: &BigUint, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let p = BigUint::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

fn strip_prime(n: &mut BigUint, p: u64) {
    let p = BigUint::from(p);
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        *n = q;
    }
}

/// Distinct prime factors of `n`, by trial division up to `trial_bound`.
///
/// A cofactor left over after trial division is accepted when it fits in a
/// `u64` and passes [`is_prime`]; otherwise the number is rejected.
pub fn prime_support(n: &BigUint, trial_bound: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    if n.is_zero() {
        return Ok(out);
    }
    let mut rest = n.clone();
    let mut d = 2u64;
    while d <= trial_bound {
        if rest.is_one() {
            return Ok(out);
        }
        let dd = BigUint::from(d) * d;
        if dd > rest {
            break;
        }
        if (&rest % d).is_zero() {
            out.push(d);
            strip_prime(&mut rest, d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        match rest.to_u64() {
            Some(r) if is_prime(r) => out.push(r),
            _ => return Err(Error::UnfactorableCoefficient(n.to_string())),
        }
    }
    Ok(out)
}

/// Finite, ascending, non-empty set of primes together with their product `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeBasis {
    primes: Vec<u64>,
    m: BigUint,
}

impl PrimeBasis {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let set: BTreeSet<u64> = primes.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if let Some(&bad) = set.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(bad));
        }
        let primes: Vec<u64> = set.into_iter().collect();
        let m = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
        Ok(PrimeBasis { primes, m })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn m(&self) -> &BigUint {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn largest(&self) -> u64 {
        *self.primes.last().expect("basis is non-empty")
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn union(&self, extra: &[u64]) -> Result<Self> {
        PrimeBasis::new(self.primes.iter().chain(extra).copied())
    }

    /// Smallest basis containing every prime that divides a numerator or
    /// denominator of `values`. Falls back to `{2}` when all values are units
    /// or zero.
    pub fn covering<'a, I>(values: I, trial_bound: u64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Rational>,
    {
        let mut primes = BTreeSet::new();
        for x in values {
            if x.is_zero() {
                continue;
            }
            primes.extend(prime_support(x.numer().magnitude(), trial_bound)?);
            primes.extend(prime_support(x.denom().magnitude(), trial_bound)?);
        }
        if primes.is_empty() {
            primes.insert(2);
        }
        PrimeBasis::new(primes)
    }

    /// Extends the basis by the primes that make `x` have infinite m-weight.
    pub fn extend_for(&self, x: &Rational, trial_bound: u64) -> Result<Self> {
        let residual = self.residual_denominator(x);
        if residual.is_one() {
            return Ok(self.clone());
        }
        let extra = prime_support(&residual, trial_bound)?;
        self.union(&extra)
    }

    fn residual_denominator(&self, x: &Rational) -> BigUint {
        let mut d = x.denom().magnitude().clone();
        for &p in &self.primes {
            strip_prime(&mut d, p);
        }
        d
    }
}

impl fmt::Display for PrimeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.primes.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

/// The m-weight of a rational: a finite integer or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MWeight {
    Finite(i64),
    Infinite,
}

impl MWeight {
    pub fn finite(self) -> Option<i64> {
        match self {
            MWeight::Finite(w) => Some(w),
            MWeight::Infinite => None,
        }
    }
}

impl fmt::Display for MWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MWeight::Finite(w) => write!(f, "{w}"),
            MWeight::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    /// One entry per basis prime, in basis order.
    pub per_prime: Vec<i64>,
    pub m_weight: MWeight,
    /// Some prime outside the basis divides the denominator.
    pub residual: bool,
}

pub fn padic_weight(x: &Rational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroHasNoWeight);
    }
    let vn = valuation(x.numer().magnitude(), p) as i64;
    let vd = valuation(x.denom().magnitude(), p) as i64;
    Ok(vd - vn)
}

pub fn m_weight_vector(x: &Rational, basis: &PrimeBasis) -> Result<WeightVector> {
    if x.is_zero() {
        return Err(Error::ZeroHasNoWeight);
    }
    let per_prime = basis
        .primes()
        .iter()
        .map(|&p| padic_weight(x, p))
        .collect::<Result<Vec<_>>>()?;
    let residual = !basis.residual_denominator(x).is_one();
    let m_weight = if residual {
        MWeight::Infinite
    } else {
        MWeight::Finite(*per_prime.iter().max().expect("basis is non-empty"))
    };
    Ok(WeightVector {
        per_prime,
        m_weight,
        residual,
    })
}

pub fn m_weight(x: &Rational, basis: &PrimeBasis) -> Result<MWeight> {
    Ok(m_weight_vector(x, basis)?.m_weight)
}

/// m-weight with zero mapped to `None` ("below every threshold").
pub fn m_weight_of_nonzero(x: &Rational, basis: &PrimeBasis) -> Option<MWeight> {
    if x.is_zero() {
        None
    } else {
        Some(m_weight(x, basis).expect("nonzero"))
    }
}

/// A lower bound `b` on every p-adic weight (over all primes) of rationals in
/// `[0, 1]` whose m-weight is finite and below `a`.
///
/// `b = -alpha` where `alpha` is the largest integer with
/// `2^alpha <= p_k^(k*a)`, decided by integer comparison.
pub fn weight_lower_bound(a: u32, basis: &PrimeBasis) -> i64 {
    let exp = basis.len() as u32 * a;
    let bound = BigUint::from(basis.largest()).pow(exp);
    // 2^alpha <= bound  <=>  alpha <= bits(bound) - 1
    -(bound.bits() as i64 - 1)
}

/// All rationals in `[0, 1]` with finite m-weight below `a`, i.e. the subset
/// of `{ j / m^(a-1) : 0 <= j <= m^(a-1) }` passing the weight filter.
/// Zero is always included.
pub fn enumerate_bounded_weight(a: u32, basis: &PrimeBasis, cap: u64) -> Result<BTreeSet<Rational>> {
    let mut out = BTreeSet::new();
    out.insert(Rational::zero());
    if a == 0 {
        return Ok(out);
    }
    let denom = basis.m().pow(a - 1);
    match denom.to_u64() {
        Some(n) if n <= cap => {}
        _ => {
            return Err(Error::EnumerationTooLarge {
                size: denom.to_string(),
                cap,
            })
        }
    }
    let n = denom.to_u64().expect("checked above");
    let d = BigInt::from_biguint(Sign::Plus, denom);
    for j in 1..=n {
        let x = Rational::new(BigInt::from(j), d.clone());
        if let MWeight::Finite(w) = m_weight(&x, basis)? {
            if w < a as i64 {
                out.insert(x);
            }
        }
    }
    Ok(out)
}

/// Largest `r >= 0` with `base^r <= limit`, for `base > 1` and `limit >= 1`.
///
/// Decides `r <= ln(limit) / ln(base)` without logarithms.
pub fn max_power_below(base: &Rational, limit: &Rational) -> u64 {
    assert!(*base > Rational::one(), "base must exceed one");
    let mut r = 0u64;
    let mut acc = base.clone();
    while acc <= *limit {
        r += 1;
        acc *= base;
    }
    r
}
