//! Sequence experiments on fractional parts.
//!
//! Covers the dyadic number `alpha = sum 2^-Delta_i` with
//! `Delta_1 = 1, Delta_{i+1} = 2^Delta_i + Delta_i`, for which
//! `{2^n n alpha} < 1/2` for all `n`; hitting counts for dynamic intervals;
//! and the sequence `{(3/2)^n}`.

use std::fmt;
use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::beta::{BetaSystem, Variant};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, fract, to_f64, Rational};
use crate::pam::{Interval, PamMap};

/// Largest truncation index whose `Delta_i` fits comfortably in memory.
pub const MAX_ALPHA_INDEX: u32 = 4;

/// Default bound on `n` for [`mahler_fraction`].
pub const DEFAULT_MAHLER_CAP: u64 = 100_000;

/// `mantissa / 2^exponent`, with an odd mantissa unless it is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    mantissa: BigInt,
    exponent: u64,
}

impl DyadicRational {
    pub fn new(mantissa: BigInt, exponent: u64) -> Self {
        if mantissa.is_zero() {
            return DyadicRational { mantissa, exponent: 0 };
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0).min(exponent);
        DyadicRational { mantissa: mantissa >> tz, exponent: exponent - tz }
    }

    pub fn zero() -> Self {
        DyadicRational::new(BigInt::zero(), 0)
    }

    /// `2^-k`.
    pub fn unit_fraction(k: u64) -> Self {
        DyadicRational::new(BigInt::one(), k)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn add(&self, other: &DyadicRational) -> Self {
        let e = self.exponent.max(other.exponent);
        let m = (&self.mantissa << (e - self.exponent)) + (&other.mantissa << (e - other.exponent));
        DyadicRational::new(m, e)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        DyadicRational::new(&self.mantissa * k, self.exponent)
    }

    /// Multiplication by `2^k`.
    pub fn shl(&self, k: u64) -> Self {
        if k <= self.exponent {
            DyadicRational::new(self.mantissa.clone(), self.exponent - k)
        } else {
            DyadicRational::new(&self.mantissa << (k - self.exponent), 0)
        }
    }

    /// Fractional part, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let modulus = BigInt::one() << self.exponent;
        DyadicRational::new(self.mantissa.mod_floor(&modulus), self.exponent)
    }

    /// `self < 1/2`.
    pub fn below_half(&self) -> bool {
        if self.exponent == 0 {
            return self.mantissa.is_zero() || self.mantissa < BigInt::zero();
        }
        (&self.mantissa << 1u32) < (BigInt::one() << self.exponent)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << self.exponent)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.to_rational()))
    }
}

/// `[Delta_1, ..., Delta_i]`.
pub fn delta_sequence(i: u32) -> Result<Vec<u64>> {
    if i == 0 || i > MAX_ALPHA_INDEX {
        return Err(Error::PrecisionOverflow(i));
    }
    let mut deltas = vec![1u64];
    while deltas.len() < i as usize {
        let d = *deltas.last().unwrap();
        deltas.push((1u64 << d) + d);
    }
    Ok(deltas)
}

/// `sum_{j <= i} 2^-Delta_j` and the `Delta` list.
pub fn alpha_partial(i: u32) -> Result<(DyadicRational, Vec<u64>)> {
    let deltas = delta_sequence(i)?;
    let alpha = deltas
        .iter()
        .fold(DyadicRational::zero(), |acc, &d| acc.add(&DyadicRational::unit_fraction(d)));
    Ok((alpha, deltas))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub n: u64,
    /// `{2^n n alpha_i}`.
    pub value: DyadicRational,
    pub passes: bool,
}

/// Evaluates `{2^n n alpha_i} < 1/2` for `0 <= n <= n_max`.
///
/// For `n <= Delta_i` the truncation `alpha_i` gives the same verdict as the
/// full `alpha`; larger ranges are refused.
pub fn theorem5_scan(n_max: u64, i: u32) -> Result<Vec<ScanRow>> {
    let (alpha, deltas) = alpha_partial(i)?;
    let delta = *deltas.last().unwrap();
    if n_max > delta {
        return Err(Error::RangeExceedsDelta { n_max, delta });
    }
    Ok((0..=n_max)
        .into_par_iter()
        .map(|n| {
            let value = alpha.mul_int(&BigInt::from(n)).shl(n).fract();
            let passes = value.below_half();
            ScanRow { n, value, passes }
        })
        .collect())
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "value", "value_decimal", "passes"])?;
    for r in rows {
        let v = r.value.to_rational();
        w.write_record([r.n.to_string(), format_rational(&v), to_f64(&v).to_string(), r.passes.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// How many base-`p` digits the dynamic interval is shifted by at time `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    Constant(u32),
    NMinusOne,
    N,
    /// `k(n) = list[n - 1]`.
    Custom(Vec<u32>),
}

impl Schedule {
    pub fn k(&self, n: u64) -> Result<u32> {
        let small = |v: u64| u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("shift {v} too large")));
        match self {
            Schedule::Constant(k) => Ok(*k),
            Schedule::NMinusOne => small(n.saturating_sub(1)),
            Schedule::N => small(n),
            Schedule::Custom(list) => n
                .checked_sub(1)
                .and_then(|i| list.get(i as usize))
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("custom schedule has no entry for n = {n}"))),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Constant(k) => write!(f, "const{k}"),
            Schedule::NMinusOne => f.write_str("n-1"),
            Schedule::N => f.write_str("n"),
            Schedule::Custom(_) => f.write_str("custom"),
        }
    }
}

/// `I(n) = union_{j < p^k(n)} (I + j) / p^k(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicInterval {
    base: Interval,
    p: u64,
    schedule: Schedule,
}

impl DynamicInterval {
    pub fn new(base: Interval, p: u64, schedule: Schedule) -> Result<Self> {
        if !base.is_subset_of(&Interval::unit()) {
            return Err(Error::InvalidArgument(format!("base interval {base} is not inside [0, 1)")));
        }
        if p < 2 {
            return Err(Error::InvalidArgument(format!("p = {p} must be at least 2")));
        }
        if let Schedule::Custom(list) = &schedule {
            if list.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidArgument("custom schedule must be nondecreasing".into()));
            }
        }
        Ok(DynamicInterval { base, p, schedule })
    }

    pub fn base(&self) -> &Interval {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    fn scale(&self, n: u64) -> Result<BigInt> {
        Ok(Pow::pow(BigInt::from(self.p), self.schedule.k(n)?))
    }

    /// The translates making up `I(n)`. There are `p^k(n)` of them.
    pub fn pieces(&self, n: u64) -> Result<Vec<Interval>> {
        let scale = self.scale(n)?;
        let count = scale.to_u64().filter(|&c| c <= 1 << 20).ok_or_else(|| {
            Error::InvalidArgument(format!("I({n}) has {scale} pieces; too many to list"))
        })?;
        let s = Rational::from_integer(scale);
        (0..count)
            .map(|j| {
                let j = Rational::from_integer(j.into());
                Interval::new((self.base.left() + &j) / &s, (self.base.right() + &j) / &s)
            })
            .collect()
    }

    /// Total length of `I(n)`, computed from its pieces.
    pub fn total_length(&self, n: u64) -> Result<Rational> {
        Ok(self.pieces(n)?.iter().map(Interval::length).sum())
    }

    /// `x in I(n)`, found by locating the one translate that can hold `x`.
    pub fn contains(&self, n: u64, x: &Rational) -> Result<bool> {
        let scale = self.scale(n)?;
        let xs = x * Rational::from_integer(scale.clone());
        // largest j with x*P - j >= left
        let j = (&xs - self.base.left()).floor().to_integer();
        Ok(j >= BigInt::zero() && j < scale && xs - Rational::from_integer(j) < *self.base.right())
    }

    /// `{p^k(n) x} in I`.
    pub fn shifted_hits(&self, n: u64, x: &Rational) -> Result<bool> {
        let shifted = x * Rational::from_integer(self.scale(n)?);
        Ok(self.base.contains(&fract(&shifted)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HitReport {
    pub n: u64,
    pub f_dynamic: u64,
    pub f_static_on_shifted: u64,
}

impl HitReport {
    pub fn consistent(&self) -> bool {
        self.f_dynamic == self.f_static_on_shifted
    }
}

/// Counts `x(i) in I(i)` and `{p^k(i) x(i)} in I` over `i = 1..=n`, where
/// `xs[i - 1] = x(i)`.
pub fn dynamic_hit_frequency(xs: &[Rational], interval: &DynamicInterval, n: usize) -> Result<HitReport> {
    if xs.len() < n {
        return Err(Error::InvalidArgument(format!("sequence has {} terms, need {n}", xs.len())));
    }
    let mut f_dynamic = 0;
    let mut f_static_on_shifted = 0;
    for (i, x) in xs[..n].iter().enumerate() {
        let t = i as u64 + 1;
        f_dynamic += u64::from(interval.contains(t, x)?);
        f_static_on_shifted += u64::from(interval.shifted_hits(t, x)?);
    }
    Ok(HitReport { n: n as u64, f_dynamic, f_static_on_shifted })
}

/// Sources of sequences `x(1), x(2), ...` in `[0, 1)`.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `x(n) = {n theta}`.
    FracMultiple(Rational),
    /// `x(n) = f^{n-1}(x0)`, rescaled from the map domain onto `[0, 1)`.
    PamOrbit { map: PamMap, x0: Rational },
    /// Orbit of `x0` under the greedy or lazy map, rescaled by `1/vmax`.
    BetaOrbit { system: BetaSystem, variant: Variant, x0: Rational },
    /// `x(n) = {(3/2)^n}`.
    Mahler,
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::FracMultiple(_) => "n-theta",
            Generator::PamOrbit { .. } => "pam-orbit",
            Generator::BetaOrbit { .. } => "beta-orbit",
            Generator::Mahler => "mahler",
        }
    }

    pub fn take(&self, n: usize) -> Result<Vec<Rational>> {
        match self {
            Generator::FracMultiple(theta) => {
                Ok((1..=n).map(|i| fract(&(theta * Rational::from_integer(i.into())))).collect())
            }
            Generator::PamOrbit { map, x0 } => {
                let (l, len) = (map.domain.left().clone(), map.domain.length());
                let mut out = Vec::with_capacity(n);
                let mut x = x0.clone();
                for i in 0..n {
                    out.push((&x - &l) / &len);
                    if i + 1 < n {
                        x = map.step(&x)?.1;
                    }
                }
                Ok(out)
            }
            Generator::BetaOrbit { system, variant, x0 } => {
                let seq = crate::beta::digit_stream(system, *variant, x0, n.saturating_sub(1))?;
                Ok(seq.orbit.iter().take(n).map(|x| x / system.vmax()).collect())
            }
            Generator::Mahler => mahler_sequence(n as u64),
        }
    }
}

/// `{(3/2)^n} = (3^n mod 2^n) / 2^n`.
pub fn mahler_fraction(n: u64, cap: u64) -> Result<Rational> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let pow3 = Pow::pow(BigUint::from(3u32), n);
    Ok(mahler_from_power(&pow3, n))
}

fn mahler_from_power(pow3: &BigUint, n: u64) -> Rational {
    let mask = (BigUint::one() << n) - BigUint::one();
    Rational::new(BigInt::from(pow3 & mask), BigInt::one() << n)
}

/// `{(3/2)^i}` for `i = 1..=n`, sharing the running power of 3.
pub fn mahler_sequence(n: u64) -> Result<Vec<Rational>> {
    let mut pow3 = BigUint::one();
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        pow3 *= 3u32;
        out.push(mahler_from_power(&pow3, i));
    }
    Ok(out)
}

/// `max_j |#{x < j/2^k}/N - j/2^k|` over the dyadic grid of level `k`.
/// Zero for an empty sequence.
pub fn dyadic_star_discrepancy(points: &[Rational], k: u32) -> Rational {
    if points.is_empty() {
        return Rational::zero();
    }
    let bins = 1usize << k;
    let scale = Rational::from_integer(BigInt::from(bins));
    let mut counts = vec![0u64; bins];
    for x in points {
        let b = (x * &scale).floor().to_integer().to_usize().unwrap_or(bins - 1).min(bins - 1);
        counts[b] += 1;
    }
    let n = Rational::from_integer(points.len().into());
    let mut below = 0u64;
    let mut worst = Rational::zero();
    for (j, c) in counts.iter().enumerate() {
        below += c;
        let emp = Rational::from_integer(below.into()) / &n;
        let target = Rational::new((j + 1).into(), BigInt::from(bins));
        let d = if emp > target { emp - target } else { target - emp };
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::pam::fixtures::*;

    #[test]
    fn dyadic_normalizes() {
        let d = DyadicRational::new(BigInt::from(12), 5);
        assert_eq!((d.mantissa().clone(), d.exponent()), (BigInt::from(3), 3));
        let d = DyadicRational::new(BigInt::from(8), 2);
        assert_eq!((d.mantissa().clone(), d.exponent()), (BigInt::from(2), 0));
        assert_eq!(DyadicRational::new(BigInt::zero(), 9), DyadicRational::zero());
        assert_eq!(DyadicRational::new(BigInt::from(-7), 1).fract().to_rational(), rat(1, 2));
    }

    #[test]
    fn alpha_examples() {
        let (a, d) = alpha_partial(1).unwrap();
        assert_eq!((a.to_rational(), d), (rat(1, 2), vec![1]));
        let (a, d) = alpha_partial(3).unwrap();
        assert_eq!((a.to_rational(), d), (rat(1281, 2048), vec![1, 3, 11]));
        assert_eq!(alpha_partial(4).unwrap().1, vec![1, 3, 11, 2059]);
        assert!(matches!(alpha_partial(5), Err(Error::PrecisionOverflow(5))));
        assert!(matches!(alpha_partial(0), Err(Error::PrecisionOverflow(0))));
    }

    #[test]
    fn scan_examples() {
        let rows = theorem5_scan(11, 3).unwrap();
        assert_eq!(rows[0].value, DyadicRational::zero());
        assert!(rows[0].passes);
        assert_eq!(rows[4].value.to_rational(), rat(1, 32));
        assert!(rows.iter().all(|r| r.passes));
        assert!(matches!(theorem5_scan(12, 3), Err(Error::RangeExceedsDelta { n_max: 12, delta: 11 })));
    }

    #[test]
    fn scan_agrees_with_rational_arithmetic() {
        let (alpha, _) = alpha_partial(3).unwrap();
        let a = alpha.to_rational();
        for row in theorem5_scan(11, 3).unwrap() {
            let direct = fract(&(&a * Rational::from_integer(BigInt::from(row.n) << row.n)));
            assert_eq!(row.value.to_rational(), direct);
            assert_eq!(row.passes, direct < rat(1, 2));
        }
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Constant(3).k(10).unwrap(), 3);
        assert_eq!(Schedule::NMinusOne.k(1).unwrap(), 0);
        assert_eq!(Schedule::N.k(7).unwrap(), 7);
        assert_eq!(Schedule::Custom(vec![0, 2, 2]).k(2).unwrap(), 2);
        assert!(Schedule::Custom(vec![0]).k(2).is_err());
        assert!(DynamicInterval::new(iv(int(0), rat(1, 2)), 2, Schedule::Custom(vec![2, 1])).is_err());
        assert!(DynamicInterval::new(iv(int(0), rat(3, 2)), 2, Schedule::N).is_err());
    }

    #[test]
    fn dynamic_interval_preserves_length() {
        let di = DynamicInterval::new(iv(rat(1, 5), rat(2, 3)), 3, Schedule::N).unwrap();
        for n in 0..6 {
            assert_eq!(di.total_length(n).unwrap(), rat(7, 15));
        }
    }

    #[test]
    fn contains_matches_piece_scan() {
        let di = DynamicInterval::new(iv(rat(1, 5), rat(2, 3)), 2, Schedule::N).unwrap();
        for n in 0..5 {
            let pieces = di.pieces(n).unwrap();
            for k in 0..97 {
                let x = rat(k, 97);
                assert_eq!(di.contains(n, &x).unwrap(), pieces.iter().any(|p| p.contains(&x)), "{n} {x}");
            }
        }
    }

    #[test]
    fn hit_examples() {
        let base = iv(int(0), rat(1, 2));
        let xs = Generator::FracMultiple(rat(1, 3)).take(3).unwrap();
        let still = DynamicInterval::new(base.clone(), 2, Schedule::Constant(0)).unwrap();
        let r = dynamic_hit_frequency(&xs, &still, 3).unwrap();
        assert_eq!(r.f_dynamic, crate::transfer::running_count(&xs, &base)[2]);
        assert!(r.consistent());

        let di = DynamicInterval::new(base.clone(), 2, Schedule::NMinusOne).unwrap();
        let r = dynamic_hit_frequency(&xs, &di, 3).unwrap();
        assert!(r.consistent());
        // x = 1/3, 2/3, 0 shifted by 1, 2, 4: {1/3}, {4/3}, {0} -> 1/3, 1/3, 0
        assert_eq!(r.f_dynamic, 3);

        let xs = Generator::FracMultiple(rat(1281, 2048)).take(100).unwrap();
        let di = DynamicInterval::new(base, 2, Schedule::N).unwrap();
        assert!(dynamic_hit_frequency(&xs, &di, 100).unwrap().consistent());
    }

    #[test]
    fn generators() {
        let pam = Generator::PamOrbit { map: doubling(), x0: rat(1, 5) };
        assert_eq!(pam.take(3).unwrap(), vec![rat(1, 5), rat(2, 5), rat(4, 5)]);
        let sys = BetaSystem::new(rat(5, 2)).unwrap();
        let b = Generator::BetaOrbit { system: sys, variant: Variant::Greedy, x0: int(1) };
        assert_eq!(b.take(2).unwrap(), vec![rat(3, 4), rat(3, 8)]);
        assert_eq!(Generator::Mahler.take(3).unwrap(), vec![rat(1, 2), rat(1, 4), rat(3, 8)]);
        assert!(Generator::Mahler.take(0).unwrap().is_empty());
    }

    #[test]
    fn mahler_examples() {
        assert_eq!(mahler_fraction(1, 10).unwrap(), rat(1, 2));
        assert_eq!(mahler_fraction(3, 10).unwrap(), rat(3, 8));
        assert_eq!(mahler_fraction(5, 10).unwrap(), rat(19, 32));
        assert!(matches!(mahler_fraction(11, 10), Err(Error::CapExceeded { n: 11, cap: 10 })));
        let seq = mahler_sequence(60).unwrap();
        for (i, x) in seq.iter().enumerate() {
            let n = i as u64 + 1;
            assert_eq!(x, &mahler_fraction(n, 60).unwrap());
            assert_eq!(x, &fract(&num_traits::pow(rat(3, 2), n as usize)));
        }
    }

    #[test]
    fn discrepancy() {
        let pts: Vec<Rational> = (0..8).map(|k| rat(k, 8)).collect();
        assert_eq!(dyadic_star_discrepancy(&pts, 3), int(0));
        assert_eq!(dyadic_star_discrepancy(&[int(0)], 1), rat(1, 2));
        assert_eq!(dyadic_star_discrepancy(&[], 4), int(0));
    }

    #[test]
    fn scan_csv() {
        let rows = theorem5_scan(4, 3).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(5).unwrap(), "4,1/32,0.03125,true");
    }
}
