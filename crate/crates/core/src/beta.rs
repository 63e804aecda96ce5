//! Expansions in a rational non-integer base `beta > 1`.
//!
//! With `c = ceil(beta)` digits `0..c` and `vmax = (c - 1)/(beta - 1)`, every
//! point of `[0, vmax)` has an expansion `x = sum d_i beta^-i`. Digit `d` is
//! admissible at `x` exactly when `x` lies in
//! `X_d = [d/beta, (vmax + d)/beta)`, and the next point is `beta*x - d`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, to_f64, Rational};
use crate::pam::{iterate_orbit, AffinePiece, Interval, OrbitVerdict, PamMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Nondet,
    Greedy,
    Lazy,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nondet" => Ok(Variant::Nondet),
            "greedy" => Ok(Variant::Greedy),
            "lazy" => Ok(Variant::Lazy),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Nondet => "nondet",
            Variant::Greedy => "greedy",
            Variant::Lazy => "lazy",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSystem {
    beta: Rational,
    digits: u64,
    vmax: Rational,
    branch_intervals: Vec<Interval>,
}

impl BetaSystem {
    pub fn new(beta: Rational) -> Result<Self> {
        if beta <= Rational::one() {
            return Err(Error::BaseNotGreaterThanOne);
        }
        if beta.is_integer() {
            return Err(Error::IntegerBase);
        }
        let digits = beta.ceil().to_integer().to_u64().ok_or(Error::BaseOutOfRange)?;
        let vmax = Rational::from_integer((digits - 1).into()) / (&beta - Rational::one());
        let branch_intervals = (0..digits)
            .map(|d| {
                let d = Rational::from_integer(d.into());
                Interval::new(&d / &beta, (&vmax + &d) / &beta)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BetaSystem { beta, digits, vmax, branch_intervals })
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// Number of digits, `ceil(beta)`.
    pub fn digit_count(&self) -> u64 {
        self.digits
    }

    pub fn vmin(&self) -> Rational {
        Rational::zero()
    }

    pub fn vmax(&self) -> &Rational {
        &self.vmax
    }

    pub fn domain(&self) -> Interval {
        Interval::new(Rational::zero(), self.vmax.clone()).expect("vmax > 0")
    }

    /// `X_d` for every digit `d`.
    pub fn branch_intervals(&self) -> &[Interval] {
        &self.branch_intervals
    }

    /// `h(x) = vmax - x`, the involution exchanging greedy and lazy.
    pub fn mirror(&self, x: &Rational) -> Rational {
        &self.vmax - x
    }

    /// Pieces of the requested variant, indexed by digit.
    pub fn pieces(&self, variant: Variant) -> Vec<AffinePiece> {
        let c = self.digits as usize;
        let dr = |d: usize| Rational::from_integer(d.into());
        (0..c)
            .map(|d| {
                let domain = match variant {
                    Variant::Nondet => self.branch_intervals[d].clone(),
                    Variant::Greedy if d + 1 < c => Interval::new(dr(d) / &self.beta, dr(d + 1) / &self.beta).expect("1/beta > 0"),
                    Variant::Greedy => self.branch_intervals[d].clone(),
                    Variant::Lazy if d == 0 => self.branch_intervals[0].clone(),
                    Variant::Lazy => Interval::new(
                        (&self.vmax + dr(d - 1)) / &self.beta,
                        (&self.vmax + dr(d)) / &self.beta,
                    )
                    .expect("1/beta > 0"),
                };
                AffinePiece::new(domain, self.beta.clone(), -dr(d))
            })
            .collect()
    }

    pub fn pam(&self, variant: Variant) -> PamMap {
        let label = format!("{variant} {}-expansion", self.beta);
        PamMap::new(self.domain(), self.pieces(variant), variant != Variant::Nondet).with_label(label)
    }

    fn check_domain(&self, x: &Rational) -> Result<()> {
        if x.is_negative() || *x >= self.vmax {
            return Err(Error::PointOutsideDomain(format_rational(x)));
        }
        Ok(())
    }

    /// Largest admissible digit at `x` and the next point.
    pub fn greedy_step(&self, x: &Rational) -> Result<(u64, Rational)> {
        self.check_domain(x)?;
        let d = (&self.beta * x).floor().to_integer().to_u64().expect("x >= 0").min(self.digits - 1);
        Ok((d, self.shift(x, d)))
    }

    /// Smallest admissible digit at `x` and the next point.
    pub fn lazy_step(&self, x: &Rational) -> Result<(u64, Rational)> {
        self.check_domain(x)?;
        // smallest integer strictly above beta*x - vmax
        let t = &self.beta * x - &self.vmax;
        let d = if t.is_negative() { 0 } else { t.floor().to_integer().to_u64().expect("t >= 0") + 1 };
        Ok((d, self.shift(x, d)))
    }

    /// The lazy map with pieces closed on the right, `(l, r]`, defined on
    /// `(0, vmax]`. This is the lazy map seen through the mirror: `h` sends
    /// half-open `[l, r)` to `(h(r), h(l)]`, so greedy equals
    /// `h o lazy_upper o h` at every point of `[0, vmax)`, breakpoints included.
    pub fn lazy_upper_step(&self, y: &Rational) -> Result<(u64, Rational)> {
        if !y.is_positive() || *y > self.vmax {
            return Err(Error::PointOutsideDomain(format_rational(y)));
        }
        // smallest integer d >= beta*y - vmax
        let t = &self.beta * y - &self.vmax;
        let d = if t.is_positive() { t.ceil().to_integer().to_u64().expect("t > 0") } else { 0 };
        Ok((d, self.shift(y, d)))
    }

    fn shift(&self, x: &Rational, d: u64) -> Rational {
        &self.beta * x - Rational::from_integer(d.into())
    }

    /// Neighbouring branch intervals intersect.
    pub fn neighbours_overlap(&self) -> bool {
        self.branch_intervals.windows(2).all(|w| w[0].intersects(&w[1]))
    }

    /// `X_d` and `X_{d+2}` are disjoint for every `d`.
    pub fn distance_two_disjoint(&self) -> bool {
        self.branch_intervals.windows(3).all(|w| !w[0].intersects(&w[2]))
    }
}

/// Builds the beta-expansion map on `[0, vmax)`.
///
/// The nondeterministic variant uses the overlapping `X_d` as pieces. Greedy
/// gives each overlap to the larger digit, lazy to the smaller one; piece
/// `d` always carries `x -> beta*x - d`.
pub fn build_beta_pam(beta: &Rational, variant: Variant) -> Result<PamMap> {
    Ok(BetaSystem::new(beta.clone())?.pam(variant))
}

/// A digit prefix with the orbit that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSeq {
    pub digits: Vec<u64>,
    /// `orbit[i]` is the point before digit `i`; one longer than `digits`.
    pub orbit: Vec<Rational>,
    /// `(start, period)` when the orbit was seen to repeat exactly.
    pub periodic_suffix: Option<(usize, usize)>,
}

impl DigitSeq {
    /// Checks `orbit[i+1] == beta*orbit[i] - digits[i]` and the claimed period.
    pub fn replays(&self, beta: &Rational) -> bool {
        if self.orbit.len() != self.digits.len() + 1 {
            return false;
        }
        let steps_ok = self
            .digits
            .iter()
            .enumerate()
            .all(|(i, &d)| beta * &self.orbit[i] - Rational::from_integer(d.into()) == self.orbit[i + 1]);
        let period_ok = match self.periodic_suffix {
            None => true,
            Some((s, t)) => {
                t > 0 && (s..self.digits.len()).all(|i| i < s + t || self.digits[i] == self.digits[i - t])
                    && self.orbit.get(s + t).is_none_or(|p| *p == self.orbit[s])
            }
        };
        steps_ok && period_ok
    }

    pub fn uses_only(&self, allowed: &[u64]) -> bool {
        self.digits.iter().all(|d| allowed.contains(d))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "digit", "point", "point_decimal"])?;
        for (i, d) in self.digits.iter().enumerate() {
            let x = &self.orbit[i];
            w.write_record([i.to_string(), d.to_string(), format_rational(x), to_f64(x).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for DigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.periodic_suffix {
            Some((s, t)) => {
                let pre: Vec<String> = self.digits[..s].iter().map(u64::to_string).collect();
                let cyc: Vec<String> = self.digits[s..s + t].iter().map(u64::to_string).collect();
                write!(f, "{}({})^w", pre.join(""), cyc.join(""))
            }
            None => {
                let all: Vec<String> = self.digits.iter().map(u64::to_string).collect();
                write!(f, "{}...", all.join(""))
            }
        }
    }
}

/// `depth` digits of the greedy or lazy expansion of `x`.
///
/// When the orbit cycles before `depth`, digits and orbit points are filled
/// in by repeating the cycle.
pub fn digit_stream(system: &BetaSystem, variant: Variant, x: &Rational, depth: usize) -> Result<DigitSeq> {
    if variant == Variant::Nondet {
        return Err(Error::NondeterministicVariant);
    }
    system.check_domain(x)?;
    let map = system.pam(variant);
    let rec = iterate_orbit(&map, x, depth, None)?;
    let mut digits: Vec<u64> = rec.piece_trace.iter().map(|&k| k as u64).collect();
    let mut orbit = rec.points;
    let periodic_suffix = match rec.verdict {
        OrbitVerdict::Cycle { preperiod, period } => Some((preperiod, period)),
        _ => None,
    };
    if let Some((_, t)) = periodic_suffix {
        while digits.len() < depth {
            let i = digits.len();
            digits.push(digits[i - t]);
            orbit.push(orbit[i + 1 - t].clone());
        }
    }
    Ok(DigitSeq { digits, orbit, periodic_suffix })
}

/// Expands many points in parallel; results keep the input order.
pub fn digit_streams(system: &BetaSystem, variant: Variant, xs: &[Rational], depth: usize) -> Result<Vec<DigitSeq>> {
    xs.par_iter().map(|x| digit_stream(system, variant, x, depth)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialValue {
    pub sum: Rational,
    /// `(vmin/beta^n, vmax/beta^n)`: the tail `x - sum` lies in `[lo, hi)`.
    pub remainder_bounds: (Rational, Rational),
}

/// `sum_{i <= n} d_i beta^-i` over the first `n` digits.
pub fn partial_value(digits: &[u64], beta: &Rational, n: usize) -> Result<PartialValue> {
    if n > digits.len() {
        return Err(Error::DigitsExhausted { requested: n, available: digits.len() });
    }
    let c = beta.ceil();
    let vmax = (c - Rational::one()) / (beta - Rational::one());
    let inv = beta.recip();
    let mut scale = Rational::one();
    let mut sum = Rational::zero();
    for &d in &digits[..n] {
        scale *= &inv;
        if d != 0 {
            sum += &scale * Rational::from_integer(d.into());
        }
    }
    Ok(PartialValue { sum, remainder_bounds: (Rational::zero(), vmax * scale) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdsAnswer {
    /// A `{0, 1}` expansion, certified by exact periodicity (or `beta <= 2`).
    Yes(DigitSeq),
    /// The greedy expansion uses `digit >= 2` at position `step`.
    No { step: usize, digit: u64 },
    Unknown,
}

impl fmt::Display for TdsAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdsAnswer::Yes(w) => write!(f, "Yes {w}"),
            TdsAnswer::No { .. } => f.write_str("No"),
            TdsAnswer::Unknown => f.write_str("Unknown"),
        }
    }
}

/// Does `x` have an expansion in base `beta` using only digits 0 and 1?
///
/// For `beta > 2` a `{0, 1}` expansion can only be the greedy one, so the
/// greedy stream decides: a digit of 2 or more refutes, a cycle over `{0, 1}`
/// certifies. A stream that stays in `{0, 1}` without cycling within `depth`
/// steps is `Unknown`. For `1 < beta < 2` every greedy digit is 0 or 1 and the
/// answer is always yes; the witness is the greedy prefix.
pub fn tds01_decide(beta: &Rational, x: &Rational, depth: usize) -> Result<TdsAnswer> {
    let system = BetaSystem::new(beta.clone()).map_err(|e| match e {
        Error::IntegerBase | Error::BaseNotGreaterThanOne => Error::BaseOutOfRange,
        other => other,
    })?;
    let seq = digit_stream(&system, Variant::Greedy, x, depth)?;
    if system.digit_count() <= 2 {
        return Ok(TdsAnswer::Yes(seq));
    }
    if let Some(step) = seq.digits.iter().position(|&d| d >= 2) {
        return Ok(TdsAnswer::No { step, digit: seq.digits[step] });
    }
    Ok(if seq.periodic_suffix.is_some() { TdsAnswer::Yes(seq) } else { TdsAnswer::Unknown })
}

/// Checks `greedy(x) = h(lazy(h(x)))` and the digit mirror
/// `d_greedy = ceil(beta) - 1 - d_lazy` for every sample.
pub fn check_greedy_lazy_conjugacy(system: &BetaSystem, samples: &[Rational]) -> Result<bool> {
    let top = system.digit_count() - 1;
    for x in samples {
        let (dg, gx) = system.greedy_step(x)?;
        let (dl, ly) = system.lazy_upper_step(&system.mirror(x))?;
        if gx != system.mirror(&ly) || dg != top - dl {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Interior sample points `k/(n+1) * vmax`, `k = 1..=n`, for quick checks.
pub fn interior_grid(system: &BetaSystem, n: u64) -> Vec<Rational> {
    let denom: Rational = Rational::from_integer((n + 1).into());
    (1..=n).map(|k| Rational::from_integer(k.into()) / &denom * system.vmax()).collect()
}
