//! Point-to-point reachability deciders.
//!
//! * [`decide_reach_weight`] works for maps whose slope weight matrix has
//!   single-signed rows. Along such orbits the m-weight cannot come back down
//!   once it has risen above a threshold computed from the offsets and the
//!   endpoints, so the orbit either hits, cycles, or provably escapes.
//! * [`decide_reach_bounded`] handles two-piece injective maps given bounds
//!   `kmin < phi < kmax` on an invariant density. The bounds cap the weight of
//!   every point on a reaching path, hence the path length.
//! * [`simulate_reach`] is the plain semi-decision baseline.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{
    m_weight, m_weight_of_nonzero, max_power_below, padic_weight, MWeight, PrimeBasis, RatKey, Rational,
    DEFAULT_TRIAL_BOUND,
};
use crate::pam::{iterate_orbit, structure_report, OrbitRecord, OrbitVerdict, PamMap};

/// Bounds `M = m^M1` with more bits than this are reported as truncated.
pub const MAX_BOUND_BITS: u64 = 4096;

/// Weight matrix `a[j][i] = ||slope_i||_{p_j}`: one row per basis prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffMatrix {
    pub entries: Vec<Vec<i64>>,
    pub basis: PrimeBasis,
    pub rank: usize,
}

impl CoeffMatrix {
    pub fn rows_single_signed(&self) -> bool {
        self.entries
            .iter()
            .all(|row| row.iter().all(|&e| e >= 0) || row.iter().all(|&e| e <= 0))
    }

    /// Whether every entry of row `j` is nonnegative.
    pub fn row_nonnegative(&self, j: usize) -> bool {
        self.entries[j].iter().all(|&e| e >= 0)
    }
}

fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|&e| Rational::from_integer(e.into())).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for c in col..ncols {
                    let delta = &f * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Builds the slope weight matrix, extending `basis` with every prime that
/// divides a slope, and reports whether each row is single-signed.
pub fn coeff_matrix_and_signs(map: &PamMap, basis: &PrimeBasis) -> Result<(CoeffMatrix, bool)> {
    if let Some(piece) = map.pieces.iter().position(|p| p.a.is_zero()) {
        return Err(Error::SlopeZero { piece });
    }
    let slopes = map.slopes();
    let support = PrimeBasis::covering(slopes.iter(), DEFAULT_TRIAL_BOUND)?;
    let basis = basis.union(support.primes())?;
    let entries = basis
        .primes()
        .iter()
        .map(|&p| slopes.iter().map(|a| padic_weight(a, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let rank = exact_rank(&entries);
    let matrix = CoeffMatrix { entries, basis, rank };
    let ok = matrix.rows_single_signed();
    Ok((matrix, ok))
}

/// Union of the prime supports of slopes, offsets, interval endpoints, `x`
/// and `y`.
pub fn working_basis(map: &PamMap, x: &Rational, y: &Rational) -> Result<PrimeBasis> {
    let mut vals: Vec<&Rational> = vec![x, y, map.domain.left(), map.domain.right()];
    for p in &map.pieces {
        vals.extend([&p.a, &p.b, p.domain.left(), p.domain.right()]);
    }
    PrimeBasis::covering(vals, DEFAULT_TRIAL_BOUND)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decider {
    Weight,
    Bounded,
    Simulation,
}

impl fmt::Display for Decider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decider::Weight => "weight",
            Decider::Bounded => "bounded",
            Decider::Simulation => "simulation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    CapExceeded,
    CapBelowBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReachOutcome {
    Reached { step: usize },
    UnreachableCycle,
    UnreachableWeight,
    Unknown(UnknownReason),
}

impl ReachOutcome {
    pub fn is_definite(&self) -> bool {
        !matches!(self, ReachOutcome::Unknown(_))
    }
}

impl fmt::Display for ReachOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReachOutcome::Reached { step } => write!(f, "Reached({step})"),
            ReachOutcome::UnreachableCycle => f.write_str("UnreachableCycle"),
            ReachOutcome::UnreachableWeight => f.write_str("UnreachableWeight"),
            ReachOutcome::Unknown(r) => write!(f, "Unknown({r:?})"),
        }
    }
}

/// A verdict plus the orbit prefix that justifies it.
///
/// For `UnreachableWeight` from the weight decider the certificate ends at
/// the first point whose m-weight exceeds `threshold`; its orbit verdict is
/// `CapExceeded` because iteration was cut there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachVerdict {
    pub outcome: ReachOutcome,
    pub certificate: OrbitRecord,
    pub decider: Decider,
    /// Set when the answer relies on caller-supplied density bounds.
    pub conditional: bool,
    pub threshold: Option<i64>,
}

fn from_orbit(rec: OrbitRecord, decider: Decider) -> ReachVerdict {
    let outcome = match rec.verdict {
        OrbitVerdict::Hit { step } => ReachOutcome::Reached { step },
        OrbitVerdict::Cycle { .. } => ReachOutcome::UnreachableCycle,
        OrbitVerdict::CapExceeded => ReachOutcome::Unknown(UnknownReason::CapExceeded),
    };
    ReachVerdict { outcome, certificate: rec, decider, conditional: false, threshold: None }
}

/// Semi-decision by direct simulation. Never answers `UnreachableWeight`.
pub fn simulate_reach(map: &PamMap, x: &Rational, y: &Rational, cap: usize) -> Result<ReachVerdict> {
    Ok(from_orbit(iterate_orbit(map, x, cap, Some(y))?, Decider::Simulation))
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn finite_weight(x: &Rational, basis: &PrimeBasis) -> Option<i64> {
    m_weight_of_nonzero(x, basis).map(|w| w.finite().expect("basis covers all inputs"))
}

/// Decides `y in O_f(x)` for maps with single-signed weight rows.
///
/// Stops with `UnreachableWeight` at the first orbit point whose m-weight
/// exceeds `max(h, ||y||_m, ||x||_m)`, `h` being the largest offset weight.
/// Including `||x||_m` keeps the rule sound when some rows are nonpositive:
/// weights of those primes never rise above their starting level, so any
/// excess must come from a nonnegative-row prime and is permanent.
pub fn decide_reach_weight(map: &PamMap, x: &Rational, y: &Rational, cap: usize) -> Result<ReachVerdict> {
    if !map.deterministic {
        return Err(Error::NotDeterministic);
    }
    let basis = working_basis(map, x, y)?;
    let (_, ok) = coeff_matrix_and_signs(map, &basis)?;
    if !ok {
        return Err(Error::SignConditionViolated);
    }
    let h = map.pieces.iter().fold(None, |acc, p| max_opt(acc, finite_weight(&p.b, &basis)));
    let threshold = max_opt(max_opt(h, finite_weight(y, &basis)), finite_weight(x, &basis)).unwrap_or(i64::MIN);

    let mut rec = iterate_orbit(map, x, 0, Some(y))?;
    if rec.verdict == (OrbitVerdict::Hit { step: 0 }) {
        return Ok(ReachVerdict {
            threshold: Some(threshold),
            ..from_orbit(rec, Decider::Weight)
        });
    }
    let mut seen = std::collections::HashMap::new();
    seen.insert(RatKey(x.clone()), 0usize);
    for n in 1..=cap {
        let (k, next) = map.step(&rec.points[n - 1])?;
        rec.piece_trace.push(k);
        rec.points.push(next);
        let cur = &rec.points[n];
        let outcome = if cur == y {
            rec.verdict = OrbitVerdict::Hit { step: n };
            Some(ReachOutcome::Reached { step: n })
        } else if let Some(&s) = seen.get(&RatKey(cur.clone())) {
            rec.verdict = OrbitVerdict::Cycle { preperiod: s, period: n - s };
            Some(ReachOutcome::UnreachableCycle)
        } else if !cur.is_zero() && m_weight(cur, &basis)? > MWeight::Finite(threshold) {
            rec.verdict = OrbitVerdict::CapExceeded;
            Some(ReachOutcome::UnreachableWeight)
        } else {
            None
        };
        if let Some(outcome) = outcome {
            return Ok(ReachVerdict {
                outcome,
                certificate: rec,
                decider: Decider::Weight,
                conditional: false,
                threshold: Some(threshold),
            });
        }
        seen.insert(RatKey(rec.points[n].clone()), n);
    }
    rec.verdict = OrbitVerdict::CapExceeded;
    Ok(ReachVerdict {
        outcome: ReachOutcome::Unknown(UnknownReason::CapExceeded),
        certificate: rec,
        decider: Decider::Weight,
        conditional: false,
        threshold: Some(threshold),
    })
}

/// Runs [`decide_reach_weight`] over many queries in parallel.
pub fn decide_reach_weight_batch(
    map: &PamMap,
    queries: &[(Rational, Rational)],
    cap: usize,
) -> Vec<Result<ReachVerdict>> {
    queries
        .par_iter()
        .map(|(x, y)| decide_reach_weight(map, x, y, cap))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundCase {
    /// Both slopes have zero p-weight: weights never leave `h`.
    ConstantWeight,
    /// Weights cannot both rise above `h` and come back; bound is `h`.
    NoReturn,
    /// `|a1^alpha a2^beta| != 1`: the excursion count `r` is bounded.
    ProductNotOne,
    /// `|a1^alpha a2^beta| == 1`.
    ProductOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeBound {
    pub p: u64,
    pub alpha: u64,
    pub beta: u64,
    pub case: BoundCase,
    pub r_bound: Option<u64>,
    pub weight_bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightBoundReport {
    pub h: i64,
    pub per_prime: Vec<PrimeBound>,
    pub m1: i64,
    /// `m^M1`, absent when truncated.
    pub m: Option<BigUint>,
    pub truncated: bool,
    pub basis: PrimeBasis,
    /// Whether the `ProductNotOne` composition (an upper estimate) was used.
    pub conservative: bool,
}

impl WeightBoundReport {
    /// Number of steps after which a path of points with m-weight at most
    /// `M1` inside `domain` must have repeated a point.
    pub fn step_budget(&self, map: &PamMap) -> Option<BigUint> {
        let m = self.m.as_ref()?;
        let width = map.domain.length().ceil().to_integer();
        let width = width.to_biguint().unwrap_or_else(BigUint::one).max(BigUint::one());
        Some(m * width + 1u32)
    }
}

/// Weight bound on every point of a reaching path for a two-piece injective
/// map with invariant density bounded by `kmin` and `kmax`.
///
/// All `r <= ln A / ln B` tests are decided as `B^r <= A` over the rationals.
pub fn thm1_weight_bound(
    map: &PamMap,
    kmin: &Rational,
    kmax: &Rational,
    x: &Rational,
    y: &Rational,
) -> Result<WeightBoundReport> {
    if !kmin.is_positive() || kmin > kmax {
        return Err(Error::BadDensityBounds);
    }
    if map.pieces.len() != 2 {
        return Err(Error::NotTwoPieces(map.pieces.len()));
    }
    if !structure_report(map).injective {
        return Err(Error::NotInjective);
    }
    let basis = working_basis(map, x, y)?;
    let ratio = kmax / kmin;
    let (a1, a2) = (&map.pieces[0].a, &map.pieces[1].a);

    let offsets = map
        .pieces
        .iter()
        .fold(None, |acc, p| max_opt(acc, finite_weight(&p.b, &basis).map(|w| w + 1)));
    let h = max_opt(max_opt(offsets, finite_weight(x, &basis)), finite_weight(y, &basis)).unwrap_or(0);

    let mut conservative = false;
    let mut per_prime = Vec::with_capacity(basis.len());
    for &p in basis.primes() {
        let w1 = padic_weight(a1, p)?;
        let w2 = padic_weight(a2, p)?;
        let bound = if w1 == 0 && w2 == 0 {
            PrimeBound { p, alpha: 0, beta: 0, case: BoundCase::ConstantWeight, r_bound: None, weight_bound: h }
        } else if w1.signum() * w2.signum() >= 0 {
            // Same sign or one zero: an excursion above h never returns.
            let (alpha, beta) = match (w1, w2) {
                (0, _) => (1, 0),
                (_, 0) => (0, 1),
                _ => (0, 0),
            };
            PrimeBound { p, alpha, beta, case: BoundCase::NoReturn, r_bound: None, weight_bound: h }
        } else {
            let g = w1.unsigned_abs().gcd(&w2.unsigned_abs());
            let alpha = w2.unsigned_abs() / g;
            let beta = w1.unsigned_abs() / g;
            let product = (a1.abs().pow(alpha as i32) * a2.abs().pow(beta as i32)).abs();
            if product.is_one() {
                let big = if a1.abs() > Rational::one() { a1 } else { a2 };
                let r = max_power_below(&big.abs(), &ratio);
                let big_w = m_weight(big, &basis)?.finite().expect("covered by basis");
                let weight_bound = h.max(h + r as i64 * big_w);
                PrimeBound { p, alpha, beta, case: BoundCase::ProductOne, r_bound: Some(r), weight_bound }
            } else {
                conservative = true;
                let step_base = if product > Rational::one() { product } else { product.recip() };
                let r = max_power_below(&step_base, &ratio);
                let per_step = w1.max(w2);
                let weight_bound = h + (r * (alpha + beta)) as i64 * per_step;
                PrimeBound { p, alpha, beta, case: BoundCase::ProductNotOne, r_bound: Some(r), weight_bound }
            }
        };
        per_prime.push(bound);
    }
    let m1 = per_prime.iter().map(|b| b.weight_bound).fold(h, i64::max);
    let exp = m1.max(0) as u64;
    let bits = exp.saturating_mul(basis.m().bits());
    let (m, truncated) = if bits > MAX_BOUND_BITS {
        (None, true)
    } else {
        (Some(basis.m().pow(exp as u32)), false)
    };
    Ok(WeightBoundReport { h, per_prime, m1, m, truncated, basis, conservative })
}

/// Decides reachability for a two-piece injective map with bounded invariant
/// density by simulating up to the weight-derived step budget.
///
/// `UnreachableWeight` answers are flagged `conditional`: they are only as
/// good as the supplied density bounds.
pub fn decide_reach_bounded(
    map: &PamMap,
    kmin: &Rational,
    kmax: &Rational,
    x: &Rational,
    y: &Rational,
    cap: usize,
) -> Result<ReachVerdict> {
    let report = thm1_weight_bound(map, kmin, kmax, x, y)?;
    let budget = report.step_budget(map).and_then(|b| b.to_usize());
    let steps = budget.map_or(cap, |b| b.min(cap));
    let mut verdict = from_orbit(iterate_orbit(map, x, steps, Some(y))?, Decider::Bounded);
    verdict.threshold = Some(report.m1);
    if let ReachOutcome::Unknown(_) = verdict.outcome {
        match budget {
            Some(b) if b <= cap => {
                verdict.outcome = ReachOutcome::UnreachableWeight;
                verdict.conditional = true;
            }
            _ => verdict.outcome = ReachOutcome::Unknown(UnknownReason::CapBelowBound),
        }
    }
    Ok(verdict)
}

/// Picks the strongest applicable procedure: the weight decider when the
/// sign condition holds, the density-bounded decider when bounds are given
/// and the map qualifies, and plain simulation otherwise.
pub fn decide_auto(
    map: &PamMap,
    x: &Rational,
    y: &Rational,
    cap: usize,
    density: Option<(&Rational, &Rational)>,
) -> Result<ReachVerdict> {
    let basis = working_basis(map, x, y)?;
    match coeff_matrix_and_signs(map, &basis) {
        Ok((_, true)) => return decide_reach_weight(map, x, y, cap),
        Ok(_) | Err(Error::SlopeZero { .. }) => {}
        Err(e) => return Err(e),
    }
    if let Some((kmin, kmax)) = density {
        match decide_reach_bounded(map, kmin, kmax, x, y, cap) {
            Ok(v) => return Ok(v),
            Err(Error::NotInjective | Error::NotTwoPieces(_)) => {}
            Err(e) => return Err(e),
        }
    }
    simulate_reach(map, x, y, cap)
}
