//! Piecewise affine maps over the rationals.
//!
//! Every interval is half-open, `[left, right)`. A point sitting on the
//! boundary between two pieces belongs to the right-hand piece.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{affine_apply, format_rational, RatKey, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    left: Rational,
    right: Rational,
}

impl Interval {
    pub fn new(left: Rational, right: Rational) -> Result<Self> {
        if left >= right {
            return Err(Error::EmptyInterval {
                left: format_rational(&left),
                right: format_rational(&right),
            });
        }
        Ok(Interval { left, right })
    }

    pub fn unit() -> Self {
        Interval::new(Rational::zero(), Rational::one()).expect("0 < 1")
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.left <= *x && *x < self.right
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let l = (&self.left).max(&other.left).clone();
        let r = (&self.right).min(&other.right).clone();
        (l < r).then_some(Interval { left: l, right: r })
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.intersection(other).is_some()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.left <= self.left && self.right <= other.right
    }

    /// Image under `x -> u*x + v`, re-expressed as a half-open interval.
    /// For `u < 0` the true image is `(u*r+v, u*l+v]`; the endpoints are kept
    /// and the openness flips to the library convention.
    pub fn affine_image(&self, u: &Rational, v: &Rational) -> Interval {
        let a = u * &self.left + v;
        let b = u * &self.right + v;
        if a < b {
            Interval { left: a, right: b }
        } else {
            Interval { left: b, right: a }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left, self.right)
    }
}

/// The exact image set of a piece, with endpoint closedness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSpan {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl ImageSpan {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn disjoint(&self, other: &ImageSpan) -> bool {
        // self entirely left of other, or the reverse
        let left_of = |a: &ImageSpan, b: &ImageSpan| a.hi < b.lo || (a.hi == b.lo && !(a.hi_closed && b.lo_closed));
        left_of(self, other) || left_of(other, self)
    }

    pub fn within(&self, dom: &Interval) -> bool {
        let lo_ok = self.lo >= dom.left;
        let hi_ok = self.hi < dom.right || (self.hi == dom.right && !self.hi_closed);
        lo_ok && hi_ok
    }
}

impl fmt::Display for ImageSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePiece {
    pub domain: Interval,
    pub a: Rational,
    pub b: Rational,
}

impl AffinePiece {
    pub fn new(domain: Interval, a: Rational, b: Rational) -> Self {
        AffinePiece { domain, a, b }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        affine_apply(&self.a, &self.b, x)
    }

    pub fn image(&self) -> ImageSpan {
        let at_l = self.apply(self.domain.left());
        let at_r = self.apply(self.domain.right());
        if self.a.is_positive() {
            ImageSpan { lo: at_l, hi: at_r, lo_closed: true, hi_closed: false }
        } else if self.a.is_negative() {
            ImageSpan { lo: at_r, hi: at_l, lo_closed: false, hi_closed: true }
        } else {
            ImageSpan { lo: self.b.clone(), hi: self.b.clone(), lo_closed: true, hi_closed: true }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PamMap {
    pub domain: Interval,
    pub pieces: Vec<AffinePiece>,
    pub deterministic: bool,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoPieces,
    PieceOutsideDomain { piece: usize },
    Overlap { first: usize, second: usize },
    CoverageGap { left: Rational, right: Rational },
    Escape { piece: usize, image: ImageSpan },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPieces => f.write_str("map has no pieces"),
            Violation::PieceOutsideDomain { piece } => write!(f, "piece {piece} is not inside the domain"),
            Violation::Overlap { first, second } => write!(f, "pieces {first} and {second} overlap"),
            Violation::CoverageGap { left, right } => write!(f, "no piece covers [{left}, {right})"),
            Violation::Escape { piece, image } => write!(f, "piece {piece} maps onto {image}, leaving the domain"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl PamMap {
    pub fn new(domain: Interval, pieces: Vec<AffinePiece>, deterministic: bool) -> Self {
        PamMap { domain, pieces, deterministic, label: None }
    }

    /// Builds the map and rejects it unless [`PamMap::validate`] is clean.
    pub fn validated(domain: Interval, pieces: Vec<AffinePiece>, deterministic: bool) -> Result<Self> {
        let map = PamMap::new(domain, pieces, deterministic);
        let report = map.validate();
        if report.is_valid() {
            Ok(map)
        } else {
            Err(Error::ValidationFailed(report))
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.pieces.iter().map(|p| p.a.clone()).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.pieces.is_empty() {
            violations.push(Violation::NoPieces);
            return ValidationReport { violations };
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if !p.domain.is_subset_of(&self.domain) {
                violations.push(Violation::PieceOutsideDomain { piece: i });
            }
            let image = p.image();
            if !image.within(&self.domain) {
                violations.push(Violation::Escape { piece: i, image });
            }
        }
        if self.deterministic {
            for i in 0..self.pieces.len() {
                for j in i + 1..self.pieces.len() {
                    if self.pieces[i].domain.intersects(&self.pieces[j].domain) {
                        violations.push(Violation::Overlap { first: i, second: j });
                    }
                }
            }
        }
        // Coverage: sweep the pieces sorted by left endpoint.
        let mut order: Vec<&Interval> = self.pieces.iter().map(|p| &p.domain).collect();
        order.sort_by(|a, b| a.left().cmp(b.left()));
        let mut reach = self.domain.left().clone();
        for d in order {
            if *d.left() > reach && reach < *self.domain.right() {
                let right = d.left().min(self.domain.right()).clone();
                violations.push(Violation::CoverageGap { left: reach.clone(), right });
            }
            if *d.right() > reach {
                reach = d.right().clone();
            }
        }
        if reach < *self.domain.right() {
            violations.push(Violation::CoverageGap { left: reach, right: self.domain.right().clone() });
        }
        ValidationReport { violations }
    }

    /// Index of the first piece whose domain contains `x`.
    pub fn piece_index(&self, x: &Rational) -> Option<usize> {
        self.pieces.iter().position(|p| p.domain.contains(x))
    }

    /// All images of `x`: a singleton for deterministic maps.
    pub fn eval(&self, x: &Rational) -> Result<Vec<Rational>> {
        if !self.domain.contains(x) {
            return Err(Error::PointOutsideDomain(format_rational(x)));
        }
        if self.deterministic {
            return self.step(x).map(|(_, y)| vec![y]);
        }
        let mut out: Vec<Rational> = Vec::new();
        for p in self.pieces.iter().filter(|p| p.domain.contains(x)) {
            let y = p.apply(x);
            if !out.contains(&y) {
                out.push(y);
            }
        }
        if out.is_empty() {
            return Err(Error::PointInCoverageGap(format_rational(x)));
        }
        Ok(out)
    }

    /// One deterministic step, returning the piece used.
    pub fn step(&self, x: &Rational) -> Result<(usize, Rational)> {
        if !self.domain.contains(x) {
            return Err(Error::PointOutsideDomain(format_rational(x)));
        }
        let i = self
            .piece_index(x)
            .ok_or_else(|| Error::PointInCoverageGap(format_rational(x)))?;
        Ok((i, self.pieces[i].apply(x)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbitVerdict {
    Hit { step: usize },
    Cycle { preperiod: usize, period: usize },
    CapExceeded,
}

impl fmt::Display for OrbitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitVerdict::Hit { step } => write!(f, "Hit({step})"),
            OrbitVerdict::Cycle { preperiod, period } => write!(f, "Cycle({preperiod}, {period})"),
            OrbitVerdict::CapExceeded => f.write_str("CapExceeded"),
        }
    }
}

/// Exact orbit prefix `x_0, ..., x_N` with the piece used at each step.
///
/// `piece_trace[i]` is the piece that maps `points[i]` to `points[i + 1]`, so
/// the trace is one shorter than the point list. For a cycle the repeated
/// point is stored, i.e. `points[s + t] == points[s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub points: Vec<Rational>,
    pub piece_trace: Vec<usize>,
    pub verdict: OrbitVerdict,
}

impl OrbitRecord {
    /// The points up to (not including) the closing repeat of a cycle.
    pub fn distinct_points(&self) -> &[Rational] {
        match self.verdict {
            OrbitVerdict::Cycle { preperiod, period } => &self.points[..preperiod + period],
            _ => &self.points,
        }
    }

    /// Re-applies the traced pieces and checks every recorded point.
    pub fn replays_on(&self, map: &PamMap) -> bool {
        if self.points.len() != self.piece_trace.len() + 1 {
            return false;
        }
        self.piece_trace.iter().enumerate().all(|(i, &k)| {
            k < map.pieces.len()
                && map.pieces[k].domain.contains(&self.points[i])
                && map.pieces[k].apply(&self.points[i]) == self.points[i + 1]
        })
    }
}

#[derive(Clone, Debug)]
pub struct OrbitOptions<'a> {
    pub cap: usize,
    pub target: Option<&'a Rational>,
    /// Require at least one step before a target counts as hit.
    pub strict: bool,
}

/// Iterates a deterministic map until the target is hit, a point repeats, or
/// `cap` steps have been taken. A target equal to `x0` is hit at step 0.
pub fn iterate_orbit(map: &PamMap, x0: &Rational, cap: usize, target: Option<&Rational>) -> Result<OrbitRecord> {
    iterate_orbit_with(map, x0, &OrbitOptions { cap, target, strict: false })
}

pub fn iterate_orbit_with(map: &PamMap, x0: &Rational, opts: &OrbitOptions<'_>) -> Result<OrbitRecord> {
    if !map.deterministic {
        return Err(Error::NotDeterministic);
    }
    if !map.domain.contains(x0) {
        return Err(Error::PointOutsideDomain(format_rational(x0)));
    }
    let mut points = vec![x0.clone()];
    let mut piece_trace = Vec::new();
    if !opts.strict && opts.target == Some(x0) {
        return Ok(OrbitRecord { points, piece_trace, verdict: OrbitVerdict::Hit { step: 0 } });
    }
    let mut seen: HashMap<RatKey, usize> = HashMap::new();
    seen.insert(RatKey(x0.clone()), 0);
    for n in 1..=opts.cap {
        let (k, next) = map.step(&points[n - 1])?;
        piece_trace.push(k);
        points.push(next);
        let x = &points[n];
        if opts.target == Some(x) {
            return Ok(OrbitRecord { points, piece_trace, verdict: OrbitVerdict::Hit { step: n } });
        }
        let key = RatKey(x.clone());
        if let Some(&s) = seen.get(&key) {
            let verdict = OrbitVerdict::Cycle { preperiod: s, period: n - s };
            return Ok(OrbitRecord { points, piece_trace, verdict });
        }
        seen.insert(key, n);
    }
    Ok(OrbitRecord { points, piece_trace, verdict: OrbitVerdict::CapExceeded })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BfsOutcome {
    /// Target found; `path` lists `(piece, point)` pairs starting after `x0`.
    Reached { depth: usize, path: Vec<(usize, Rational)> },
    /// Every reachable point was visited without meeting the target.
    Exhausted { visited: usize },
    DepthLimit,
    FrontierCap,
}

/// Breadth-first reachability for nondeterministic maps.
///
/// `allowed` restricts which pieces may be used (e.g. digits `{0, 1}` of a
/// beta-expansion map); `None` allows all of them.
pub fn explore_reach(
    map: &PamMap,
    x0: &Rational,
    target: Option<&Rational>,
    allowed: Option<&[usize]>,
    max_depth: usize,
    frontier_cap: usize,
) -> Result<BfsOutcome> {
    if !map.domain.contains(x0) {
        return Err(Error::PointOutsideDomain(format_rational(x0)));
    }
    if target == Some(x0) {
        return Ok(BfsOutcome::Reached { depth: 0, path: Vec::new() });
    }
    let mut parent: HashMap<RatKey, (usize, Rational)> = HashMap::new();
    let mut visited: HashSet<RatKey> = HashSet::new();
    visited.insert(RatKey(x0.clone()));
    let mut frontier: VecDeque<Rational> = VecDeque::from([x0.clone()]);
    for depth in 1..=max_depth {
        let mut next = VecDeque::new();
        for x in frontier.drain(..) {
            for (k, piece) in map.pieces.iter().enumerate() {
                if allowed.is_some_and(|a| !a.contains(&k)) || !piece.domain.contains(&x) {
                    continue;
                }
                let y = piece.apply(&x);
                if !visited.insert(RatKey(y.clone())) {
                    continue;
                }
                parent.insert(RatKey(y.clone()), (k, x.clone()));
                if target == Some(&y) {
                    let mut path = vec![(k, y.clone())];
                    let mut cur = x.clone();
                    while let Some((pk, px)) = parent.get(&RatKey(cur.clone())) {
                        path.push((*pk, cur.clone()));
                        cur = px.clone();
                    }
                    path.reverse();
                    return Ok(BfsOutcome::Reached { depth, path });
                }
                next.push_back(y);
                if next.len() > frontier_cap {
                    return Ok(BfsOutcome::FrontierCap);
                }
            }
        }
        if next.is_empty() {
            return Ok(BfsOutcome::Exhausted { visited: visited.len() });
        }
        frontier = next;
    }
    Ok(BfsOutcome::DepthLimit)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub injective: bool,
    /// `None` when the domain is not `[0, 1)` or the map is not a partition.
    pub complete: Option<bool>,
    pub continuous_on_circle: Option<bool>,
    pub degree: Option<BigInt>,
    pub slopes: Vec<Rational>,
}

pub fn structure_report(map: &PamMap) -> StructureReport {
    let slopes = map.slopes();
    let images: Vec<ImageSpan> = map.pieces.iter().map(AffinePiece::image).collect();
    let injective = slopes.iter().all(|a| !a.is_zero())
        && (0..images.len()).all(|i| (i + 1..images.len()).all(|j| images[i].disjoint(&images[j])));

    let on_circle = map.domain == Interval::unit() && map.deterministic && map.validate().is_valid();
    if !on_circle {
        return StructureReport { injective, complete: None, continuous_on_circle: None, degree: None, slopes };
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    let complete = images.iter().all(|im| im.lo == zero && im.hi == one);

    let mut order: Vec<&AffinePiece> = map.pieces.iter().collect();
    order.sort_by(|a, b| a.domain.left().cmp(b.domain.left()));
    // Lift: on the i-th piece F(x) = a_i x + b_i + shift_i with integer shifts
    // chosen so the one-sided limits agree at each breakpoint.
    let mut shift = BigInt::zero();
    let mut continuous = true;
    for w in order.windows(2) {
        let left_limit = w[0].apply(w[0].domain.right());
        let value = w[1].apply(w[1].domain.left());
        let jump = left_limit - value;
        if !jump.is_integer() {
            continuous = false;
            break;
        }
        shift += jump.to_integer();
    }
    let first = order[0];
    let last = order[order.len() - 1];
    let f_at_zero = first.apply(&zero);
    let f_at_one = last.apply(&one) + Rational::from_integer(shift);
    let wrap = &f_at_one - &f_at_zero;
    if !wrap.is_integer() {
        continuous = false;
    }
    let degree = continuous.then(|| wrap.to_integer());
    StructureReport {
        injective,
        complete: Some(complete),
        continuous_on_circle: Some(continuous),
        degree,
        slopes,
    }
}

/// `g = h . f . h^-1` for `h(x) = u*x + v`.
///
/// Piece `i` of the result has domain `h(X_i)`, slope `a_i` and offset
/// `u*b_i + v*(1 - a_i)`. Piece order is preserved. With `u < 0` the half-open
/// convention is re-imposed on the reflected intervals.
pub fn conjugate(map: &PamMap, u: &Rational, v: &Rational) -> Result<PamMap> {
    if u.is_zero() {
        return Err(Error::DegenerateConjugacy);
    }
    let one = Rational::one();
    let pieces = map
        .pieces
        .iter()
        .map(|p| AffinePiece {
            domain: p.domain.affine_image(u, v),
            a: p.a.clone(),
            b: u * &p.b + v * (&one - &p.a),
        })
        .collect();
    Ok(PamMap {
        domain: map.domain.affine_image(u, v),
        pieces,
        deterministic: map.deterministic,
        label: map.label.clone(),
    })
}

/// Inverse of `h(x) = u*x + v` as a `(u, v)` pair.
pub fn inverse_affine(u: &Rational, v: &Rational) -> (Rational, Rational) {
    let ui = u.recip();
    let vi = -(v * &ui);
    (ui, vi)
}

/// Conjugates the map onto `[0, 1)` via `h(x) = (x - left) / (right - left)`.
pub fn normalize(map: &PamMap) -> PamMap {
    let len = map.domain.length();
    let u = len.recip();
    let v = -(map.domain.left() * &u);
    conjugate(map, &u, &v).expect("domain length is positive")
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::exactnum::{int, rat};

    pub fn iv(l: Rational, r: Rational) -> Interval {
        Interval::new(l, r).unwrap()
    }

    pub fn piece(l: Rational, r: Rational, a: Rational, b: Rational) -> AffinePiece {
        AffinePiece::new(iv(l, r), a, b)
    }

    pub fn doubling() -> PamMap {
        PamMap::new(
            Interval::unit(),
            vec![
                piece(int(0), rat(1, 2), int(2), int(0)),
                piece(rat(1, 2), int(1), int(2), int(-1)),
            ],
            true,
        )
    }

    pub fn rotation_half() -> PamMap {
        PamMap::new(
            Interval::unit(),
            vec![
                piece(int(0), rat(1, 2), int(1), rat(1, 2)),
                piece(rat(1, 2), int(1), int(1), rat(-1, 2)),
            ],
            true,
        )
    }

    /// `(3/2)x` on `[0, 2/3)`, `3x - 2` on `[2/3, 1)`.
    pub fn three_halves() -> PamMap {
        PamMap::new(
            Interval::unit(),
            vec![
                piece(int(0), rat(2, 3), rat(3, 2), int(0)),
                piece(rat(2, 3), int(1), int(3), int(-2)),
            ],
            true,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn validate_examples() {
        assert!(doubling().validate().is_valid());

        let mut overlapping = doubling();
        overlapping.pieces[0].domain = iv(int(0), rat(2, 3));
        let report = overlapping.validate();
        assert!(report.violations.contains(&Violation::Overlap { first: 0, second: 1 }));

        let escaping = PamMap::new(
            Interval::unit(),
            vec![piece(int(0), rat(1, 2), int(1), int(0)), piece(rat(1, 2), int(1), int(1), rat(1, 2))],
            true,
        );
        let report = escaping.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(&report.violations[0], Violation::Escape { piece: 1, image } if image.lo == int(1) && image.hi == rat(3, 2)));
    }

    #[test]
    fn validate_reports_gaps_and_stray_pieces() {
        let map = PamMap::new(
            Interval::unit(),
            vec![piece(int(0), rat(1, 3), int(1), int(0)), piece(rat(1, 2), int(2), int(0), int(0))],
            true,
        );
        let v = map.validate().violations;
        assert!(v.contains(&Violation::CoverageGap { left: rat(1, 3), right: rat(1, 2) }));
        assert!(v.contains(&Violation::PieceOutsideDomain { piece: 1 }));
        let empty = PamMap::new(Interval::unit(), vec![], true);
        assert_eq!(empty.validate().violations, vec![Violation::NoPieces]);
    }

    #[test]
    fn negative_slope_image_is_left_open() {
        let flip = PamMap::new(Interval::unit(), vec![piece(int(0), int(1), int(-1), int(1))], true);
        // image (0, 1] touches the excluded right end
        assert!(!flip.validate().is_valid());
        let ok = PamMap::new(Interval::unit(), vec![piece(int(0), int(1), rat(-1, 2), rat(3, 4))], true);
        assert!(ok.validate().is_valid());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(doubling().eval(&rat(1, 3)).unwrap(), vec![rat(2, 3)]);
        assert!(matches!(doubling().eval(&int(1)), Err(Error::PointOutsideDomain(_))));
        let gap = PamMap::new(Interval::unit(), vec![piece(int(0), rat(1, 2), int(1), int(0))], true);
        assert!(matches!(gap.eval(&rat(3, 4)), Err(Error::PointInCoverageGap(_))));
    }

    #[test]
    fn boundary_points_go_right() {
        let (k, y) = doubling().step(&rat(1, 2)).unwrap();
        assert_eq!((k, y), (1, int(0)));
    }

    #[test]
    fn orbit_examples() {
        let rec = iterate_orbit(&doubling(), &rat(1, 3), 100, None).unwrap();
        assert_eq!(rec.verdict, OrbitVerdict::Cycle { preperiod: 0, period: 2 });
        assert_eq!(rec.distinct_points(), &[rat(1, 3), rat(2, 3)]);

        let rec = iterate_orbit(&doubling(), &rat(1, 6), 100, None).unwrap();
        assert_eq!(rec.verdict, OrbitVerdict::Cycle { preperiod: 1, period: 2 });
        assert!(rec.replays_on(&doubling()));

        let rec = iterate_orbit(&rotation_half(), &int(0), 100, Some(&rat(1, 2))).unwrap();
        assert_eq!(rec.verdict, OrbitVerdict::Hit { step: 1 });
    }

    #[test]
    fn orbit_zero_step_and_strict_hits() {
        let x = rat(1, 3);
        let rec = iterate_orbit(&doubling(), &x, 10, Some(&x)).unwrap();
        assert_eq!(rec.verdict, OrbitVerdict::Hit { step: 0 });
        let rec = iterate_orbit_with(&doubling(), &x, &OrbitOptions { cap: 10, target: Some(&x), strict: true }).unwrap();
        assert_eq!(rec.verdict, OrbitVerdict::Hit { step: 2 });
    }

    #[test]
    fn orbit_cap_and_errors() {
        // 1/2 -> 3/4 -> 1/4 -> ... grows 2-adically: never cycles.
        let rec = iterate_orbit(&three_halves(), &rat(1, 2), 20, None).unwrap();
        assert_eq!(rec.verdict, OrbitVerdict::CapExceeded);
        assert_eq!(rec.points.len(), 21);
        let mut nd = doubling();
        nd.deterministic = false;
        assert!(matches!(iterate_orbit(&nd, &rat(1, 3), 5, None), Err(Error::NotDeterministic)));
    }

    #[test]
    fn structure_examples() {
        let r = structure_report(&doubling());
        assert!(!r.injective);
        assert_eq!(r.complete, Some(true));
        assert_eq!(r.continuous_on_circle, Some(true));
        assert_eq!(r.degree, Some(BigInt::from(2)));

        let r = structure_report(&rotation_half());
        assert!(r.injective);
        assert_eq!(r.complete, Some(false));
        assert_eq!(r.continuous_on_circle, Some(true));
        assert_eq!(r.degree, Some(BigInt::from(1)));

        let r = structure_report(&three_halves());
        assert!(!r.injective);
        assert_eq!(r.complete, Some(true));
        assert_eq!(r.degree, Some(BigInt::from(2)));
    }

    #[test]
    fn structure_flags_discontinuity_and_non_circle_domains() {
        let jump = PamMap::new(
            Interval::unit(),
            vec![piece(int(0), rat(1, 2), int(1), int(0)), piece(rat(1, 2), int(1), int(1), rat(-1, 4))],
            true,
        );
        let r = structure_report(&jump);
        assert_eq!(r.continuous_on_circle, Some(false));
        assert_eq!(r.degree, None);

        let wide = PamMap::new(iv(int(0), int(2)), vec![piece(int(0), int(2), int(1), int(0))], true);
        let r = structure_report(&wide);
        assert_eq!(r.complete, None);
        assert_eq!(r.continuous_on_circle, None);
    }

    #[test]
    fn conjugate_examples() {
        let m = three_halves();
        assert_eq!(conjugate(&m, &int(1), &int(0)).unwrap(), m);

        let greedy_top = PamMap::new(iv(int(0), rat(4, 3)), vec![piece(rat(4, 5), rat(4, 3), rat(5, 2), int(-2))], false);
        let g = conjugate(&greedy_top, &rat(3, 4), &int(0)).unwrap();
        assert_eq!(g.pieces[0], piece(rat(3, 5), int(1), rat(5, 2), rat(-3, 2)));
        assert_eq!(g.domain, Interval::unit());
    }

    #[test]
    fn conjugate_round_trip_and_semantics() {
        let m = three_halves();
        let (u, v) = (rat(-2, 7), rat(5, 3));
        let g = conjugate(&m, &u, &v).unwrap();
        let (ui, vi) = inverse_affine(&u, &v);
        assert_eq!(conjugate(&g, &ui, &vi).unwrap(), m);

        let (u, v) = (rat(3, 5), rat(-1, 4));
        let g = conjugate(&m, &u, &v).unwrap();
        for j in 0..100 {
            let x = rat(j, 100);
            let fx = m.eval(&x).unwrap().remove(0);
            let hx = &u * &x + &v;
            assert_eq!(&u * &fx + &v, g.eval(&hx).unwrap().remove(0));
        }
    }

    #[test]
    fn normalize_maps_domain_to_unit() {
        let m = PamMap::new(
            iv(int(2), int(4)),
            vec![piece(int(2), int(3), int(2), int(-2)), piece(int(3), int(4), int(2), int(-4))],
            true,
        );
        let n = normalize(&m);
        assert_eq!(n.domain, Interval::unit());
        assert_eq!(structure_report(&n).degree, Some(BigInt::from(2)));
    }

    #[test]
    fn bfs_on_nondeterministic_map() {
        // x -> x/2 or x/2 + 1/2 on [0, 1): everything dyadic is reachable.
        let nd = PamMap::new(
            Interval::unit(),
            vec![piece(int(0), int(1), rat(1, 2), int(0)), piece(int(0), int(1), rat(1, 2), rat(1, 2))],
            false,
        );
        let out = explore_reach(&nd, &int(0), Some(&rat(5, 8)), None, 10, 10_000).unwrap();
        match out {
            BfsOutcome::Reached { depth, path } => {
                assert_eq!(depth, 3);
                assert_eq!(path.last().unwrap().1, rat(5, 8));
            }
            other => panic!("unexpected {other:?}"),
        }
        let out = explore_reach(&nd, &int(0), Some(&rat(1, 3)), Some(&[0]), 10, 100).unwrap();
        assert!(matches!(out, BfsOutcome::Exhausted { .. }));
    }
}
