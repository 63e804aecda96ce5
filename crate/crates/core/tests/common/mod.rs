#![allow(dead_code)]

use pamlab::exactnum::{int, rat, Rational};
use pamlab::pam::{AffinePiece, Interval, PamMap};
use pamlab::transfer::StepDensity;
use rand::Rng;

pub fn iv(l: Rational, r: Rational) -> Interval {
    Interval::new(l, r).unwrap()
}

/// `(3/2)x` on `[0, 2/3)`, `3x - 2` on `[2/3, 1)`.
pub fn three_halves() -> PamMap {
    PamMap::validated(
        Interval::unit(),
        vec![
            AffinePiece::new(iv(int(0), rat(2, 3)), rat(3, 2), int(0)),
            AffinePiece::new(iv(rat(2, 3), int(1)), int(3), int(-2)),
        ],
        true,
    )
    .unwrap()
}

pub fn rotation_half() -> PamMap {
    PamMap::validated(
        Interval::unit(),
        vec![
            AffinePiece::new(iv(int(0), rat(1, 2)), int(1), rat(1, 2)),
            AffinePiece::new(iv(rat(1, 2), int(1)), int(1), rat(-1, 2)),
        ],
        true,
    )
    .unwrap()
}

pub fn doubling() -> PamMap {
    PamMap::validated(
        Interval::unit(),
        vec![
            AffinePiece::new(iv(int(0), rat(1, 2)), int(2), int(0)),
            AffinePiece::new(iv(rat(1, 2), int(1)), int(2), int(-1)),
        ],
        true,
    )
    .unwrap()
}

/// Random ascending cut points `0 = c_0 < ... < c_k = 1` on the grid `1/denom`.
pub fn random_cuts<R: Rng>(rng: &mut R, pieces: usize, denom: i64) -> Vec<Rational> {
    let mut inner: Vec<i64> = Vec::new();
    while inner.len() + 1 < pieces.min(denom as usize) {
        let j = rng.gen_range(1..denom);
        if !inner.contains(&j) {
            inner.push(j);
        }
    }
    inner.sort();
    let mut cuts = vec![int(0)];
    cuts.extend(inner.into_iter().map(|j| rat(j, denom)));
    cuts.push(int(1));
    cuts
}

/// A random valid deterministic map on `[0, 1)` with nonzero slopes.
pub fn random_map<R: Rng>(rng: &mut R) -> PamMap {
    let k = rng.gen_range(1..=4);
    let denom = rng.gen_range(2..=12);
    let cuts = random_cuts(rng, k, denom);
    let pieces = cuts
        .windows(2)
        .map(|w| {
            let (l, r) = (w[0].clone(), w[1].clone());
            let len = &r - &l;
            // |a| = s/q with |a| * len <= 1
            let q = rng.gen_range(1..=6i64);
            let s_max = (Rational::from_integer(q.into()) / &len).floor().to_integer();
            let s_max: i64 = s_max.try_into().unwrap_or(i64::MAX).clamp(1, 40);
            let mag = rat(rng.gen_range(1..=s_max), q);
            let span = &mag * &len;
            let room = int(1) - &span;
            let negative = room > int(0) && rng.gen_bool(0.4);
            // image start c in [0, room], strictly below room for a closed right end
            let steps = 10;
            let j = if negative { rng.gen_range(0..steps) } else { rng.gen_range(0..=steps) };
            let c = &room * rat(j, steps);
            let (a, b) = if negative {
                let a = -mag;
                let b = &c - &a * &r;
                (a, b)
            } else {
                let b = &c - &mag * &l;
                (mag, b)
            };
            AffinePiece::new(iv(l, r), a, b)
        })
        .collect();
    let map = PamMap::new(Interval::unit(), pieces, true);
    assert!(map.validate().is_valid(), "generator produced {:?}: {}", map, map.validate());
    map
}

/// A random nonnegative step density on `[0, 1)`.
pub fn random_density<R: Rng>(rng: &mut R) -> StepDensity {
    let k = rng.gen_range(1..=5);
    let denom = rng.gen_range(2..=16);
    let cuts = random_cuts(rng, k, denom);
    let values = (1..cuts.len()).map(|_| rat(rng.gen_range(0..20), rng.gen_range(1..8))).collect();
    StepDensity::new(cuts, values).unwrap()
}

/// Random rational `n/d` with `d` built from small primes and an occasional stray factor.
pub fn random_rational<R: Rng>(rng: &mut R, primes: &[u64]) -> Rational {
    let mut d: i64 = 1;
    for &p in primes {
        for _ in 0..rng.gen_range(0..4) {
            d *= p as i64;
        }
    }
    if rng.gen_bool(0.2) {
        d *= [7, 11, 13][rng.gen_range(0..3)];
    }
    let mut n: i64 = rng.gen_range(1..2000);
    for &p in primes {
        if rng.gen_bool(0.3) {
            n *= p as i64;
        }
    }
    if rng.gen_bool(0.5) {
        n = -n;
    }
    rat(n, d)
}
