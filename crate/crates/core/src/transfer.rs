//! Transfer operator on piecewise-constant densities, and orbit histograms.
//!
//! Pushing a step density through an affine piece gives another step
//! density, so `L_f` can be applied exactly: every breakpoint and value stays
//! rational.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, to_f64, Rational};
use crate::pam::{Interval, OrbitRecord, PamMap};

/// `values[i]` is the density on `[breakpoints[i], breakpoints[i + 1])`;
/// the density is zero outside `[breakpoints[0], breakpoints[n])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepDensity {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl StepDensity {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints cannot carry {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breakpoints must be strictly ascending".into()));
        }
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidArgument(format!("negative density value {v}")));
        }
        Ok(StepDensity { breakpoints, values })
    }

    /// The constant density `value` on `interval`.
    pub fn constant(interval: &Interval, value: Rational) -> Self {
        StepDensity::new(vec![interval.left().clone(), interval.right().clone()], vec![value])
            .expect("interval is nonempty")
    }

    /// The normalized uniform density on `interval`.
    pub fn uniform(interval: &Interval) -> Self {
        StepDensity::constant(interval, interval.length().recip())
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn support(&self) -> Interval {
        Interval::new(self.breakpoints[0].clone(), self.breakpoints.last().unwrap().clone())
            .expect("breakpoints ascend")
    }

    pub fn gaps(&self) -> impl Iterator<Item = (&Rational, &Rational, &Rational)> {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, v)| (&w[0], &w[1], v))
    }

    pub fn mass(&self) -> Rational {
        self.gaps().map(|(l, r, v)| v * (r - l)).sum()
    }

    pub fn value_at(&self, x: &Rational) -> Rational {
        match self.breakpoints.partition_point(|b| b <= x) {
            0 => Rational::zero(),
            i if i == self.breakpoints.len() => Rational::zero(),
            i => self.values[i - 1].clone(),
        }
    }

    /// Drops breakpoints between equal values.
    pub fn merged(&self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut values: Vec<Rational> = Vec::new();
        for (_, r, v) in self.gaps() {
            if values.last() == Some(v) {
                *breakpoints.last_mut().unwrap() = r.clone();
            } else {
                values.push(v.clone());
                breakpoints.push(r.clone());
            }
        }
        StepDensity { breakpoints, values }
    }

    /// Exact `∫ |self - other|` over the common refinement.
    pub fn l1_distance(&self, other: &StepDensity) -> Rational {
        let mut cuts: Vec<&Rational> = self.breakpoints.iter().chain(&other.breakpoints).collect();
        cuts.sort();
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let d = self.value_at(w[0]) - other.value_at(w[0]);
                d.abs() * (w[1] - w[0])
            })
            .sum()
    }

    /// Smallest and largest value, after merging.
    pub fn extrema(&self) -> (Rational, Rational) {
        let merged = self.merged();
        let min = merged.values.iter().min().unwrap().clone();
        let max = merged.values.iter().max().unwrap().clone();
        (min, max)
    }

    /// Rows `left, right, value, value_decimal` with exact `p/q` cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["left", "right", "value", "value_decimal"])?;
        for (l, r, v) in self.gaps() {
            w.write_record([format_rational(l), format_rational(r), format_rational(v), to_f64(v).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One application of the transfer operator,
/// `(L phi)(x) = sum over f(y) = x of phi(y) / |f'(y)|`.
///
/// The result spans the map domain; its breakpoints are the union of the
/// pushed breakpoints and are not merged.
pub fn transfer_once(map: &PamMap, phi: &StepDensity) -> Result<StepDensity> {
    if !map.deterministic {
        return Err(Error::NotDeterministic);
    }
    if let Some(piece) = map.pieces.iter().position(|p| p.a.is_zero()) {
        return Err(Error::SlopeZero { piece });
    }
    let outside = phi
        .gaps()
        .any(|(l, r, v)| !v.is_zero() && (l < map.domain.left() || r > map.domain.right()));
    if outside {
        return Err(Error::InvalidArgument("density is not supported on the map domain".into()));
    }
    // difference array: +v where a pushed gap starts, -v where it ends
    let mut events: BTreeMap<Rational, Rational> = BTreeMap::new();
    events.insert(map.domain.left().clone(), Rational::zero());
    events.insert(map.domain.right().clone(), Rational::zero());
    for piece in &map.pieces {
        let scale = piece.a.abs().recip();
        for (l, r, v) in phi.gaps() {
            if v.is_zero() {
                continue;
            }
            let gap = Interval::new(l.clone(), r.clone()).expect("breakpoints ascend");
            let Some(part) = gap.intersection(&piece.domain) else { continue };
            let image = part.affine_image(&piece.a, &piece.b);
            let w = v * &scale;
            *events.entry(image.left().clone()).or_insert_with(Rational::zero) += &w;
            *events.entry(image.right().clone()).or_insert_with(Rational::zero) -= w;
        }
    }
    let mut breakpoints = Vec::with_capacity(events.len());
    let mut values = Vec::with_capacity(events.len());
    let mut level = Rational::zero();
    for (x, delta) in events {
        if !breakpoints.is_empty() {
            values.push(level.clone());
        }
        level += delta;
        breakpoints.push(x);
    }
    StepDensity::new(breakpoints, values)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferRun {
    pub phi: StepDensity,
    /// `l1[k]` is the distance between iterates `k` and `k + 1`.
    pub l1: Vec<Rational>,
    pub steps_done: usize,
    /// Set when the breakpoint count passed `merge_cap`.
    pub stopped_early: bool,
}

/// Applies [`transfer_once`] up to `steps` times, merging after each step.
/// Stops after the first iterate with more than `merge_cap` breakpoints.
pub fn iterate_transfer(map: &PamMap, phi0: &StepDensity, steps: usize, merge_cap: usize) -> Result<TransferRun> {
    let mut phi = phi0.merged();
    let mut l1 = Vec::with_capacity(steps);
    for k in 0..steps {
        let next = transfer_once(map, &phi)?.merged();
        l1.push(phi.l1_distance(&next));
        phi = next;
        if phi.breakpoints.len() > merge_cap {
            return Ok(TransferRun { phi, l1, steps_done: k + 1, stopped_early: true });
        }
    }
    Ok(TransferRun { phi, l1, steps_done: steps, stopped_early: false })
}

/// `(Kmin, Kmax)` candidates for the reachability bound. These are estimates
/// read off an iterate, not proven bounds on the invariant density.
pub fn density_extrema(phi: &StepDensity) -> (Rational, Rational) {
    phi.extrema()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    pub bins: Vec<Interval>,
    pub counts: Vec<u64>,
    pub n: u64,
}

impl EmpiricalDistribution {
    pub fn frequencies(&self) -> Vec<Rational> {
        self.counts
            .iter()
            .map(|&c| if self.n == 0 { Rational::zero() } else { Rational::new(c.into(), self.n.into()) })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["left", "right", "count", "frequency", "frequency_decimal"])?;
        for ((bin, c), f) in self.bins.iter().zip(&self.counts).zip(self.frequencies()) {
            w.write_record([
                format_rational(bin.left()),
                format_rational(bin.right()),
                c.to_string(),
                format_rational(&f),
                to_f64(&f).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Counts points per bin. Points in no bin only contribute to `n`.
pub fn histogram(points: &[Rational], bins: &[Interval]) -> EmpiricalDistribution {
    let mut counts = vec![0u64; bins.len()];
    for x in points {
        for (c, bin) in counts.iter_mut().zip(bins) {
            if bin.contains(x) {
                *c += 1;
            }
        }
    }
    EmpiricalDistribution { bins: bins.to_vec(), counts, n: points.len() as u64 }
}

/// Histogram of an orbit; a cycle is counted once around.
pub fn empirical_histogram(orbit: &OrbitRecord, bins: &[Interval]) -> EmpiricalDistribution {
    histogram(orbit.distinct_points(), bins)
}

/// `F(n) = #{i <= n : x_i in I}` for `n = 1..=points.len()`.
pub fn running_count(points: &[Rational], interval: &Interval) -> Vec<u64> {
    points
        .iter()
        .scan(0u64, |f, x| {
            *f += u64::from(interval.contains(x));
            Some(*f)
        })
        .collect()
}

/// `n` equal bins covering `interval`.
pub fn uniform_bins(interval: &Interval, n: usize) -> Vec<Interval> {
    let step = interval.length() / Rational::from_integer(n.into());
    (0..n)
        .map(|i| {
            let l = interval.left() + &step * Rational::from_integer(i.into());
            let r = &l + &step;
            Interval::new(l, r).expect("step > 0")
        })
        .collect()
}
