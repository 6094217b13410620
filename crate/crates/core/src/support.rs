//! Intervals and adaptive support sets.

use std::fmt;

use crate::error::{Error, Result};

/// Relative separation below which two support points are considered equal.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// A closed interval `[lo, hi]` whose endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn nonnegative() -> Self {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo >= 0.0
    }

    pub fn is_nonpositive(&self) -> bool {
        self.hi <= 0.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Finite window used to probe the interval numerically: tails are cut at
    /// `reach` beyond the finite endpoint (or at `±reach` for the real line).
    pub fn probe_window(&self, reach: f64) -> (f64, f64) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (true, false) => (self.lo, self.lo + reach.max(1.0) * (1.0 + self.lo.abs())),
            (false, true) => (self.hi - reach.max(1.0) * (1.0 + self.hi.abs()), self.hi),
            (false, false) => (-reach, reach),
        }
    }

    /// `count` evenly spaced points over the probe window (endpoints included).
    pub fn grid(&self, count: usize, reach: f64) -> Vec<f64> {
        let (a, b) = self.probe_window(reach);
        if count < 2 {
            return vec![0.5 * (a + b)];
        }
        (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= DUPLICATE_TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

/// Sorted, strictly increasing set of support points.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    points: Vec<f64>,
}

impl SupportSet {
    /// Sorts the points and rejects non-finite values and near-duplicates.
    pub fn new(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut points: Vec<f64> = points.into_iter().collect();
        if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidSupport(format!("non-finite point {bad}")));
        }
        points.sort_by(|a, b| a.total_cmp(b));
        for w in points.windows(2) {
            if near(w[0], w[1]) {
                return Err(Error::InvalidSupport(format!(
                    "points {} and {} are closer than the duplicate tolerance",
                    w[0], w[1]
                )));
            }
        }
        Ok(SupportSet { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.points.contains(&x)
    }

    /// Inserts `x`, keeping the set sorted. Returns `false` (and leaves the set
    /// unchanged) when `x` duplicates an existing point within tolerance.
    pub fn insert(&mut self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let pos = self.points.partition_point(|&p| p < x);
        let dup_left = pos > 0 && near(self.points[pos - 1], x);
        let dup_right = pos < self.points.len() && near(self.points[pos], x);
        if dup_left || dup_right {
            return false;
        }
        self.points.insert(pos, x);
        true
    }

    /// Checks that every point lies in `domain`.
    pub fn check_within(&self, domain: &Interval) -> Result<()> {
        match self.points.iter().find(|&&p| !domain.contains(p)) {
            Some(p) => Err(Error::InvalidSupport(format!(
                "point {p} lies outside the domain {domain}"
            ))),
            None => Ok(()),
        }
    }

    /// The partition of `domain` induced by the points. Zero-width pieces (a
    /// support point sitting on a domain endpoint) are dropped.
    pub fn intervals(&self, domain: &Interval) -> Vec<Interval> {
        let mut edges = Vec::with_capacity(self.points.len() + 2);
        edges.push(domain.lo);
        edges.extend(
            self.points
                .iter()
                .copied()
                .filter(|&p| domain.contains_interior(p)),
        );
        edges.push(domain.hi);
        edges
            .windows(2)
            .filter(|w| w[0] < w[1])
            .map(|w| Interval { lo: w[0], hi: w[1] })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_degenerate() {
        assert!(Interval::new(0.0, 0.0).is_err());
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 0.0).is_err());
        assert!(Interval::new(f64::INFINITY, f64::INFINITY).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn support_set_sorts_and_rejects_duplicates() {
        let s = SupportSet::new([2.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.points(), &[0.0, 1.0, 2.0]);
        assert!(SupportSet::new([1.0, 1.0 + 1e-15]).is_err());
        assert!(SupportSet::new([f64::NAN]).is_err());
    }

    #[test]
    fn insert_deduplicates() {
        let mut s = SupportSet::new([0.0, 1.0]).unwrap();
        assert!(s.insert(0.5));
        assert!(!s.insert(0.5 + 1e-16));
        assert!(!s.insert(f64::INFINITY));
        assert_eq!(s.points(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn intervals_skip_zero_width_pieces() {
        let s = SupportSet::new([0.0, 2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()]).unwrap();
        let pieces = s.intervals(&Interval::nonnegative());
        assert_eq!(pieces.len(), 4);
        assert_eq!(pieces[0].lo, 0.0);
        assert_eq!(pieces[3].hi, f64::INFINITY);

        let pieces = s.intervals(&Interval::real_line());
        assert_eq!(pieces.len(), 5);
    }
}
