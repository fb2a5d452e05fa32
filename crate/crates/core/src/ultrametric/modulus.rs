use std::fmt;

use thiserror::Error;

use crate::truthval::{Rational, TruthValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModulusError {
    #[error("modulus is not nondecreasing: delta({n}) = {at} > delta({next}) = {next_value}")]
    Decreasing {
        n: u64,
        at: u64,
        next: u64,
        next_value: u64,
    },
    #[error("modulus must be at least 1, but delta({0}) = {1}")]
    BelowOne(u64, u64),
    #[error("table modulus lists n = {0} twice")]
    DuplicateEntry(u64),
    #[error("table modulus entries must use n >= 1")]
    ZeroArgument,
}

/// A nondecreasing map `delta : N+ -> N+`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Modulus {
    /// `delta(n) = slope * n + offset`.
    Linear { slope: u64, offset: u64 },
    /// Explicit values for the listed `n`, `slope * n + offset` elsewhere.
    Table {
        entries: Vec<(u64, u64)>,
        slope: u64,
        offset: u64,
    },
}

/// Supremal `n` at which a modulus premise still holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NStar {
    /// The premise fails already at `n = 1`.
    Never,
    Finite(u64),
    Infinite,
}

impl fmt::Display for NStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NStar::Never => write!(f, "none"),
            NStar::Finite(n) => write!(f, "{n}"),
            NStar::Infinite => write!(f, "inf"),
        }
    }
}

impl Default for Modulus {
    fn default() -> Self {
        Modulus::identity()
    }
}

impl Modulus {
    /// `Linear(1, 0)`, i.e. `delta(n) = n`.
    pub fn identity() -> Self {
        Modulus::Linear {
            slope: 1,
            offset: 0,
        }
    }

    pub fn linear(slope: u64, offset: u64) -> Result<Self, ModulusError> {
        let m = Modulus::Linear { slope, offset };
        m.validate()?;
        Ok(m)
    }

    pub fn table(mut entries: Vec<(u64, u64)>, slope: u64, offset: u64) -> Result<Self, ModulusError> {
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ModulusError::DuplicateEntry(w[0].0));
            }
        }
        if entries.first().is_some_and(|e| e.0 == 0) {
            return Err(ModulusError::ZeroArgument);
        }
        let m = Modulus::Table {
            entries,
            slope,
            offset,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn eval(&self, n: u64) -> u64 {
        match self {
            Modulus::Linear { slope, offset } => slope.saturating_mul(n).saturating_add(*offset),
            Modulus::Table {
                entries,
                slope,
                offset,
            } => match entries.binary_search_by_key(&n, |e| e.0) {
                Ok(i) => entries[i].1,
                Err(_) => slope.saturating_mul(n).saturating_add(*offset),
            },
        }
    }

    fn last_listed(&self) -> u64 {
        match self {
            Modulus::Linear { .. } => 0,
            Modulus::Table { entries, .. } => entries.last().map_or(0, |e| e.0),
        }
    }

    fn slope(&self) -> u64 {
        match self {
            Modulus::Linear { slope, .. } | Modulus::Table { slope, .. } => *slope,
        }
    }

    /// Checks `delta >= 1` and monotonicity. Beyond the last listed entry the
    /// tail is affine with nonnegative slope, so checking one step past it
    /// suffices.
    pub fn validate(&self) -> Result<(), ModulusError> {
        let horizon = self.last_listed() + 1;
        let mut prev = self.eval(1);
        if prev < 1 {
            return Err(ModulusError::BelowOne(1, prev));
        }
        for n in 2..=horizon.max(2) {
            let v = self.eval(n);
            if v < prev {
                return Err(ModulusError::Decreasing {
                    n: n - 1,
                    at: prev,
                    next: n,
                    next_value: v,
                });
            }
            prev = v;
        }
        Ok(())
    }

    /// Whether `distance < hat(1/delta(n))`.
    pub fn premise_holds(&self, distance: TruthValue, n: u64) -> bool {
        below_reciprocal(distance, self.eval(n))
    }

    /// The supremal `n` with `distance < hat(1/delta(n))`. The premise is
    /// downward closed in `n` because `delta` is nondecreasing.
    pub fn n_star(&self, distance: TruthValue) -> NStar {
        if distance.is_zero() {
            return NStar::Infinite;
        }
        if !self.premise_holds(distance, 1) {
            return NStar::Never;
        }
        let horizon = self.last_listed() + 1;
        if self.slope() == 0 {
            // eventually constant: the premise at the horizon decides the tail
            if self.premise_holds(distance, horizon) {
                return NStar::Infinite;
            }
        }
        // any n with delta(n) > 1/first falsifies the premise
        let inv = distance.first().recip().ceil().max(1) as u64;
        let mut hi = horizon.max(inv.saturating_add(1));
        while self.premise_holds(distance, hi) {
            hi = hi.saturating_mul(2);
        }
        let mut lo = 1;
        // invariant: premise(lo) true, premise(hi) false
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.premise_holds(distance, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        NStar::Finite(lo)
    }
}

/// `v < hat(1/m)` for `m >= 1`.
pub fn below_reciprocal(v: TruthValue, m: u64) -> bool {
    let r = Rational::reciprocal_of(m.max(1));
    v < TruthValue::hat(r).expect("1/m lies in [0,1]")
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Linear { slope, offset } => write!(f, "linear {slope} {offset}"),
            Modulus::Table {
                entries,
                slope,
                offset,
            } => {
                write!(f, "table ")?;
                for (n, v) in entries {
                    write!(f, "{n}:{v},")?;
                }
                write!(f, "default linear {slope} {offset}")
            }
        }
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(a: i64, b: i64, c: i64, d: i64) -> TruthValue {
        TruthValue::new(Rational::new(a, b), Rational::new(c, d)).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Modulus::linear(0, 0).is_err());
        assert!(Modulus::linear(0, 3).is_ok());
        assert!(Modulus::table(vec![(1, 5), (2, 3)], 1, 0).is_err());
        assert!(Modulus::table(vec![(1, 2), (2, 3)], 1, 2).is_ok());
        // tail drops below the last entry
        assert!(Modulus::table(vec![(1, 9)], 1, 0).is_err());
    }

    #[test]
    fn n_star_linear_identity() {
        let m = Modulus::identity();
        // (1/4,1/4) < hat(1/n) iff n <= 3
        assert_eq!(m.n_star(tv(1, 4, 1, 4)), NStar::Finite(3));
        // (1/4,0) < hat(1/4)
        assert_eq!(m.n_star(tv(1, 4, 0, 1)), NStar::Finite(4));
        assert_eq!(m.n_star(TruthValue::ZERO), NStar::Infinite);
        assert_eq!(m.n_star(TruthValue::ONE), NStar::Never);
    }

    #[test]
    fn n_star_matches_unrolling() {
        let moduli = [
            Modulus::identity(),
            Modulus::linear(2, 1).unwrap(),
            Modulus::linear(0, 2).unwrap(),
            Modulus::table(vec![(1, 1), (2, 1), (3, 4)], 2, 0).unwrap(),
        ];
        for m in &moduli {
            for v in crate::truthval::grid_points(6) {
                let brute = (1..=200u64).filter(|&n| m.premise_holds(v, n)).max();
                let got = m.n_star(v);
                match got {
                    NStar::Never => assert_eq!(brute, None),
                    NStar::Finite(n) => assert_eq!(brute, Some(n), "{m} at {v}"),
                    NStar::Infinite => assert_eq!(brute, Some(200), "{m} at {v}"),
                }
            }
        }
    }
}
