//! Exact truth values.
//!
//! Truth values live in `I = [0,1]^2 \ {(0,r) : r > 0}` ordered
//! lexicographically. `(0,0)` is absolute truth and `(1,1)` absolute falsity,
//! so conjunction is the lexicographic maximum and the universal quantifier
//! is a supremum.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruthError {
    #[error("({0},{1}) is not a truth value: a zero first coordinate forces a zero second coordinate")]
    NotInI(Rational, Rational),
    #[error("({0},{1}) is not a dual truth value: a first coordinate of 1 forces a second coordinate of 1")]
    NotInDual(Rational, Rational),
    #[error("coordinate {0} lies outside [0,1]")]
    OutOfRange(Rational),
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("malformed truth value `{0}`")]
    BadTruthValue(String),
    #[error("extrema of an empty set")]
    EmptySet,
}

/// A reduced fraction with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn in_unit_interval(&self) -> bool {
        *self >= Self::ZERO && *self <= Self::ONE
    }

    /// `1/n` for `n >= 1`.
    pub fn reciprocal_of(n: u64) -> Self {
        assert!(n >= 1, "reciprocal of zero");
        Rational::new(1, n as i64)
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> i64 {
        *self.0.ceil().numer()
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i64 {
        *self.0.floor().numer()
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = TruthError;

    /// Accepts `INT` or `INT/INT`, surrounding whitespace ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TruthError::BadRational(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    }
}

fn check_unit(r: Rational) -> Result<Rational, TruthError> {
    if r.in_unit_interval() {
        Ok(r)
    } else {
        Err(TruthError::OutOfRange(r))
    }
}

/// Splits `(a,b)` into its two coordinate strings.
fn split_pair(s: &str) -> Option<(&str, &str)> {
    let t = s.trim();
    let inner = t.strip_prefix('(')?.strip_suffix(')')?;
    inner.split_once(',')
}

/// A member of `I`. Construction rejects `(0, r)` with `r > 0`, so every
/// value in circulation is legal.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthValue {
    first: Rational,
    second: Rational,
}

impl TruthValue {
    /// Absolute truth, the least element.
    pub const ZERO: TruthValue = TruthValue {
        first: Rational::ZERO,
        second: Rational::ZERO,
    };
    /// Absolute falsity, the greatest element.
    pub const ONE: TruthValue = TruthValue {
        first: Rational::ONE,
        second: Rational::ONE,
    };

    pub fn new(first: Rational, second: Rational) -> Result<Self, TruthError> {
        check_unit(first)?;
        check_unit(second)?;
        if first.is_zero() && !second.is_zero() {
            return Err(TruthError::NotInI(first, second));
        }
        Ok(TruthValue { first, second })
    }

    /// `(r, r)`.
    pub fn hat(r: Rational) -> Result<Self, TruthError> {
        Self::new(r, r)
    }

    pub fn first(&self) -> Rational {
        self.first
    }

    pub fn second(&self) -> Rational {
        self.second
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

impl fmt::Debug for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TruthValue {
    type Err = TruthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = split_pair(s).ok_or_else(|| TruthError::BadTruthValue(s.to_string()))?;
        TruthValue::new(a.parse()?, b.parse()?)
    }
}

/// A member of `I* = [0,1]^2 \ {(1, r) : r < 1}`, the image of `I` under
/// [`tv_u`]. Here `(1,1)` is absolute truth.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualTruthValue {
    first: Rational,
    second: Rational,
}

impl DualTruthValue {
    /// Absolute truth on the dual side.
    pub const TOP: DualTruthValue = DualTruthValue {
        first: Rational::ONE,
        second: Rational::ONE,
    };

    pub fn new(first: Rational, second: Rational) -> Result<Self, TruthError> {
        check_unit(first)?;
        check_unit(second)?;
        if first.is_one() && !second.is_one() {
            return Err(TruthError::NotInDual(first, second));
        }
        Ok(DualTruthValue { first, second })
    }

    pub fn first(&self) -> Rational {
        self.first
    }

    pub fn second(&self) -> Rational {
        self.second
    }
}

impl fmt::Display for DualTruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

impl fmt::Debug for DualTruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DualTruthValue {
    type Err = TruthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = split_pair(s).ok_or_else(|| TruthError::BadTruthValue(s.to_string()))?;
        DualTruthValue::new(a.parse()?, b.parse()?)
    }
}

pub fn tv_compare(a: &TruthValue, b: &TruthValue) -> Ordering {
    a.cmp(b)
}

/// Lexicographic `(sup, inf)` of a nonempty finite set.
pub fn tv_extrema<'a, I>(values: I) -> Result<(TruthValue, TruthValue), TruthError>
where
    I: IntoIterator<Item = &'a TruthValue>,
{
    let mut it = values.into_iter();
    let first = *it.next().ok_or(TruthError::EmptySet)?;
    Ok(it.fold((first, first), |(hi, lo), v| (hi.max(*v), lo.min(*v))))
}

/// Gödel implication: `(0,0)` when `a >= b`, otherwise `b`.
pub fn tv_residuum(a: TruthValue, b: TruthValue) -> TruthValue {
    if a >= b {
        TruthValue::ZERO
    } else {
        b
    }
}

/// Discrete-max distance, the value of a biconditional.
pub fn tv_dmax(a: TruthValue, b: TruthValue) -> TruthValue {
    if a == b {
        TruthValue::ZERO
    } else {
        a.max(b)
    }
}

/// `u(x, y) = (1 - x, 1 - y)`.
pub fn tv_u(a: TruthValue) -> DualTruthValue {
    DualTruthValue {
        first: Rational::ONE - a.first,
        second: Rational::ONE - a.second,
    }
}

/// Inverse of [`tv_u`] on its image.
pub fn tv_u_inverse(a: DualTruthValue) -> TruthValue {
    TruthValue {
        first: Rational::ONE - a.first,
        second: Rational::ONE - a.second,
    }
}

/// Dual implication: absolute truth `(1,1)` when `a <= b`, otherwise `b`.
pub fn dual_residuum(a: DualTruthValue, b: DualTruthValue) -> DualTruthValue {
    if a <= b {
        DualTruthValue::TOP
    } else {
        b
    }
}

/// All points `(p/D, q/D)` of `I`, ascending.
pub fn grid_points(denominator: u32) -> Vec<TruthValue> {
    let d = i64::from(denominator.max(1));
    let mut out = Vec::new();
    for p in 0..=d {
        for q in 0..=d {
            if p == 0 && q > 0 {
                continue;
            }
            out.push(TruthValue {
                first: Rational::new(p, d),
                second: Rational::new(q, d),
            });
        }
    }
    out
}
